"""Local and Cech cohomology of graded modules over k[tau_1, ..., tau_s].

A GradedModule is known degreewise on a window [lo, hi]: it is zero below
lo and unknown above hi. Grading is homological, so cohomological degrees
appear as negative degrees. Multiplication by tau_i raises degree by
|tau_i| and acts on column vectors.

Local cohomology is the colimit of unstable Koszul cohomology
K_n = (M -> M) tensored over all tau_i, taken degreewise with
stabilization detection; the Cech complex is the same colimit with the
degree-0 term dropped.
"""
import itertools
import json
import logging
import math
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

import gfmat
from errors import BudgetExceededError, ModuleStructureError, ParseError, WindowTooSmallError
from records import BettiTable, GradedBettiTable, GradedModuleSpec, RadicalInvarianceReport

logger = logging.getLogger(__name__)

MAX_VARIABLES = 3


# =====================================================
# GRADED MODULES
# =====================================================

class GradedModule:
    def __init__(self, p: int, tau_degrees: Sequence[int], window: Tuple[int, int],
                 dims: Mapping[int, int], actions: Sequence[Mapping[int, np.ndarray]] = (),
                 fg_bound: Optional[int] = None, name: str = ""):
        self.p = gfmat.check_modulus(p)
        self.tau_degrees = tuple(int(t) for t in tau_degrees)
        if any(t <= 0 for t in self.tau_degrees):
            raise ModuleStructureError(f"tau degrees must be positive, got {self.tau_degrees}")
        if len(self.tau_degrees) > MAX_VARIABLES:
            raise ModuleStructureError(f"at most {MAX_VARIABLES} variables are supported")
        self.lo, self.hi = int(window[0]), int(window[1])
        if self.lo > self.hi:
            raise ModuleStructureError(f"empty window {window}")
        self.dims = {d: int(dims.get(d, 0)) for d in range(self.lo, self.hi + 1)}
        if any(v < 0 for v in self.dims.values()):
            raise ModuleStructureError("negative dimension")
        self.fg_bound = self.lo if fg_bound is None else int(fg_bound)
        self.name = name

        if actions and len(actions) != self.s:
            raise ModuleStructureError(f"{len(actions)} action tables for {self.s} variables")
        self._actions = []
        for i, t in enumerate(self.tau_degrees):
            table = actions[i] if actions else {}
            mats = {}
            for d in range(self.lo, self.hi - t + 1):
                shape = (self.dims[d + t], self.dims[d])
                raw = table.get(d)
                arr = gfmat.zeros(*shape) if raw is None or np.size(raw) == 0 else gfmat.mod_p(raw, self.p)
                if arr.shape != shape:
                    raise ModuleStructureError(f"tau_{i} at degree {d}: shape {arr.shape}, expected {shape}")
                arr.setflags(write=False)
                mats[d] = arr
            self._actions.append(mats)

    @property
    def s(self) -> int:
        return len(self.tau_degrees)

    @property
    def window(self) -> Tuple[int, int]:
        return self.lo, self.hi

    def dim(self, d: int) -> int:
        if d < self.lo:
            return 0
        if d > self.hi:
            raise WindowTooSmallError(d, self.hi)
        return self.dims[d]

    def action(self, i: int, d: int) -> np.ndarray:
        t = self.tau_degrees[i]
        if d + t > self.hi:
            raise WindowTooSmallError(d + t, self.hi, f"tau_{i} from degree {d}")
        if d < self.lo:
            return gfmat.zeros(self.dim(d + t), 0)
        return self._actions[i][d]

    def monomial(self, exponents: Sequence[int], d: int) -> np.ndarray:
        """Matrix of prod tau_i^{e_i} from M_d."""
        mat = gfmat.identity(self.dim(d))
        cur = d
        for i, e in enumerate(exponents):
            for _ in range(e):
                mat = gfmat.matmul(self.action(i, cur), mat, self.p)
                cur += self.tau_degrees[i]
        return mat

    def check_centrality(self) -> None:
        for i, j in itertools.combinations(range(self.s), 2):
            ti, tj = self.tau_degrees[i], self.tau_degrees[j]
            for d in range(self.lo, self.hi - ti - tj + 1):
                ij = gfmat.matmul(self.action(j, d + ti), self.action(i, d), self.p)
                ji = gfmat.matmul(self.action(i, d + tj), self.action(j, d), self.p)
                if not np.array_equal(ij, ji):
                    raise ModuleStructureError(f"tau_{i} and tau_{j} do not commute at degree {d}")

    def check_fg(self) -> None:
        """Above fg_bound every slice is spanned by tau-images of lower slices."""
        for d in range(max(self.fg_bound + 1, self.lo), self.hi + 1):
            if self.dims[d] == 0:
                continue
            images = [self.action(i, d - t) for i, t in enumerate(self.tau_degrees) if d - t >= self.lo]
            r = gfmat.rank(np.hstack(images), self.p) if images else 0
            if r != self.dims[d]:
                raise ModuleStructureError(
                    f"degree {d} is not generated by lower degrees (rank {r} of {self.dims[d]}); "
                    f"finite generation below {self.fg_bound} is refuted"
                )

    def to_spec(self) -> GradedModuleSpec:
        return GradedModuleSpec(
            p=self.p,
            tau_degrees=list(self.tau_degrees),
            window=(self.lo, self.hi),
            dims=dict(self.dims),
            actions=[{d: m.tolist() for d, m in mats.items() if m.size} for mats in self._actions],
            fg_bound=self.fg_bound,
            name=self.name,
        )

    def __repr__(self):
        return f"GradedModule({self.name or '?'}, s={self.s}, window={self.window})"


# =====================================================
# PRESETS
# =====================================================

def free_module(p: int, tau_degrees: Sequence[int], generator_degrees: Sequence[int], top: int,
                truncation: Optional[Sequence[int]] = None, name: str = "") -> GradedModule:
    """Free module over k[tau]/(tau_i^{n_i}) on generators of the given degrees, cut off at `top`."""
    s = len(tau_degrees)
    trunc = list(truncation) if truncation is not None else [None] * s
    basis: Dict[int, List[tuple]] = defaultdict(list)

    def grow(g: int, i: int, mono: tuple, deg: int):
        if i == s:
            basis[deg].append((g, mono))
            return
        e = 0
        while deg + e * tau_degrees[i] <= top and (trunc[i] is None or e < trunc[i]):
            grow(g, i + 1, mono + (e,), deg + e * tau_degrees[i])
            e += 1

    for g, gd in enumerate(generator_degrees):
        if gd <= top:
            grow(g, 0, (), gd)
    lo = min(min(generator_degrees), 0) if generator_degrees else 0
    index = {d: {b: k for k, b in enumerate(sorted(items))} for d, items in basis.items()}
    dims = {d: len(items) for d, items in index.items()}

    actions = []
    for i, t in enumerate(tau_degrees):
        mats = {}
        for d in range(lo, top - t + 1):
            mat = gfmat.zeros(dims.get(d + t, 0), dims.get(d, 0))
            for (g, mono), col in index.get(d, {}).items():
                raised = mono[:i] + (mono[i] + 1,) + mono[i + 1:]
                row = index.get(d + t, {}).get((g, raised))
                if row is not None:
                    mat[row, col] = 1
            mats[d] = mat
        actions.append(mats)
    fg = max(generator_degrees) if generator_degrees else lo
    return GradedModule(p, tau_degrees, (lo, top), dims, actions, fg_bound=fg, name=name)


def polynomial_module(p: int, tau_degrees: Sequence[int], top: int) -> GradedModule:
    label = ",".join(f"t{t}" for t in tau_degrees)
    return free_module(p, tau_degrees, [0], top, name=f"k[{label}]")


def exterior_polynomial_module(p: int, xi_degree: int, tau_degree: int, top: int) -> GradedModule:
    """Lambda[xi] (x) k[tau] as a module over k[tau]."""
    return free_module(p, [tau_degree], [0, xi_degree], top, name=f"L[x{xi_degree}]k[t{tau_degree}]")


def truncated_polynomial_module(p: int, tau_degree: int, n: int, top: int) -> GradedModule:
    return free_module(p, [tau_degree], [0], top, truncation=[n], name=f"k[t{tau_degree}]/t^{n}")


def finite_module(p: int, tau_degrees: Sequence[int], dims: Mapping[int, int], top: int) -> GradedModule:
    """Finite-dimensional module with every tau acting as zero."""
    gens = [d for d, k in sorted(dims.items()) for _ in range(k)]
    return free_module(p, tau_degrees, gens, top, truncation=[1] * len(tau_degrees), name="finite")


def semidirect_family_dims(q: int, window: Tuple[int, int]) -> Dict[int, int]:
    """Hilbert function of Lambda[xi_{2q-1}] (x) k[tau_{2q-2}] over the window."""
    x, t = 2 * q - 1, 2 * q - 2
    lo, hi = window
    return {n: int(n >= 0 and n % t == 0) + int(n >= x and (n - x) % t == 0) for n in range(lo, hi + 1)}


def periodicity_actions(table: BettiTable, degree: int) -> Dict[int, np.ndarray]:
    """tau of the given degree acting by identity wherever dims agree, else zero."""
    lo, hi = table.window
    mats = {}
    for d in range(lo, hi - degree + 1):
        a, b = table.dims[d], table.dims[d + degree]
        mats[d] = gfmat.identity(a) if a == b else gfmat.zeros(b, a)
    return mats


def import_from_betti(table: BettiTable, tau_degrees: Sequence[int], actions: Sequence[Mapping[int, np.ndarray]],
                      fg_bound: Optional[int] = None) -> GradedModule:
    return GradedModule(table.p, tau_degrees, table.window, table.dims, actions, fg_bound=fg_bound,
                        name=f"{table.kind}({table.group})")


def module_from_spec(spec: GradedModuleSpec) -> GradedModule:
    params = spec.params
    try:
        if spec.preset == "polynomial":
            m = polynomial_module(spec.p, spec.tau_degrees, params["top"])
        elif spec.preset == "exterior_polynomial":
            m = exterior_polynomial_module(spec.p, params["xi_degree"], params["tau_degree"], params["top"])
        elif spec.preset == "truncated_polynomial":
            m = truncated_polynomial_module(spec.p, params["tau_degree"], params["n"], params["top"])
        elif spec.preset == "finite":
            m = finite_module(spec.p, spec.tau_degrees, spec.dims, params["top"])
        else:
            if spec.window is None:
                raise ParseError("explicit graded module needs a window")
            actions = [{d: np.array(mat, dtype=np.int64) for d, mat in table.items()} for table in spec.actions]
            m = GradedModule(spec.p, spec.tau_degrees, spec.window, spec.dims, actions,
                             fg_bound=spec.fg_bound, name=spec.name)
    except KeyError as e:
        raise ParseError(f"preset {spec.preset} is missing parameter {e}") from e
    if spec.name:
        m.name = spec.name
    return m


def load_graded_module(path: str | Path) -> GradedModule:
    path = Path(path)
    try:
        spec = GradedModuleSpec.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ParseError(f"{path}: {e}") from e
    try:
        return module_from_spec(spec)
    except ModuleStructureError as e:
        raise ParseError(f"{path}: {e}") from e


def hilbert_window(m: GradedModule) -> BettiTable:
    """Degreewise dims after checking centrality and the fg bound."""
    m.check_centrality()
    m.check_fg()
    return BettiTable(kind="hilbert", group=m.name, p=m.p, window=m.window, dims=dict(m.dims))


# =====================================================
# KOSZUL COMPLEXES
# =====================================================

def _subsets(s: int, j: int) -> List[tuple]:
    return list(itertools.combinations(range(s), j))


def _offset(m: GradedModule, exps: Sequence[int], subset: tuple) -> int:
    return sum(exps[i] * m.tau_degrees[i] for i in subset)


class _Koszul:
    """Degree-d slice of the Koszul complex K_{exps} (x) M.

    C^j = sum over |S| = j of M_{d + sum_{i in S} e_i |tau_i|}. With
    drop_zero the j = 0 term is removed and indices shift down by one.
    """

    def __init__(self, m: GradedModule, exps: Sequence[int], d: int, drop_zero: bool = False):
        self.m = m
        self.exps = tuple(exps)
        self.d = d
        self.first = 1 if drop_zero else 0
        s = m.s
        self.terms = [_subsets(s, j) for j in range(self.first, s + 1)]
        self.sizes = [[m.dim(d + _offset(m, exps, S)) for S in terms] for terms in self.terms]
        self.diffs = [self._differential(k) for k in range(len(self.terms) - 1)]

    def dim(self, k: int) -> int:
        return sum(self.sizes[k])

    def _differential(self, k: int) -> np.ndarray:
        m = self.m
        src, dst = self.terms[k], self.terms[k + 1]
        mat = gfmat.zeros(self.dim(k + 1), self.dim(k))
        col = 0
        for a, S in enumerate(src):
            width = self.sizes[k][a]
            row = 0
            for b, T in enumerate(dst):
                height = self.sizes[k + 1][b]
                extra = set(T) - set(S)
                if len(extra) == 1 and set(S) <= set(T):
                    i = extra.pop()
                    sign = (-1) ** sum(1 for x in S if x < i)
                    exps = [0] * m.s
                    exps[i] = self.exps[i]
                    block = m.monomial(exps, self.d + _offset(m, self.exps, S))
                    mat[row:row + height, col:col + width] = (sign * block) % m.p
                row += height
            col += width
        return mat

    def cycles(self, k: int) -> np.ndarray:
        if k < len(self.diffs):
            return gfmat.kernel_basis(self.diffs[k], self.m.p)
        return gfmat.identity(self.dim(k))

    def boundaries(self, k: int) -> np.ndarray:
        if k == 0:
            return gfmat.zeros(0, self.dim(0))
        return gfmat.column_space(self.diffs[k - 1], self.m.p)

    def cohomology_dims(self) -> List[int]:
        return [self.cycles(k).shape[0] - self.boundaries(k).shape[0] for k in range(len(self.terms))]

    def transition(self, k: int, target: "_Koszul") -> np.ndarray:
        """Chain map to a complex with larger exponents: prod tau_i^{n'_i - n_i} on each summand."""
        m = self.m
        mat = gfmat.zeros(target.dim(k), self.dim(k))
        at_row = at_col = 0
        for a, S in enumerate(self.terms[k]):
            exps = [0] * m.s
            for i in S:
                exps[i] = target.exps[i] - self.exps[i]
            block = m.monomial(exps, self.d + _offset(m, self.exps, S))
            h, w = target.sizes[k][a], self.sizes[k][a]
            mat[at_row:at_row + h, at_col:at_col + w] = block
            at_row += h
            at_col += w
        return mat


def _induced_is_iso(src: _Koszul, dst: _Koszul, k: int) -> bool:
    p = src.m.p
    h_src = src.cycles(k).shape[0] - src.boundaries(k).shape[0]
    bounds = dst.boundaries(k)
    h_dst = dst.cycles(k).shape[0] - bounds.shape[0]
    if h_src != h_dst:
        return False
    if h_src == 0:
        return True
    images = gfmat.matmul(src.transition(k, dst), src.cycles(k).T, p).T
    induced = gfmat.rank(np.vstack([bounds, images]), p) - bounds.shape[0]
    return induced == h_src


def _start_exponent(m: GradedModule, d: int, base: Sequence[int]) -> int:
    """First n at which every tau-shifted term sits at or above the generation bound."""
    floor = max(m.lo, m.fg_bound)
    n = 1
    for i, b in enumerate(base):
        step = b * m.tau_degrees[i]
        n = max(n, math.ceil((floor - d) / step))
    return n


def _stable_dims(m: GradedModule, d: int, base: Sequence[int], drop_zero: bool, budget: Optional[int]) -> List[int]:
    budget = max(20, 2 * m.fg_bound) if budget is None else budget
    start = _start_exponent(m, d, base)
    cache: Dict[int, _Koszul] = {}

    def complex_at(n: int) -> _Koszul:
        if n not in cache:
            cache[n] = _Koszul(m, [n * b for b in base], d, drop_zero)
        return cache[n]

    for n in range(start, start + budget):
        try:
            a, b, c = complex_at(n), complex_at(n + 1), complex_at(n + 2)
        except WindowTooSmallError as e:
            raise WindowTooSmallError(e.degree, e.top, f"internal degree {d} not stable by exponent {n}") from e
        stable = all(_induced_is_iso(a, b, k) and _induced_is_iso(b, c, k) for k in range(len(a.terms)))
        if stable:
            logger.debug("degree %d stable at exponent %d", d, n)
            return a.cohomology_dims()
    raise BudgetExceededError(
        f"cohomology in degree {d} did not stabilize",
        {"degree": d, "start": start, "budget": budget},
    )


def _table(kind: str, m: GradedModule, window: Tuple[int, int], rows: Dict[int, List[int]]) -> GradedBettiTable:
    count = len(next(iter(rows.values()))) if rows else 0
    dims = {j: {d: values[j] for d, values in rows.items()} for j in range(count)}
    return GradedBettiTable(kind=kind, p=m.p, s=m.s, window=window, dims=dims)


def unstable_koszul_cohomology(m: GradedModule, exponents: Sequence[int], window: Tuple[int, int]) -> GradedBettiTable:
    if len(exponents) != m.s or any(e < 1 for e in exponents):
        raise ValueError(f"need {m.s} exponents >= 1, got {exponents}")
    lo, hi = window
    rows = {d: _Koszul(m, exponents, d).cohomology_dims() for d in range(lo, hi + 1)}
    return _table("koszul", m, window, rows)


def local_cohomology(m: GradedModule, window: Tuple[int, int], base: Optional[Sequence[int]] = None,
                     budget: Optional[int] = None) -> GradedBettiTable:
    base = [1] * m.s if base is None else list(base)
    lo, hi = window
    rows = {d: _stable_dims(m, d, base, False, budget) for d in range(lo, hi + 1)}
    return _table("local", m, window, rows)


def cech_cohomology(m: GradedModule, window: Tuple[int, int], budget: Optional[int] = None) -> GradedBettiTable:
    lo, hi = window
    if m.s == 0:
        return GradedBettiTable(kind="cech", p=m.p, s=0, window=window, dims={})
    rows = {d: _stable_dims(m, d, [1] * m.s, True, budget) for d in range(lo, hi + 1)}
    return _table("cech", m, window, rows)


# =====================================================
# LOCALIZATION AND CHECKS
# =====================================================

def telescope_localization(m: GradedModule, window: Tuple[int, int]) -> BettiTable:
    """dim M[1/tau]_d: the stable dimension of M_d -> M_{d+t} -> ... (s = 1)."""
    if m.s != 1:
        raise ValueError(f"telescope localization needs exactly one variable, got {m.s}")
    t = m.tau_degrees[0]
    lo, hi = window
    dims = {}
    for d in range(lo, hi + 1):
        k0 = max(0, math.ceil((m.lo - d) / t))
        chain = [d + k * t for k in range(k0, (m.hi - d) // t + 1)]
        isos = [m.dim(a) == m.dim(a + t) and gfmat.rank(m.action(0, a), m.p) == m.dim(a) for a in chain[:-1]]
        # last two steps of the chain must be isomorphisms
        if len(isos) < 2 or not (isos[-1] and isos[-2]):
            raise WindowTooSmallError(m.hi + t, m.hi, f"telescope from degree {d} has not stabilized")
        dims[d] = m.dim(chain[-1])
    return BettiTable(kind="telescope", group=m.name, p=m.p, window=window, dims=dims)


def torsion_submodule_dims(m: GradedModule, power: int, window: Tuple[int, int]) -> Dict[int, int]:
    """dim {x in M_d : tau_i^power x = 0 for all i}."""
    lo, hi = window
    out = {}
    for d in range(lo, hi + 1):
        if m.dim(d) == 0:
            out[d] = 0
            continue
        blocks = []
        for i in range(m.s):
            exps = [0] * m.s
            exps[i] = power
            blocks.append(m.monomial(exps, d))
        out[d] = gfmat.kernel_basis(np.vstack(blocks), m.p).shape[0] if blocks else m.dim(d)
    return out


def long_exact_sequence_check(m: GradedModule, window: Tuple[int, int]) -> List[int]:
    """Degrees where 0 -> H^0 -> M -> CH^0 -> H^1 -> 0, CH^j = H^{j+1} fails."""
    local = local_cohomology(m, window)
    cech = cech_cohomology(m, window)
    bad = []
    lo, hi = window
    for d in range(lo, hi + 1):
        ok = m.s == 0 or m.dim(d) - local.dim(0, d) + local.dim(1, d) == cech.dim(0, d)
        ok = ok and all(cech.dim(j, d) == local.dim(j + 1, d) for j in range(1, m.s))
        if not ok:
            bad.append(d)
    return bad


def radical_invariance_check(m: GradedModule, exponents: Sequence[int] | int, window: Tuple[int, int]) -> RadicalInvarianceReport:
    if isinstance(exponents, int):
        exponents = [exponents] * m.s
    base = local_cohomology(m, window)
    powered = local_cohomology(m, window, base=exponents)
    lo, hi = window
    mismatches = [(j, d) for j in base.dims for d in range(lo, hi + 1) if base.dim(j, d) != powered.dim(j, d)]
    return RadicalInvarianceReport(exponent=max(exponents) if exponents else 1, base=base, powered=powered,
                                   mismatches=mismatches)
