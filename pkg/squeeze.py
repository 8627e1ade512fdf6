"""Squeezed resolutions and the dimensions they compute.

The left trace iterates projective cover -> kernel -> sigma-submodule; its
homology gives the loop-space homology dims. The right trace iterates
injective hull -> cokernel -> sigma-quotient. Splicing both at degree zero
gives the Tate complex.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

import config
import gfmat
from errors import ConsistencyError, InsufficientTraceError
from kgmod import (
    KGModule,
    ModuleMap,
    coinvariant_dim,
    fixed_points,
    injective_hull,
    is_isomorphic,
    projective_cover,
    quotient_module,
    radical_of_module,
    regular_module,
    restrict_to_subspace,
    sigma_quotient,
    sigma_submodule,
    trivial_module,
)
from permgrp import Group, cosets, is_p_nilpotent, o_p_subgroup
from records import (
    AndersonTateReport,
    BettiTable,
    GroupSpec,
    LeftStepRecord,
    LeftTraceRecord,
    NormRecord,
    RightStepRecord,
    RightTraceRecord,
)

logger = logging.getLogger(__name__)


# =====================================================
# CHAIN COMPLEXES
# =====================================================

@dataclass
class ChainComplex:
    """Homologically graded: differentials[i] maps terms[i] -> terms[i-1].

    Missing terms are zero.
    """

    p: int
    terms: Dict[int, KGModule] = field(default_factory=dict)
    differentials: Dict[int, ModuleMap] = field(default_factory=dict)

    def dim(self, i: int) -> int:
        t = self.terms.get(i)
        return t.dim if t is not None else 0

    def _rank(self, i: int) -> int:
        d = self.differentials.get(i)
        if d is None:
            if self.dim(i) and self.dim(i - 1):
                raise InsufficientTraceError(required_length=abs(i) + 1, actual_length=abs(i))
            return 0
        return d.rank()

    def check_d_squared(self) -> None:
        for i, d in self.differentials.items():
            nxt = self.differentials.get(i - 1)
            if nxt is None:
                continue
            if gfmat.matmul(nxt.matrix, d.matrix, self.p).any():
                raise ConsistencyError(f"d_{i - 1} d_{i} != 0")

    def homology_dim(self, i: int) -> int:
        return self.dim(i) - self._rank(i) - self._rank(i + 1)

    def homology_dims(self, lo: int, hi: int) -> Dict[int, int]:
        return {i: self.homology_dim(i) for i in range(lo, hi + 1)}


# =====================================================
# LEFT SQUEEZED RESOLUTION
# =====================================================

@dataclass(frozen=True, eq=False)
class LeftStep:
    index: int
    a: KGModule
    cover: ModuleMap            # P_i -> A_i
    b: KGModule                 # Omega A_i inside P_i
    b_into_p: ModuleMap
    a_next: KGModule            # (B_i)_sigma
    a_next_into_b: ModuleMap

    @property
    def projective(self) -> KGModule:
        return self.cover.source

    @property
    def a_next_into_p(self) -> ModuleMap:
        return self.b_into_p.compose(self.a_next_into_b)


@dataclass(frozen=True, eq=False)
class LeftSqueezedTrace:
    group: Group
    p: int
    seed: int
    module_id: str
    steps: tuple

    @property
    def length(self) -> int:
        """Largest i with P_i computed."""
        return len(self.steps) - 1

    @property
    def terminated(self) -> bool:
        return self.steps[-1].a_next.dim == 0

    def differential(self, i: int) -> np.ndarray:
        """d_i: P_i -> P_{i-1} for 1 <= i <= length."""
        return self.steps[i - 1].a_next_into_p.compose(self.steps[i].cover).matrix

    def complex(self) -> ChainComplex:
        cx = ChainComplex(self.p)
        for st in self.steps:
            cx.terms[st.index] = st.projective
        for i in range(1, len(self.steps)):
            cx.differentials[i] = ModuleMap(self.steps[i].projective, self.steps[i - 1].projective,
                                            self.differential(i), validate=False)
        return cx

    def check(self) -> None:
        """Cover contract and d^2 = 0 along the whole trace."""
        for st in self.steps:
            if not st.cover.is_surjective():
                raise ConsistencyError(f"step {st.index}: cover is not surjective")
            rad = radical_of_module(st.projective, self.seed)
            if not gfmat.subspace_contains(rad, st.cover.kernel_basis(), self.p):
                raise ConsistencyError(f"step {st.index}: cover kernel not inside the radical")
        self.complex().check_d_squared()

    def to_record(self, spec: GroupSpec) -> LeftTraceRecord:
        steps = [
            LeftStepRecord(
                cover_source=st.projective.to_record(),
                cover_matrix=st.cover.matrix.tolist(),
                kernel_basis=st.b_into_p.matrix.T.tolist(),
                a_next_basis=st.a_next_into_b.matrix.T.tolist(),
            )
            for st in self.steps
        ]
        return LeftTraceRecord(version=config.CODE_VERSION, group=spec, p=self.p, seed=self.seed,
                               module_id=self.module_id, a0=self.steps[0].a.to_record(), steps=steps)


def left_squeezed_resolution(group: Group, p: int, a: Optional[KGModule] = None, length: int = 8,
                             seed: int = 0, module_id: str = "k") -> LeftSqueezedTrace:
    """Compute P_0 .. P_length for A_0 = a (trivial module by default)."""
    current = a if a is not None else trivial_module(group, p)
    steps = []
    for i in range(length + 1):
        cover_module, cover = projective_cover(current, seed)
        b, b_into_p = restrict_to_subspace(cover_module, cover.kernel_basis())
        a_next, a_next_into_b = sigma_submodule(b)
        steps.append(LeftStep(i, current, cover, b, b_into_p, a_next, a_next_into_b))
        logger.debug("left step %d: P=%d B=%d A_next=%d", i, cover_module.dim, b.dim, a_next.dim)
        current = a_next
    return LeftSqueezedTrace(group, p, seed, module_id, tuple(steps))


def left_trace_from_record(group: Group, record: LeftTraceRecord) -> LeftSqueezedTrace:
    p = record.p
    current = KGModule.from_record(group, record.a0)
    steps = []
    for i, sr in enumerate(record.steps):
        proj = KGModule.from_record(group, sr.cover_source)
        cover = ModuleMap(proj, current, np.array(sr.cover_matrix, dtype=np.int64))
        b, b_into_p = restrict_to_subspace(proj, sr.kernel_basis)
        if gfmat.matmul(cover.matrix, b_into_p.matrix, p).any():
            raise ConsistencyError(f"stored step {i}: kernel basis is not in the kernel")
        a_next, a_next_into_b = restrict_to_subspace(b, sr.a_next_basis)
        steps.append(LeftStep(i, current, cover, b, b_into_p, a_next, a_next_into_b))
        current = a_next
    trace = LeftSqueezedTrace(group, p, record.seed, record.module_id, tuple(steps))
    trace.check()
    return trace


def _require_length(trace_length: int, terminated: bool, needed: int) -> None:
    if trace_length < needed and not terminated:
        raise InsufficientTraceError(required_length=needed, actual_length=trace_length)


def squeezed_homology(trace: LeftSqueezedTrace, window: Tuple[int, int], group_name: str = "") -> BettiTable:
    """H^Omega_n for n in the window (window must start at 0 or above)."""
    lo, hi = window
    if lo < 0:
        raise ValueError("loop space homology lives in non-negative degrees")
    _require_length(trace.length, trace.terminated, hi + 1)
    cx = trace.complex()
    dims = {}
    for n in range(lo, hi + 1):
        if n > trace.length:
            dims[n] = 0
            continue
        dims[n] = cx.homology_dim(n)
        st = trace.steps[n]
        # ker d_n = B_n (P_0 for n = 0) and im d_{n+1} = A_{n+1}
        kernel = st.projective.dim if n == 0 else st.b.dim
        expected = kernel - st.a_next.dim
        if dims[n] != expected:
            raise ConsistencyError(f"H_{n}: complex gives {dims[n]}, module dimensions give {expected}")
    return BettiTable(kind="loops", group=group_name or trace.group.name, p=trace.p, seed=trace.seed,
                      window=(lo, hi), dims=dims)


# =====================================================
# RIGHT SQUEEZED RESOLUTION
# =====================================================

@dataclass(frozen=True, eq=False)
class RightStep:
    index: int                  # 0, -1, -2, ...
    c: KGModule
    hull: ModuleMap             # C_i -> I_i
    d: KGModule                 # Omega^-1 C_i
    d_proj: ModuleMap           # I_i -> D_i
    c_next: KGModule            # D_i^sigma
    c_next_proj: ModuleMap      # D_i -> C_{i-1}

    @property
    def injective(self) -> KGModule:
        return self.hull.target

    @property
    def to_c_next(self) -> ModuleMap:
        return self.c_next_proj.compose(self.d_proj)


@dataclass(frozen=True, eq=False)
class RightSqueezedTrace:
    group: Group
    p: int
    seed: int
    module_id: str
    steps: tuple

    @property
    def length(self) -> int:
        """Largest L with I_{-L} computed."""
        return len(self.steps) - 1

    @property
    def terminated(self) -> bool:
        return self.steps[-1].c_next.dim == 0

    def differential(self, k: int) -> np.ndarray:
        """delta: I_{-k} -> I_{-k-1} for 0 <= k < length."""
        return self.steps[k + 1].hull.compose(self.steps[k].to_c_next).matrix

    def check(self) -> None:
        for st in self.steps:
            if not st.hull.is_injective():
                raise ConsistencyError(f"step {st.index}: hull is not injective")
        for k in range(len(self.steps) - 2):
            if gfmat.matmul(self.differential(k + 1), self.differential(k), self.p).any():
                raise ConsistencyError(f"right trace: delta^2 != 0 at step {-k}")

    def to_record(self, spec: GroupSpec) -> RightTraceRecord:
        steps = [
            RightStepRecord(
                hull_target=st.injective.to_record(),
                hull_matrix=st.hull.matrix.tolist(),
                fixed_basis=fixed_points(st.d, o_p_subgroup(self.group, self.p).generators).tolist(),
            )
            for st in self.steps
        ]
        return RightTraceRecord(version=config.CODE_VERSION, group=spec, p=self.p, seed=self.seed,
                                module_id=self.module_id, c0=self.steps[0].c.to_record(), steps=steps)


def right_squeezed_resolution(group: Group, p: int, c: Optional[KGModule] = None, length: int = 8,
                              seed: int = 0, module_id: str = "k") -> RightSqueezedTrace:
    """Compute I_0 .. I_{-length} for C_0 = c (trivial module by default)."""
    current = c if c is not None else trivial_module(group, p)
    steps = []
    for k in range(length + 1):
        hull_module, hull = injective_hull(current, seed)
        d, d_proj = quotient_module(hull_module, hull.image_basis())
        c_next, c_next_proj = sigma_quotient(d)
        steps.append(RightStep(-k, current, hull, d, d_proj, c_next, c_next_proj))
        logger.debug("right step %d: I=%d D=%d C_next=%d", -k, hull_module.dim, d.dim, c_next.dim)
        current = c_next
    return RightSqueezedTrace(group, p, seed, module_id, tuple(steps))


def right_trace_from_record(group: Group, record: RightTraceRecord) -> RightSqueezedTrace:
    current = KGModule.from_record(group, record.c0)
    steps = []
    for k, sr in enumerate(record.steps):
        inj = KGModule.from_record(group, sr.hull_target)
        hull = ModuleMap(current, inj, np.array(sr.hull_matrix, dtype=np.int64))
        d, d_proj = quotient_module(inj, hull.image_basis())
        c_next, c_next_proj = quotient_module(d, sr.fixed_basis)
        steps.append(RightStep(-k, current, hull, d, d_proj, c_next, c_next_proj))
        current = c_next
    trace = RightSqueezedTrace(group, record.p, record.seed, record.module_id, tuple(steps))
    trace.check()
    return trace


def squeezed_cohomology(trace: RightSqueezedTrace, window: Tuple[int, int], group_name: str = "") -> BettiTable:
    """H_Omega^n for n in the window, n >= 0."""
    lo, hi = window
    if lo < 0:
        raise ValueError("loop space cohomology lives in non-negative degrees")
    _require_length(trace.length, trace.terminated, hi)
    p = trace.p
    dims = {}
    for n in range(lo, hi + 1):
        if n > trace.length:
            dims[n] = 0
            continue
        st = trace.steps[n]
        # hulls are injective, so ker delta = ker(I -> C_next)
        kernel = st.injective.dim - st.to_c_next.rank()
        incoming = gfmat.rank(trace.differential(n - 1), p) if n >= 1 else 0
        dims[n] = kernel - incoming
        fixed = st.d.dim - st.c_next.dim
        expected = st.c.dim + fixed if n == 0 else fixed
        if dims[n] != expected:
            raise ConsistencyError(f"H^{n}: complex gives {dims[n]}, module dimensions give {expected}")
    return BettiTable(kind="cohomology", group=group_name or trace.group.name, p=p, seed=trace.seed,
                      window=(lo, hi), dims=dims)


# =====================================================
# TATE SPLICE
# =====================================================

def tate_splice(left: LeftSqueezedTrace, right: RightSqueezedTrace, seed: int = 0,
                phi: Optional[ModuleMap] = None) -> ChainComplex:
    """T_i = P_i for i >= 1 and T_i = I_{i-1} for i <= 0.

    The degree-one differential is P_1 -> P_0 -> I_0 -> I_{-1}, the middle
    arrow phi. Without phi an isomorphism is found by search.
    """
    p = left.p
    p0, i0 = left.steps[0].projective, right.steps[0].injective
    if phi is None:
        found = is_isomorphic(p0, i0, seed=seed)
        if not found.isomorphic:
            raise ConsistencyError("no isomorphism P_0 -> I_0 found for the Tate splice")
        phi = found.witness
    elif phi.source is not p0 or phi.target is not i0 or phi.rank() != p0.dim:
        raise ConsistencyError(f"splice map of rank {phi.rank()} is not an isomorphism P_0 -> I_0")
    phi = phi.matrix

    cx = ChainComplex(p)
    for st in left.steps[1:]:
        cx.terms[st.index] = st.projective
    for k, st in enumerate(right.steps[1:], start=1):
        cx.terms[1 - k] = st.injective

    for i in range(2, left.length + 1):
        cx.differentials[i] = ModuleMap(cx.terms[i], cx.terms[i - 1], left.differential(i), validate=False)
    if left.length >= 1 and right.length >= 1:
        d1 = gfmat.matmul(gfmat.matmul(right.differential(0), phi, p), left.differential(1), p)
        cx.differentials[1] = ModuleMap(cx.terms[1], cx.terms[0], d1, validate=False)
    for k in range(1, right.length):
        i = 1 - k
        cx.differentials[i] = ModuleMap(cx.terms[i], cx.terms[i - 1], right.differential(k), validate=False)
    cx.check_d_squared()
    return cx


def tate_lengths(window: Tuple[int, int]) -> Tuple[int, int]:
    """Left and right trace lengths needed for a Tate window."""
    lo, hi = window
    return max(hi + 1, 1), max(2 - lo, 1)


def tate_squeezed_homology(group: Group, p: int, window: Tuple[int, int], seed: int = 0,
                           left: Optional[LeftSqueezedTrace] = None,
                           right: Optional[RightSqueezedTrace] = None,
                           phi: Optional[ModuleMap] = None) -> BettiTable:
    lo, hi = window
    if lo > hi:
        raise ValueError(f"empty window {window}")
    left_len, right_len = tate_lengths(window)
    if left is None or left.length < left_len:
        left = left_squeezed_resolution(group, p, length=left_len, seed=seed)
    if right is None or right.length < right_len:
        right = right_squeezed_resolution(group, p, length=right_len, seed=seed)
    cx = tate_splice(left, right, seed, phi=phi)
    return BettiTable(kind="tate", group=group.name, p=p, seed=seed, window=window,
                      dims=cx.homology_dims(lo, hi))


# =====================================================
# NORM MAP
# =====================================================

@dataclass(frozen=True)
class NormResult:
    """Map from O^p-fixed vectors of kG to kG / [O^p(G), kG].

    Source basis: coset sums of O^p(G); target basis: classes of coset
    representatives. The map is |O^p(G)| times the identity.
    """

    matrix: gfmat.FpMatrix
    verdict: str
    p_nilpotent: bool
    op_order: int

    @property
    def consistent(self) -> bool:
        return self.verdict == ("iso" if self.p_nilpotent else "zero")

    def to_record(self, group_name: str = "") -> NormRecord:
        return NormRecord(group=group_name, p=self.matrix.p, verdict=self.verdict, p_nilpotent=self.p_nilpotent,
                          consistent=self.consistent, op_order=self.op_order, matrix=self.matrix.tolist())


def norm_map(group: Group, p: int) -> NormResult:
    reg = regular_module(group, p)
    op = o_p_subgroup(group, p)
    classes = cosets(op)
    n = group.order

    fixed = np.zeros((len(classes), n), dtype=np.int64)
    for c, members in enumerate(classes):
        fixed[c, members] = 1
    if gfmat.rank(fixed_points(reg, op.generators), p) != len(classes):
        raise ConsistencyError("O^p-fixed points of kG are not spanned by coset sums")

    bracket, incl = sigma_submodule(reg)
    q, _ = gfmat.quotient_projection(incl.matrix.T, n, p)
    reps = [members[0] for members in classes]
    if q.shape[0] != len(classes):
        raise ConsistencyError("coinvariants of kG do not match the coset count")
    matrix = gfmat.solve_matrix(q[:, reps], gfmat.matmul(q, fixed.T, p), p)
    if matrix is None:
        raise ConsistencyError("coset representatives do not span the coinvariants")

    r = gfmat.rank(matrix, p)
    verdict = "iso" if r == len(classes) else "zero" if r == 0 else "other"
    result = NormResult(gfmat.FpMatrix(matrix, p), verdict, is_p_nilpotent(group, p), op.order)
    if verdict == "other":
        logger.error("norm map for %r at p=%d has rank %d of %d", group, p, r, len(classes))
    elif not result.consistent:
        logger.error("norm verdict %s contradicts p-nilpotence=%s", verdict, result.p_nilpotent)
    return result


def classical_norm_verdict(group: Group, p: int) -> str:
    """Norm C_*(BG) -> C^*(BG) in degree 0 is multiplication by |G|."""
    return "iso" if group.order % p else "zero"


# =====================================================
# CLASSICAL TATE COHOMOLOGY
# =====================================================

def classical_tate_dimensions(group: Group, p: int, window: Tuple[int, int], seed: int = 0) -> BettiTable:
    """dim H^n(G; k) for n in the window, from a minimal complete resolution.

    Q_n = P(Omega^n k) for n >= 0 and Q_{-j} = I(Omega^{1-j} k) for j >= 1;
    the minimal differentials vanish after Hom(-, k).
    """
    lo, hi = window
    dims = {n: 0 for n in range(lo, hi + 1)}
    if group.order % p:
        logger.info("p=%d does not divide |G|=%d: Tate cohomology is zero", p, group.order)
        return BettiTable(kind="tate_classical", group=group.name, p=p, seed=seed, window=window, dims=dims)

    m = trivial_module(group, p)
    for n in range(0, hi + 1):
        cover, pi = projective_cover(m, seed)
        if n >= lo:
            dims[n] = coinvariant_dim(cover)
        m = restrict_to_subspace(cover, pi.kernel_basis())[0]

    m = trivial_module(group, p)
    for n in range(-1, lo - 1, -1):
        hull, iota = injective_hull(m, seed)
        if n <= hi:
            dims[n] = coinvariant_dim(hull)
        m = quotient_module(hull, iota.image_basis())[0]
    return BettiTable(kind="tate_classical", group=group.name, p=p, seed=seed, window=window, dims=dims)


# =====================================================
# DRIVERS AND CHECKS
# =====================================================

def loops_table(group: Group, p: int, window: Tuple[int, int], seed: int = 0) -> BettiTable:
    trace = left_squeezed_resolution(group, p, length=window[1] + 1, seed=seed)
    return squeezed_homology(trace, window)


def cohomology_table(group: Group, p: int, window: Tuple[int, int], seed: int = 0) -> BettiTable:
    trace = right_squeezed_resolution(group, p, length=window[1], seed=seed)
    return squeezed_cohomology(trace, window)


def anderson_tate_check(group: Group, p: int, window: Tuple[int, int], seed: int = 0) -> AndersonTateReport:
    """Compare Tate squeezed homology with the prediction from H^Omega_*.

    Zero for p-nilpotent G; otherwise H_n for n >= 2, H_{1-n} for n <= -1
    and |G/O^p(G)| + dim H_1 in degrees 0 and 1.
    """
    lo, hi = window
    nilpotent = is_p_nilpotent(group, p)
    quotient_order = o_p_subgroup(group, p).index
    top = max(hi, 1 - lo, 1)
    loops = loops_table(group, p, (0, top), seed)
    h1 = loops.dim(1)

    predicted = {}
    for n in range(lo, hi + 1):
        if nilpotent:
            predicted[n] = 0
        elif n >= 2:
            predicted[n] = loops.dim(n)
        elif n <= -1:
            predicted[n] = loops.dim(1 - n)
        else:
            predicted[n] = quotient_order + h1
    computed = tate_squeezed_homology(group, p, window, seed).dims
    mismatches = [n for n in range(lo, hi + 1) if predicted[n] != computed[n]]
    if mismatches:
        logger.warning("Tate prediction mismatches for %r at p=%d in degrees %s", group, p, mismatches)
    return AndersonTateReport(group=group.name, p=p, window=window, p_nilpotent=nilpotent,
                              p_quotient_order=quotient_order, h1=h1, predicted=predicted,
                              computed=computed, mismatches=mismatches)


def projective_start_check(group: Group, p: int, seed: int = 0) -> bool:
    """P(k)_sigma and (Omega k)_sigma coincide as subspaces of P(k).

    So starting the left trace at N_0 = P(k) instead of Omega k gives the
    same A_1.
    """
    cover_module, cover = projective_cover(trivial_module(group, p), seed)
    _, whole = sigma_submodule(cover_module)
    b, b_into_p = restrict_to_subspace(cover_module, cover.kernel_basis())
    _, inner = sigma_submodule(b)
    lhs = whole.matrix.T
    rhs = gfmat.matmul(b_into_p.matrix, inner.matrix, p).T
    return gfmat.subspace_contains(lhs, rhs, p) and gfmat.subspace_contains(rhs, lhs, p)


def kunneth_prediction(first: BettiTable, second: BettiTable, window: Tuple[int, int],
                       group_name: str = "") -> BettiTable:
    """Loop space homology of a product: convolution of the factor tables."""
    lo, hi = window
    if first.window[0] > 0 or second.window[0] > 0 or min(first.window[1], second.window[1]) < hi:
        raise InsufficientTraceError(required_length=hi, actual_length=min(first.window[1], second.window[1]))
    dims = {n: sum(first.dim(i) * second.dim(n - i) for i in range(0, n + 1)) for n in range(lo, hi + 1)}
    return BettiTable(kind="loops", group=group_name, p=first.p, seed=first.seed, window=window, dims=dims)
