"""Finite-dimensional kG-modules over F_p.

A module is given by the matrices of the group generators acting on column
vectors. A map f: M -> N is a dim(N) x dim(M) matrix with
f rho_M(g) = rho_N(g) f. Subspaces are row-basis matrices as in gfmat.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix

import config
import gfmat
from errors import BudgetExceededError, ConsistencyError, ModuleStructureError
from permgrp import Group, o_p_subgroup
from records import ModuleRecord

logger = logging.getLogger(__name__)


# =====================================================
# MODULES AND MAPS
# =====================================================

class KGModule:
    def __init__(self, group: Group, p: int, dim: int, gen_actions: Sequence, name: str = "", validate: bool = True):
        self.group = group
        self.p = gfmat.check_modulus(p)
        self.dim = int(dim)
        self.name = name
        if len(gen_actions) != len(group.generators):
            raise ModuleStructureError(
                f"{len(gen_actions)} action matrices for {len(group.generators)} generators"
            )
        mats = []
        for k, a in enumerate(gen_actions):
            arr = gfmat.mod_p(a, self.p)
            if arr.size == 0 and self.dim == 0:
                arr = gfmat.zeros(0, 0)
            if arr.shape != (self.dim, self.dim):
                raise ModuleStructureError(
                    f"generator {k}: matrix of shape {arr.shape}, expected {(self.dim, self.dim)}"
                )
            arr.setflags(write=False)
            mats.append(arr)
        self.gen_actions = tuple(mats)
        if validate:
            self.check_homomorphism()

    @cached_property
    def element_actions(self) -> np.ndarray:
        """Array of shape (|G|, dim, dim); entry i is rho(elements[i])."""
        g = self.group
        where = {w: i for i, w in enumerate(g.words)}
        stack = np.empty((g.order, self.dim, self.dim), dtype=np.int64)
        for i in sorted(range(g.order), key=lambda i: len(g.words[i])):
            w = g.words[i]
            if not w:
                stack[i] = gfmat.identity(self.dim)
            else:
                stack[i] = gfmat.matmul(stack[where[w[:-1]]], self.gen_actions[w[-1]], self.p)
        stack.setflags(write=False)
        return stack

    def check_homomorphism(self) -> None:
        """rho(x s) = rho(x) rho(s) for every element x and generator s."""
        stack = self.element_actions
        table = self.group.mult_table
        for k, s in enumerate(self.group.generator_indices):
            lhs = stack[table[:, s]]
            rhs = (stack @ self.gen_actions[k]) % self.p
            if not np.array_equal(lhs, rhs):
                raise ModuleStructureError(f"generator actions do not define a representation of {self.group!r}")

    def action(self, i: int) -> np.ndarray:
        return self.element_actions[i]

    def act(self, x) -> np.ndarray:
        """Matrix of the group algebra element x (coefficients per element)."""
        x = np.asarray(x, dtype=np.int64) % self.p
        if self.dim == 0:
            return gfmat.zeros(0, 0)
        return np.tensordot(x, self.element_actions, axes=(0, 0)) % self.p

    def to_record(self) -> ModuleRecord:
        return ModuleRecord(
            version=config.CODE_VERSION,
            p=self.p,
            dim=self.dim,
            gen_actions=[a.tolist() for a in self.gen_actions],
            name=self.name,
        )

    @classmethod
    def from_record(cls, group: Group, record: ModuleRecord) -> "KGModule":
        actions = [np.array(a, dtype=np.int64).reshape(record.dim, record.dim) for a in record.gen_actions]
        return cls(group, record.p, record.dim, actions, name=record.name)

    def __repr__(self):
        return f"KGModule({self.name or '?'}, dim={self.dim}, p={self.p})"


class ModuleMap:
    def __init__(self, source: KGModule, target: KGModule, matrix, validate: bool = True):
        if source.group is not target.group or source.p != target.p:
            raise ModuleStructureError("map between modules for different groups or fields")
        self.source = source
        self.target = target
        arr = np.asarray(matrix, dtype=np.int64) % source.p
        if arr.size == 0:
            arr = gfmat.zeros(target.dim, source.dim)
        if arr.shape != (target.dim, source.dim):
            raise ModuleStructureError(f"map matrix of shape {arr.shape}, expected {(target.dim, source.dim)}")
        arr.setflags(write=False)
        self.matrix = arr
        if validate:
            p = source.p
            for a, b in zip(source.gen_actions, target.gen_actions):
                if not np.array_equal((arr @ a) % p, (b @ arr) % p):
                    raise ModuleStructureError("matrix does not commute with the group action")

    @property
    def p(self) -> int:
        return self.source.p

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self o other."""
        if other.target is not self.source:
            raise ModuleStructureError("maps are not composable")
        return ModuleMap(other.source, self.target, gfmat.matmul(self.matrix, other.matrix, self.p), validate=False)

    def rank(self) -> int:
        return gfmat.rank(self.matrix, self.p)

    def kernel_basis(self) -> np.ndarray:
        return gfmat.kernel_basis(self.matrix, self.p)

    def image_basis(self) -> np.ndarray:
        return gfmat.column_space(self.matrix, self.p)

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.target.dim


# =====================================================
# CONSTRUCTORS
# =====================================================

def zero_module(group: Group, p: int) -> KGModule:
    return KGModule(group, p, 0, [gfmat.zeros(0, 0)] * len(group.generators), name="0", validate=False)


def trivial_module(group: Group, p: int) -> KGModule:
    return KGModule(group, p, 1, [gfmat.identity(1)] * len(group.generators), name="k", validate=False)


def regular_module(group: Group, p: int) -> KGModule:
    """kG with G acting by left translation on the element basis."""
    n = group.order
    table = group.mult_table
    cols = np.arange(n)
    mats = []
    for s in group.generator_indices:
        a = gfmat.zeros(n, n)
        a[table[s, cols], cols] = 1
        mats.append(a)
    return KGModule(group, p, n, mats, name="kG", validate=False)


def permutation_module(group: Group, p: int) -> KGModule:
    n = group.degree
    mats = []
    for s in group.generators:
        a = gfmat.zeros(n, n)
        a[list(s.images), list(range(n))] = 1
        mats.append(a)
    return KGModule(group, p, n, mats, name="perm", validate=False)


def _parity(images: Sequence[int]) -> int:
    seen = set()
    swaps = 0
    for i in range(len(images)):
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = images[j]
            length += 1
        if length:
            swaps += length - 1
    return swaps % 2


def sign_module(group: Group, p: int) -> KGModule:
    mats = [np.array([[(-1) ** _parity(s.images) % p]], dtype=np.int64) for s in group.generators]
    return KGModule(group, p, 1, mats, name="sgn", validate=False)


def direct_sum(*modules: KGModule) -> KGModule:
    if not modules:
        raise ValueError("direct sum of no modules")
    group, p = modules[0].group, modules[0].p
    dim = sum(m.dim for m in modules)
    mats = []
    for k in range(len(group.generators)):
        a = gfmat.zeros(dim, dim)
        at = 0
        for m in modules:
            a[at:at + m.dim, at:at + m.dim] = m.gen_actions[k]
            at += m.dim
        mats.append(a)
    name = "+".join(m.name or "?" for m in modules)
    return KGModule(group, p, dim, mats, name=name, validate=False)


def dual_module(m: KGModule) -> KGModule:
    """Hom_k(M, k) with g acting by rho(g^-1)^T."""
    inv = m.group.inverse_table
    mats = [m.element_actions[inv[s]].T.copy() for s in m.group.generator_indices]
    return KGModule(m.group, m.p, m.dim, mats, name=f"{m.name}*", validate=False)


# =====================================================
# SUBMODULES AND QUOTIENTS
# =====================================================

def _spin(vectors, mats: Sequence[np.ndarray], p: int, dim: int) -> np.ndarray:
    vecs = _rows(vectors, dim)
    basis = gfmat.row_space(vecs, p) if vecs.shape[0] else gfmat.zeros(0, dim)
    while 0 < basis.shape[0] < dim:
        images = [(a @ basis.T).T % p for a in mats]
        grown = gfmat.row_space(np.vstack([basis] + images), p)
        if grown.shape[0] == basis.shape[0]:
            return grown
        basis = grown
    return basis


def _rows(basis, dim: int) -> np.ndarray:
    arr = np.asarray(basis, dtype=np.int64)
    if arr.size == 0:
        return gfmat.zeros(0, dim)
    return arr.reshape(-1, dim)


def restrict_to_subspace(m: KGModule, basis) -> Tuple[KGModule, ModuleMap]:
    """Submodule on the row space of `basis` with its inclusion map."""
    W = gfmat.row_space(_rows(basis, m.dim), m.p)
    s = W.shape[0]
    mats = []
    for a in m.gen_actions:
        if s == 0:
            mats.append(gfmat.zeros(0, 0))
            continue
        x = gfmat.solve_matrix(W.T, gfmat.matmul(a, W.T, m.p), m.p)
        if x is None:
            raise ModuleStructureError("subspace is not closed under the group action")
        mats.append(x)
    sub = KGModule(m.group, m.p, s, mats, name=f"sub({m.name})", validate=False)
    return sub, ModuleMap(sub, m, W.T, validate=False)


def submodule_generated(m: KGModule, vectors) -> Tuple[KGModule, ModuleMap]:
    return restrict_to_subspace(m, _spin(vectors, m.gen_actions, m.p, m.dim))


def quotient_module(m: KGModule, basis) -> Tuple[KGModule, ModuleMap]:
    """M / span(basis) with the projection. The span must be a submodule."""
    p = m.p
    W = _rows(basis, m.dim)
    images = [(a @ W.T).T % p for a in m.gen_actions]
    if W.shape[0] and images and not gfmat.subspace_contains(W, np.vstack(images), p):
        raise ModuleStructureError("cannot form quotient: subspace is not a submodule")
    Q, C = gfmat.quotient_projection(W, m.dim, p)
    mats = [gfmat.matmul(gfmat.matmul(Q, a, p), C, p) for a in m.gen_actions]
    quot = KGModule(m.group, p, Q.shape[0], mats, name=f"quot({m.name})", validate=False)
    return quot, ModuleMap(m, quot, Q, validate=False)


def fixed_points(m: KGModule, element_indices: Iterable[int]) -> np.ndarray:
    """Rows spanning the vectors fixed by every listed group element."""
    idx = list(element_indices)
    if not idx or m.dim == 0:
        return gfmat.identity(m.dim)
    eye = gfmat.identity(m.dim)
    stacked = np.vstack([(m.action(i) - eye) % m.p for i in idx])
    return gfmat.kernel_basis(stacked, m.p)


def coinvariant_dim(m: KGModule) -> int:
    """dim M_G = dim Hom_kG(M, k) for the trivial module k."""
    if m.dim == 0:
        return 0
    if not m.gen_actions:
        return m.dim
    eye = gfmat.identity(m.dim)
    stacked = np.hstack([(a - eye) % m.p for a in m.gen_actions])
    return m.dim - gfmat.rank(stacked, m.p)


# =====================================================
# HOMOMORPHISMS
# =====================================================

def hom_space(m: KGModule, n: KGModule) -> list:
    """Basis of Hom_kG(M, N) as ModuleMaps.

    Solves X A_s - B_s X = 0 for all generators with X vectorized row-major.
    """
    p = m.p
    dm, dn = m.dim, n.dim
    if dm == 0 or dn == 0:
        return []
    eqs = [
        (np.kron(gfmat.identity(dn), a.T) - np.kron(b, gfmat.identity(dm))) % p
        for a, b in zip(m.gen_actions, n.gen_actions)
    ]
    system = np.vstack(eqs) if eqs else gfmat.zeros(0, dn * dm)
    basis = gfmat.kernel_basis(system, p)
    return [ModuleMap(m, n, row.reshape(dn, dm), validate=False) for row in basis]


@dataclass(frozen=True)
class IsoResult:
    """isomorphic is True, False or None (search inconclusive)."""

    isomorphic: Optional[bool]
    witness: Optional[ModuleMap] = None

    @property
    def conclusive(self) -> bool:
        return self.isomorphic is not None


def is_isomorphic(m: KGModule, n: KGModule, seed: int = 0, budget: int | None = None,
                  exhaustive_limit: int = 4) -> IsoResult:
    budget = config.ISO_BUDGET if budget is None else budget
    if m.dim != n.dim:
        return IsoResult(False)
    if m.dim == 0:
        return IsoResult(True, ModuleMap(m, n, gfmat.zeros(0, 0), validate=False))
    homs = hom_space(m, n)
    if not homs:
        return IsoResult(False)
    p = m.p
    mats = np.stack([f.matrix for f in homs])
    if len(homs) <= exhaustive_limit:
        for coeffs in itertools.product(range(p), repeat=len(homs)):
            if not any(coeffs):
                continue
            x = np.tensordot(np.array(coeffs, dtype=np.int64), mats, axes=(0, 0)) % p
            if gfmat.rank(x, p) == m.dim:
                return IsoResult(True, ModuleMap(m, n, x, validate=False))
        return IsoResult(False)
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        coeffs = rng.integers(0, p, size=len(homs))
        x = np.tensordot(coeffs, mats, axes=(0, 0)) % p
        if gfmat.rank(x, p) == m.dim:
            return IsoResult(True, ModuleMap(m, n, x, validate=False))
    logger.info("isomorphism search inconclusive after %d trials (hom dim %d)", budget, len(homs))
    return IsoResult(None)


# =====================================================
# MEATAXE
# =====================================================

@dataclass(frozen=True)
class SimpleSet:
    """Simple modules up to isomorphism, trivial module first."""

    simples: tuple
    certificates: tuple
    end_dims: tuple
    seed: int

    def __len__(self):
        return len(self.simples)


def _char_factors(theta: np.ndarray, p: int) -> list:
    """Irreducible factors of the characteristic polynomial over F_p, leading coefficient first."""
    rows, cols = theta.shape
    field = GF(p)
    char = DomainMatrix.from_list_sympy(rows, cols, theta.tolist()).convert_to(field).charpoly()
    poly = sympy.Poly([int(c) % p for c in char], sympy.Symbol("x"), modulus=p)
    _, factors = poly.factor_list()
    return sorted(([int(c) % p for c in f.all_coeffs()] for f, _ in factors), key=len)


def _poly_at(coeffs: Sequence[int], theta: np.ndarray, p: int) -> np.ndarray:
    d = theta.shape[0]
    out = gfmat.zeros(d, d)
    for c in coeffs:
        out = (gfmat.matmul(out, theta, p) + c * gfmat.identity(d)) % p
    return out


def _find_submodule(m: KGModule, rng: np.random.Generator, budget: int):
    """Proper nonzero submodule basis, or a certificate string if m is simple.

    For a random algebra element theta and an irreducible factor f of its
    characteristic polynomial, any nonzero vector of ker f(theta) spins to
    all of m when m is simple. When that kernel has dimension deg f and a
    vector of ker f(theta^T) also spins to all of the transposed module,
    m is simple.
    """
    p, d = m.p, m.dim
    if d == 1:
        return "dim 1"
    transposed = [a.T.copy() for a in m.gen_actions]
    for attempt in range(budget):
        theta = m.act(rng.integers(0, p, size=m.group.order))
        for f in _char_factors(theta, p):
            null = gfmat.kernel_basis(_poly_at(f, theta, p), p)
            w = _spin(null[0], m.gen_actions, p, d)
            if w.shape[0] < d:
                return w
            if null.shape[0] != len(f) - 1:
                continue
            # a proper submodule U of the transposed module gives U^perp in m
            null_t = gfmat.kernel_basis(_poly_at(f, theta.T, p), p)
            u = _spin(null_t[0], transposed, p, d)
            if u.shape[0] < d:
                return gfmat.kernel_basis(u, p)
            return f"theta#{attempt} factor degree {len(f) - 1}"
    raise BudgetExceededError(
        f"could not split or certify a module of dimension {d}",
        {"dim": d, "attempts": budget},
    )


def find_simples(group: Group, p: int, seed: int = 0, budget: int | None = None) -> SimpleSet:
    """Split the regular module into composition factors and deduplicate."""
    budget = config.SPLIT_BUDGET if budget is None else budget
    rng = np.random.default_rng(seed)
    pending = [regular_module(group, p)]
    found, certs = [], []
    while pending:
        m = pending.pop()
        if m.dim == 0:
            continue
        outcome = _find_submodule(m, rng, budget)
        if isinstance(outcome, str):
            verdicts = [is_isomorphic(m, s, seed=seed).isomorphic for s in found]
            if None in verdicts:
                raise BudgetExceededError(
                    "could not decide whether two composition factors are isomorphic",
                    {"dim": m.dim, "group": repr(group), "p": p},
                )
            if not any(verdicts):
                found.append(m)
                certs.append(outcome)
            continue
        sub, _ = restrict_to_subspace(m, outcome)
        quot, _ = quotient_module(m, outcome)
        pending.extend([sub, quot])

    trivial = trivial_module(group, p)
    order = sorted(range(len(found)), key=lambda i: (not is_isomorphic(found[i], trivial).isomorphic, found[i].dim))
    simples = []
    for rank_, i in enumerate(order):
        s = found[i]
        label = "k" if rank_ == 0 else f"S{rank_}"
        simples.append(KGModule(group, p, s.dim, s.gen_actions, name=label, validate=False))
    end_dims = tuple(len(hom_space(s, s)) for s in simples)
    logger.info("found %d simple modules for %r at p=%d: dims %s",
                len(simples), group, p, [s.dim for s in simples])
    return SimpleSet(tuple(simples), tuple(certs[i] for i in order), end_dims, seed)


# =====================================================
# GROUP ALGEBRA
# =====================================================

class GroupAlgebra:
    """kG with its simples, radical and primitive idempotents."""

    def __init__(self, group: Group, p: int, seed: int = 0):
        self.group = group
        self.p = p
        self.seed = seed
        self.regular = regular_module(group, p)
        self._projectives = {}

    @property
    def n(self) -> int:
        return self.group.order

    def one(self) -> np.ndarray:
        e = np.zeros(self.n, dtype=np.int64)
        e[0] = 1
        return e

    def multiply(self, x, y) -> np.ndarray:
        return (self.regular.act(x) @ np.asarray(y, dtype=np.int64)) % self.p

    def power(self, x, k: int) -> np.ndarray:
        result = None
        base = np.asarray(x, dtype=np.int64) % self.p
        while k:
            if k & 1:
                result = base if result is None else self.multiply(result, base)
            k >>= 1
            if k:
                base = self.multiply(base, base)
        return result

    @cached_property
    def simples(self) -> SimpleSet:
        return find_simples(self.group, self.p, seed=self.seed)

    @cached_property
    def radical(self) -> np.ndarray:
        """rad(kG) as rows: elements acting as zero on every simple module."""
        blocks = [s.element_actions.reshape(self.n, s.dim * s.dim).T for s in self.simples.simples]
        J = gfmat.kernel_basis(np.vstack(blocks), self.p)
        self._check_nilpotent(J)
        return J

    def _check_nilpotent(self, J: np.ndarray) -> None:
        power = J
        for _ in range(self.n + 1):
            if power.shape[0] == 0:
                return
            products = [self.multiply(x, y) for x in power for y in J]
            power = gfmat.row_space(np.array(products), self.p) if products else gfmat.zeros(0, self.n)
        raise ConsistencyError("computed radical of kG is not nilpotent")

    def top_multiplicities(self, e) -> list:
        """Multiplicity of each simple in the top of kG e."""
        out = []
        for s, end in zip(self.simples.simples, self.simples.end_dims):
            r = gfmat.rank(s.act(e), self.p)
            if r % end:
                raise ConsistencyError(f"rank {r} of an idempotent on {s.name} is not a multiple of {end}")
            out.append(r // end)
        return out

    def _exponent(self) -> int:
        """x^M is idempotent for every x in a commutative subalgebra of kG."""
        c = 0
        while self.p ** c < self.n:
            c += 1
        lcm = 1
        for j in range(1, self.n + 1):
            lcm = math.lcm(lcm, self.p ** j - 1)
        return self.p ** c * lcm

    def _split(self, e: np.ndarray, rng: np.random.Generator, budget: int) -> Tuple[np.ndarray, np.ndarray]:
        p = self.p
        exponent = self._exponent()
        for _ in range(budget):
            a = self.multiply(self.multiply(e, rng.integers(0, p, size=self.n)), e)
            powers = [e]
            for _ in range(self.n - 1):
                powers.append(self.multiply(powers[-1], a))
            x = np.tensordot(rng.integers(0, p, size=self.n), np.array(powers), axes=(0, 0)) % p
            f = self.power(x, exponent)
            if not f.any() or np.array_equal(f, e):
                continue
            if not np.array_equal(self.multiply(f, f), f):
                raise ConsistencyError("power of a corner element is not idempotent")
            return f, (e - f) % p
        raise BudgetExceededError("could not split an idempotent", {"attempts": budget})

    @cached_property
    def primitive_idempotents(self) -> tuple:
        """One primitive idempotent per simple module, in simple order."""
        rng = np.random.default_rng(self.seed)
        count = len(self.simples)
        chosen = [None] * count
        pending = [self.one()]
        while pending and any(c is None for c in chosen):
            e = pending.pop()
            mult = self.top_multiplicities(e)
            support = [j for j, m in enumerate(mult) if m]
            if not support:
                raise ConsistencyError("nonzero idempotent with zero top")
            if all(chosen[j] is not None for j in support):
                continue
            if sum(mult) == 1:
                chosen[support[0]] = e
                continue
            pending.extend(self._split(e, rng, config.SPLIT_BUDGET))
        if any(c is None for c in chosen):
            raise ConsistencyError("idempotent decomposition missed a simple module")
        return tuple(chosen)

    def projective(self, j: int) -> Tuple[KGModule, np.ndarray]:
        """P(S_j) = kG e_j with its basis rows inside kG."""
        if j not in self._projectives:
            e = self.primitive_idempotents[j]
            rows = (self.regular.element_actions @ e) % self.p
            basis = gfmat.row_space(rows, self.p)
            sub, _ = restrict_to_subspace(self.regular, basis)
            module = KGModule(self.group, self.p, sub.dim, sub.gen_actions,
                              name=f"P({self.simples.simples[j].name})", validate=False)
            self._projectives[j] = (module, basis)
        return self._projectives[j]


@lru_cache(maxsize=None)
def group_algebra(group: Group, p: int, seed: int = 0) -> GroupAlgebra:
    return GroupAlgebra(group, p, seed)


def find_simple_modules(group: Group, p: int, seed: int = 0) -> SimpleSet:
    return group_algebra(group, p, seed).simples


def algebra_radical(group: Group, p: int, seed: int = 0) -> np.ndarray:
    return group_algebra(group, p, seed).radical


def primitive_idempotents(group: Group, p: int, seed: int = 0) -> tuple:
    return group_algebra(group, p, seed).primitive_idempotents


# =====================================================
# RADICAL, TOP, SOCLE
# =====================================================

def radical_of_module(m: KGModule, seed: int = 0) -> np.ndarray:
    """rad(M) = rad(kG) M as rows."""
    J = algebra_radical(m.group, m.p, seed)
    if J.shape[0] == 0 or m.dim == 0:
        return gfmat.zeros(0, m.dim)
    cols = np.vstack([m.act(j).T for j in J])
    return gfmat.row_space(cols, m.p)


def top(m: KGModule, seed: int = 0) -> Tuple[KGModule, ModuleMap]:
    return quotient_module(m, radical_of_module(m, seed))


def socle(m: KGModule, seed: int = 0) -> Tuple[KGModule, ModuleMap]:
    """Vectors killed by rad(kG)."""
    J = algebra_radical(m.group, m.p, seed)
    if J.shape[0] == 0 or m.dim == 0:
        return restrict_to_subspace(m, gfmat.identity(m.dim))
    return restrict_to_subspace(m, gfmat.kernel_basis(np.vstack([m.act(j) for j in J]), m.p))


# =====================================================
# COVERS AND HULLS
# =====================================================

def projective_cover(m: KGModule, seed: int = 0) -> Tuple[KGModule, ModuleMap]:
    """Minimal projective P with a surjection P -> M.

    For each simple S_j, vectors of e_j M that are independent modulo
    rad(M) + (already covered part) each contribute a copy of P(S_j).
    """
    if m.dim == 0:
        z = zero_module(m.group, m.p)
        return z, ModuleMap(z, m, gfmat.zeros(0, 0), validate=False)
    p = m.p
    alg = group_algebra(m.group, p, seed)
    covered = radical_of_module(m, seed)
    pieces = []
    for j, e in enumerate(alg.primitive_idempotents):
        if covered.shape[0] == m.dim:
            break
        for v in gfmat.column_space(m.act(e), p):
            if gfmat.subspace_contains(covered, v, p):
                continue
            pieces.append((j, v))
            covered = gfmat.subspace_sum(covered, _spin(v, m.gen_actions, p, m.dim), p)
            if covered.shape[0] == m.dim:
                break
    if covered.shape[0] != m.dim:
        raise ConsistencyError(f"projective cover of {m!r} did not reach the whole module")

    blocks, summands = [], []
    for j, v in pieces:
        proj, basis = alg.projective(j)
        summands.append(proj)
        # basis element b of kG e_j maps to b . v
        blocks.append((np.tensordot(basis, m.element_actions, axes=(1, 0)) % p @ v % p).T)
    cover = direct_sum(*summands)
    pi = ModuleMap(cover, m, np.hstack(blocks), validate=False)
    if not pi.is_surjective():
        raise ConsistencyError("projective cover map is not surjective")
    logger.debug("projective cover of %r: %s", m, cover.name)
    return cover, pi


def injective_hull(m: KGModule, seed: int = 0) -> Tuple[KGModule, ModuleMap]:
    """Dual of the projective cover of the dual."""
    cover, pi = projective_cover(dual_module(m), seed)
    hull = dual_module(cover)
    # dual(dual(M)) has the same matrices as M
    return hull, ModuleMap(m, hull, pi.matrix.T, validate=False)


def loops_omega(m: KGModule, seed: int = 0) -> KGModule:
    cover, pi = projective_cover(m, seed)
    return restrict_to_subspace(cover, pi.kernel_basis())[0]


def coloops_omega_inv(m: KGModule, seed: int = 0) -> KGModule:
    hull, iota = injective_hull(m, seed)
    return quotient_module(hull, iota.image_basis())[0]


# =====================================================
# SIGMA CONSTRUCTIONS
# =====================================================

def sigma_submodule(m: KGModule) -> Tuple[KGModule, ModuleMap]:
    """Smallest submodule whose quotient has only trivial composition factors.

    Spanned by (1 - g) M for g generating O^p(G).
    """
    op = o_p_subgroup(m.group, m.p)
    if m.dim == 0 or not op.generators:
        return restrict_to_subspace(m, gfmat.zeros(0, m.dim))
    eye = gfmat.identity(m.dim)
    images = np.vstack([((m.action(g) - eye) % m.p).T for g in op.generators])
    return submodule_generated(m, images)


def sigma_quotient(m: KGModule) -> Tuple[KGModule, ModuleMap]:
    """M modulo its O^p-fixed points, the largest submodule built from k."""
    op = o_p_subgroup(m.group, m.p)
    return quotient_module(m, fixed_points(m, op.generators))
