"""Finite permutation groups given by generators.

Groups are closed by breadth-first search. Elements are kept in
lexicographic order of their image tuples, so the identity is element 0.
Every element carries a word in the generators; the prefix of a word is the
word of another element (the search tree), which lets modules build element
actions incrementally.

Product convention: (a * b)(i) = a(b(i)). A word (s1, s2, ...) evaluates to
g_{s1} * g_{s2} * ...
"""
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from pydantic import ValidationError

import config
from errors import BudgetExceededError, ConsistencyError, ParseError
from records import GroupSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Perm:
    images: tuple

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, degree: int) -> "Perm":
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]]) -> "Perm":
        images = list(range(degree))
        for cycle in cycles:
            for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]):
                images[a] = b
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Perm") -> "Perm":
        if other.degree != self.degree:
            raise ValueError("permutations of different degree")
        return Perm(tuple(self.images[j] for j in other.images))

    def inverse(self) -> "Perm":
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Perm(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def order(self) -> int:
        k, x = 1, self
        while not x.is_identity():
            x = x * self
            k += 1
        return k


@dataclass(frozen=True, eq=False)
class Group:
    """Closed permutation group with its element list and words."""

    degree: int
    generators: tuple
    elements: tuple
    words: tuple
    name: str = ""

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def index(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    @cached_property
    def mult_table(self) -> np.ndarray:
        """mult_table[i, j] = index of elements[i] * elements[j]."""
        idx = self.index
        table = np.empty((self.order, self.order), dtype=np.int64)
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                table[i, j] = idx[a * b]
        return table

    @cached_property
    def inverse_table(self) -> np.ndarray:
        idx = self.index
        return np.array([idx[g.inverse()] for g in self.elements], dtype=np.int64)

    @cached_property
    def element_orders(self) -> tuple:
        return tuple(g.order() for g in self.elements)

    @cached_property
    def generator_indices(self) -> tuple:
        return tuple(self.index[s] for s in self.generators)

    def element(self, i: int) -> Perm:
        return self.elements[i]

    def word(self, i: int) -> tuple:
        return self.words[i]

    def evaluate_word(self, word: Sequence[int]) -> Perm:
        x = Perm.identity(self.degree)
        for s in word:
            x = x * self.generators[s]
        return x

    def __repr__(self):
        label = self.name or "group"
        return f"Group({label}, order={self.order}, degree={self.degree})"


# =====================================================
# CLOSURE
# =====================================================

def close(generators: Sequence[Perm], degree: int | None = None, cap: int | None = None, name: str = "") -> Group:
    """Enumerate the group generated by `generators`.

    Raises BudgetExceededError once more than `cap` elements are found.
    """
    cap = config.ORDER_CAP if cap is None else cap
    gens = tuple(g if isinstance(g, Perm) else Perm(tuple(g)) for g in generators)
    if degree is None:
        if not gens:
            raise ValueError("degree is required when there are no generators")
        degree = gens[0].degree
    for g in gens:
        if g.degree != degree:
            raise ValueError(f"generator {g.images} does not act on {degree} points")

    e = Perm.identity(degree)
    words = {e: ()}
    queue = [e]
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        for si, s in enumerate(gens):
            y = x * s
            if y in words:
                continue
            words[y] = words[x] + (si,)
            queue.append(y)
            if len(words) > cap:
                raise BudgetExceededError(
                    f"group closure exceeded {cap} elements",
                    {"found": len(words), "cap": cap},
                )

    elements = tuple(sorted(words))
    group = Group(
        degree=degree,
        generators=gens,
        elements=elements,
        words=tuple(words[g] for g in elements),
        name=name,
    )
    logger.debug("closed %r", group)
    return group


def cyclic_group(n: int) -> Group:
    return close([Perm(tuple((i + 1) % n for i in range(n)))], degree=n, name=f"C{n}")


def symmetric_group(n: int) -> Group:
    gens = [Perm.from_cycles(n, [(0, 1)]), Perm.from_cycles(n, [tuple(range(n))])] if n > 1 else []
    return close(gens, degree=n, name=f"S{n}")


def direct_product(g: Group, h: Group, name: str = "") -> Group:
    """Product acting on the disjoint union of the two point sets."""
    n, m = g.degree, h.degree
    gens = [Perm(s.images + tuple(range(n, n + m))) for s in g.generators]
    gens += [Perm(tuple(range(n)) + tuple(n + j for j in s.images)) for s in h.generators]
    return close(gens, degree=n + m, cap=max(config.ORDER_CAP, g.order * h.order),
                 name=name or f"{g.name}x{h.name}")


# =====================================================
# SUBGROUPS
# =====================================================

def subgroup_closure(group: Group, gen_indices: Iterable[int]) -> frozenset:
    """Indices of the subgroup generated by the given element indices."""
    gens = list(gen_indices)
    table = group.mult_table
    members = {0}
    queue = [0]
    while queue:
        x = queue.pop()
        for s in gens:
            y = int(table[x, s])
            if y not in members:
                members.add(y)
                queue.append(y)
    return frozenset(members)


def is_normal_subgroup(group: Group, members: frozenset) -> bool:
    table = group.mult_table
    inv = group.inverse_table
    for s in group.generator_indices:
        for m in members:
            if int(table[table[s, m], inv[s]]) not in members:
                return False
    return True


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True, eq=False)
class OpSubgroup:
    """O^p(G): the subgroup generated by all p'-elements."""

    parent: Group
    p: int
    members: frozenset
    generators: tuple = field(default=())

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def index(self) -> int:
        return self.parent.order // self.order


def o_p_subgroup(group: Group, p: int) -> OpSubgroup:
    orders = group.element_orders
    p_prime = [i for i in range(group.order) if orders[i] % p != 0]
    gens = []
    members = frozenset({0})
    for i in p_prime:
        if i not in members:
            gens.append(i)
            members = subgroup_closure(group, gens)
    op = OpSubgroup(parent=group, p=p, members=members, generators=tuple(gens))
    if group.order % op.order or not _is_power_of(op.index, p):
        raise ConsistencyError(f"|G : O^{p}(G)| = {op.index} is not a power of {p}")
    if not is_normal_subgroup(group, members):
        raise ConsistencyError(f"O^{p}(G) is not normal in {group!r}")
    return op


def is_p_nilpotent(group: Group, p: int) -> bool:
    """G is p-nilpotent iff O^p(G) is a p'-group."""
    return o_p_subgroup(group, p).order % p != 0


def largest_p_quotient_order(group: Group, p: int) -> int:
    return o_p_subgroup(group, p).index


def cosets(op: OpSubgroup) -> list:
    """Right cosets O^p * g as sorted index lists, ordered by representative."""
    table = op.parent.mult_table
    seen = set()
    result = []
    for g in range(op.parent.order):
        if g in seen:
            continue
        coset = sorted(int(table[m, g]) for m in op.members)
        seen.update(coset)
        result.append(coset)
    return result


# =====================================================
# INPUT
# =====================================================

def group_from_spec(spec: GroupSpec, cap: int | None = None) -> Group:
    try:
        gens = [Perm(tuple(g)) for g in spec.generators]
    except ValueError as e:
        raise ParseError(f"group {spec.name or '?'}: {e}") from e
    for g in gens:
        if g.degree != spec.degree:
            raise ParseError(
                f"group {spec.name or '?'}: generator {g.images} does not act on {spec.degree} points"
            )
    return close(gens, degree=spec.degree, cap=cap, name=spec.name)


def load_group_spec(path: str | Path) -> GroupSpec:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        spec = GroupSpec.model_validate(raw)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ParseError(f"{path}: {e}") from e
    if not spec.name:
        spec = spec.model_copy(update={"name": path.stem})
    return spec


def load_group(path: str | Path, cap: int | None = None) -> Group:
    return group_from_spec(load_group_spec(path), cap=cap)
