import numpy as np
import pytest

import gfmat
import kgmod
from errors import BudgetExceededError, ModuleStructureError
from kgmod import KGModule, ModuleMap
from permgrp import cyclic_group, o_p_subgroup


def test_regular_module_is_representation(groups):
    m = kgmod.regular_module(groups["S3"], 3)
    assert m.dim == 6
    m.check_homomorphism()
    # identity element acts as identity
    assert np.array_equal(m.action(0), np.eye(6))


def test_bad_action_rejected(groups):
    g = groups["C2"]
    with pytest.raises(ModuleStructureError):
        KGModule(g, 2, 2, [np.array([[1, 1], [1, 1]])])
    with pytest.raises(ModuleStructureError):
        KGModule(g, 3, 1, [np.array([[2]]), np.array([[1]])])


def test_dual_of_dual_has_same_matrices(groups):
    m = kgmod.permutation_module(groups["A4"], 2)
    dd = kgmod.dual_module(kgmod.dual_module(m))
    for a, b in zip(m.gen_actions, dd.gen_actions):
        assert np.array_equal(a, b)


def test_regular_module_is_self_dual(groups):
    m = kgmod.regular_module(groups["S3"], 3)
    result = kgmod.is_isomorphic(m, kgmod.dual_module(m))
    assert result.isomorphic is True
    assert result.witness.is_injective()


def test_sign_not_isomorphic_to_trivial(groups):
    g = groups["S3"]
    assert kgmod.is_isomorphic(kgmod.sign_module(g, 3), kgmod.trivial_module(g, 3)).isomorphic is False
    # in characteristic 2 the sign is trivial
    assert kgmod.is_isomorphic(kgmod.sign_module(g, 2), kgmod.trivial_module(g, 2)).isomorphic is True


def test_submodule_and_quotient(groups):
    g = groups["S3"]
    m = kgmod.permutation_module(g, 3)
    sub, incl = kgmod.submodule_generated(m, [1, 1, 1])
    assert sub.dim == 1
    quot, proj = kgmod.quotient_module(m, incl.matrix.T)
    assert quot.dim == 2
    assert not gfmat.matmul(proj.matrix, incl.matrix, 3).any()
    with pytest.raises(ModuleStructureError):
        kgmod.quotient_module(m, [[1, 0, 0]])


def test_map_equivariance_checked(groups):
    g = groups["C2"]
    k = kgmod.trivial_module(g, 2)
    reg = kgmod.regular_module(g, 2)
    ModuleMap(k, reg, [[1], [1]])
    with pytest.raises(ModuleStructureError):
        ModuleMap(k, reg, [[1], [0]])


def test_compose_requires_matching_modules(groups):
    g = groups["C2"]
    k = kgmod.trivial_module(g, 2)
    reg = kgmod.regular_module(g, 2)
    into = ModuleMap(k, reg, [[1], [1]])
    onto = ModuleMap(reg, k, [[1, 1]])
    assert not onto.compose(into).matrix.any()
    assert into.compose(onto).matrix.tolist() == [[1, 1], [1, 1]]
    with pytest.raises(ModuleStructureError):
        into.compose(into)


def test_hom_space_dimensions(groups):
    g = groups["S3"]
    reg = kgmod.regular_module(g, 3)
    assert len(kgmod.hom_space(reg, reg)) == 6
    k = kgmod.trivial_module(g, 3)
    assert len(kgmod.hom_space(k, reg)) == 1
    assert len(kgmod.hom_space(kgmod.sign_module(g, 3), k)) == 0


@pytest.mark.parametrize(
    "name, p, dims",
    [("C2", 2, [1]), ("S3", 3, [1, 1]), ("S3", 2, [1, 2]), ("A4", 2, [1, 2]), ("C6", 3, [1, 1]), ("C6", 2, [1, 2])],
)
def test_find_simples(groups, name, p, dims):
    simples = kgmod.find_simples(groups[name], p, seed=0)
    assert [s.dim for s in simples.simples][0] == 1
    assert sorted(s.dim for s in simples.simples) == sorted(dims)
    trivial = kgmod.trivial_module(groups[name], p)
    assert kgmod.is_isomorphic(simples.simples[0], trivial).isomorphic


def test_find_simples_seed_independent(groups):
    a = kgmod.find_simple_modules(groups["A4"], 2, seed=0)
    b = kgmod.find_simples(groups["A4"], 2, seed=7)
    assert [s.dim for s in a.simples] == [s.dim for s in b.simples]
    for s, t in zip(a.simples, b.simples):
        assert kgmod.is_isomorphic(s, t).isomorphic


def test_find_simples_certifies_non_absolutely_simple():
    # F_2 C_3 has a 2-dimensional simple with End = F_4
    simples = kgmod.find_simples(cyclic_group(3), 2, seed=0)
    assert [s.dim for s in simples.simples] == [1, 2]
    assert simples.end_dims == (1, 2)
    assert all(isinstance(c, str) for c in simples.certificates)


@pytest.mark.parametrize("name", ["C6", "A4"])
def test_find_simples_at_two_with_order_three_elements(groups, name):
    simples = kgmod.find_simples(groups[name], 2, seed=3)
    assert [s.dim for s in simples.simples] == [1, 2]
    assert simples.end_dims[1] == 2


def test_char_factors_divide_characteristic_polynomial():
    theta = kgmod.regular_module(cyclic_group(3), 2).act([0, 1, 0])
    factors = kgmod._char_factors(theta, 2)
    assert factors == [[1, 1], [1, 1, 1]]
    for f in factors:
        assert gfmat.kernel_basis(kgmod._poly_at(f, theta, 2), 2).shape[0] == len(f) - 1


def test_inconclusive_dedup_is_budget_error(groups, monkeypatch):
    monkeypatch.setattr(kgmod, "is_isomorphic", lambda *a, **kw: kgmod.IsoResult(None))
    with pytest.raises(BudgetExceededError):
        kgmod.find_simples(groups["S3"], 3, seed=0)


def test_radical_dimensions(groups):
    assert kgmod.algebra_radical(groups["C2"], 2).shape[0] == 1
    assert kgmod.algebra_radical(groups["S3"], 3).shape[0] == 4
    assert kgmod.algebra_radical(groups["C3"], 2).shape[0] == 0


def test_top_and_socle(groups):
    g = groups["S3"]
    reg = kgmod.regular_module(g, 3)
    top, _ = kgmod.top(reg)
    assert top.dim == 2
    soc, _ = kgmod.socle(reg)
    assert soc.dim == 2


def test_primitive_idempotents(groups):
    g = groups["S3"]
    alg = kgmod.group_algebra(g, 3, 0)
    for j, e in enumerate(alg.primitive_idempotents):
        assert np.array_equal(alg.multiply(e, e), e)
        mult = alg.top_multiplicities(e)
        assert mult[j] == 1 and sum(mult) == 1


@pytest.mark.parametrize("name, p, dim", [("C2", 2, 2), ("S3", 3, 3), ("S3", 2, 2), ("A4", 2, 4), ("C3", 2, 1)])
def test_projective_cover_of_trivial(groups, name, p, dim):
    g = groups[name]
    k = kgmod.trivial_module(g, p)
    cover, pi = kgmod.projective_cover(k)
    assert cover.dim == dim
    assert pi.is_surjective()
    rad = kgmod.radical_of_module(cover)
    assert gfmat.subspace_contains(rad, pi.kernel_basis(), p)


def test_projective_cover_of_projective_is_iso(groups):
    g = groups["S3"]
    reg = kgmod.regular_module(g, 3)
    cover, pi = kgmod.projective_cover(reg)
    assert cover.dim == 6
    assert pi.rank() == 6


def test_injective_hull(groups):
    g = groups["S3"]
    k = kgmod.trivial_module(g, 3)
    hull, iota = kgmod.injective_hull(k)
    assert hull.dim == 3
    assert iota.is_injective()
    cover, _ = kgmod.projective_cover(k)
    assert kgmod.is_isomorphic(hull, cover).isomorphic


def test_omega(groups):
    g2 = groups["C2"]
    assert kgmod.loops_omega(kgmod.trivial_module(g2, 2)).dim == 1
    s3 = groups["S3"]
    omega = kgmod.loops_omega(kgmod.trivial_module(s3, 3))
    assert omega.dim == 2
    assert kgmod.loops_omega(kgmod.regular_module(s3, 3)).dim == 0
    assert kgmod.coloops_omega_inv(kgmod.trivial_module(s3, 3)).dim == 2


def test_omega_of_direct_sum(groups):
    g = groups["S3"]
    k = kgmod.trivial_module(g, 3)
    sgn = kgmod.sign_module(g, 3)
    both = kgmod.loops_omega(kgmod.direct_sum(k, sgn)).dim
    assert both == kgmod.loops_omega(k).dim + kgmod.loops_omega(sgn).dim


def test_sigma_submodule(groups):
    s3 = groups["S3"]
    reg = kgmod.regular_module(s3, 3)
    sub, incl = kgmod.sigma_submodule(reg)
    assert sub.dim == 5
    quot, _ = kgmod.quotient_module(reg, incl.matrix.T)
    op = o_p_subgroup(s3, 3)
    for gen in op.generators:
        assert np.array_equal(quot.action(gen), np.eye(quot.dim))
    assert kgmod.sigma_submodule(kgmod.trivial_module(s3, 3))[0].dim == 0
    c4 = groups["C4"]
    assert kgmod.sigma_submodule(kgmod.regular_module(c4, 2))[0].dim == 0


def test_sigma_quotient(groups):
    s3 = groups["S3"]
    assert kgmod.sigma_quotient(kgmod.trivial_module(s3, 3))[0].dim == 0
    assert kgmod.sigma_quotient(kgmod.sign_module(s3, 3))[0].dim == 1
    c4 = groups["C4"]
    assert kgmod.sigma_quotient(kgmod.regular_module(c4, 2))[0].dim == 0


def test_record_round_trip(groups):
    g = groups["A4"]
    m = kgmod.permutation_module(g, 2)
    back = KGModule.from_record(g, m.to_record())
    assert back.dim == m.dim
    assert all(np.array_equal(a, b) for a, b in zip(back.gen_actions, m.gen_actions))
