import pytest

import permgrp
from errors import BudgetExceededError, ParseError
from permgrp import Perm, close, cyclic_group, symmetric_group
from records import GroupSpec


def test_product_convention():
    a = Perm((1, 0, 2))
    b = Perm((1, 2, 0))
    # (a*b)(i) = a(b(i))
    assert (a * b).images == (0, 2, 1)
    assert (a * a.inverse()).is_identity()


def test_closure_orders():
    assert cyclic_group(6).order == 6
    assert symmetric_group(3).order == 6
    assert symmetric_group(4).order == 24


def test_identity_is_first_and_words_evaluate(groups):
    g = groups["S3"]
    assert g.elements[0].is_identity()
    for element, word in zip(g.elements, g.words):
        assert g.evaluate_word(word) == element


def test_word_prefixes_are_elements(groups):
    g = groups["A4"]
    words = set(g.words)
    assert all(w[:-1] in words for w in g.words if w)


def test_empty_generators_give_trivial_group():
    g = close([], degree=3)
    assert g.order == 1


def test_closure_cap():
    with pytest.raises(BudgetExceededError):
        permgrp.close(symmetric_group(5).generators, cap=50)


def test_mismatched_degree_rejected():
    with pytest.raises(ValueError):
        close([Perm((1, 0)), Perm((1, 2, 0))])


def test_group_from_spec_validates():
    with pytest.raises(ParseError):
        permgrp.group_from_spec(GroupSpec(degree=3, generators=[[0, 0, 1]]))
    with pytest.raises(ParseError):
        permgrp.group_from_spec(GroupSpec(degree=4, generators=[[1, 0, 2]]))


@pytest.mark.parametrize(
    "name, p, order, nilpotent",
    [
        ("S3", 3, 6, False),
        ("S3", 2, 3, True),
        ("C6", 3, 2, True),
        ("A4", 2, 12, False),
        ("A4", 3, 4, True),
        ("C2", 2, 1, True),
        ("F20", 5, 20, False),
    ],
)
def test_o_p_subgroup(groups, name, p, order, nilpotent):
    g = groups[name]
    op = permgrp.o_p_subgroup(g, p)
    assert op.order == order
    assert permgrp.is_p_nilpotent(g, p) is nilpotent
    assert permgrp.largest_p_quotient_order(g, p) == g.order // order
    assert permgrp.is_normal_subgroup(g, op.members)


def test_cosets_partition_group(groups):
    g = groups["C6"]
    op = permgrp.o_p_subgroup(g, 3)
    classes = permgrp.cosets(op)
    assert len(classes) == 3
    assert sorted(i for c in classes for i in c) == list(range(6))


def test_direct_product(groups):
    g = permgrp.direct_product(groups["C3"], groups["S3"])
    assert g.order == 18
    assert permgrp.o_p_subgroup(g, 3).order == 6


def test_load_group_file(data_dir):
    g = permgrp.load_group(data_dir / "groups" / "F20.json")
    assert g.order == 20 and g.name == "F20"


def test_load_bad_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        permgrp.load_group(path)
