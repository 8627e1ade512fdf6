import itertools

import numpy as np
import pytest

import kgmod
import squeeze
from errors import ConsistencyError, InsufficientTraceError
from kgmod import ModuleMap
from permgrp import load_group_spec
from records import LeftTraceRecord, RightTraceRecord


def test_s3_loops_at_three(groups):
    table = squeeze.loops_table(groups["S3"], 3, (0, 6))
    assert table.as_list() == [1, 0, 1, 1, 1, 1, 1]
    assert table.kind == "loops"


@pytest.mark.parametrize("name, p, order", [("C2", 2, 2), ("C4", 2, 4), ("D8", 2, 8), ("C3", 3, 3)])
def test_p_group_loops_are_concentrated_in_degree_zero(groups, name, p, order):
    trace = squeeze.left_squeezed_resolution(groups[name], p, length=1)
    assert trace.terminated
    table = squeeze.squeezed_homology(trace, (0, 5))
    assert table.as_list() == [order, 0, 0, 0, 0, 0]


def test_trace_satisfies_cover_contract(groups):
    trace = squeeze.left_squeezed_resolution(groups["S3"], 3, length=4)
    trace.check()
    assert trace.length == 4
    assert not trace.terminated
    assert trace.steps[0].projective.dim == 3


def test_short_trace_is_rejected(groups):
    trace = squeeze.left_squeezed_resolution(groups["S3"], 3, length=2)
    with pytest.raises(InsufficientTraceError) as info:
        squeeze.squeezed_homology(trace, (0, 5))
    assert info.value.required_length == 6
    with pytest.raises(ValueError):
        squeeze.squeezed_homology(trace, (-1, 1))


def test_left_trace_record_round_trip(groups, data_dir):
    g = groups["S3"]
    spec = load_group_spec(data_dir / "groups" / "S3.json")
    trace = squeeze.left_squeezed_resolution(g, 3, length=4)
    record = LeftTraceRecord.model_validate_json(trace.to_record(spec).model_dump_json())
    back = squeeze.left_trace_from_record(g, record)
    assert squeeze.squeezed_homology(back, (0, 3)) == squeeze.squeezed_homology(trace, (0, 3))


def test_right_trace_record_round_trip(groups, data_dir):
    g = groups["S3"]
    spec = load_group_spec(data_dir / "groups" / "S3.json")
    trace = squeeze.right_squeezed_resolution(g, 3, length=3)
    record = RightTraceRecord.model_validate_json(trace.to_record(spec).model_dump_json())
    back = squeeze.right_trace_from_record(g, record)
    assert squeeze.squeezed_cohomology(back, (0, 3)) == squeeze.squeezed_cohomology(trace, (0, 3))


@pytest.mark.parametrize("name, p, h0", [("S3", 3, 1), ("C6", 3, 3), ("C2", 2, 2)])
def test_degree_zero_cohomology(groups, name, p, h0):
    assert squeeze.cohomology_table(groups[name], p, (0, 0)).as_list() == [h0]


def test_tate_lengths():
    assert squeeze.tate_lengths((-4, 4)) == (5, 6)
    assert squeeze.tate_lengths((2, 3)) == (4, 1)


@pytest.mark.parametrize(
    "name, p, expected",
    [("C2", 2, [0] * 9), ("C6", 3, [0] * 9), ("S3", 3, [1] * 9)],
)
def test_tate_squeezed_homology(groups, name, p, expected):
    table = squeeze.tate_squeezed_homology(groups[name], p, (-4, 4))
    assert table.as_list() == expected


def test_tate_reuses_long_enough_traces(groups):
    g = groups["S3"]
    left = squeeze.left_squeezed_resolution(g, 3, length=6)
    right = squeeze.right_squeezed_resolution(g, 3, length=6)
    table = squeeze.tate_squeezed_homology(g, 3, (-2, 2), left=left, right=right)
    assert table.as_list() == [1, 1, 1, 1, 1]


def _splice_isomorphisms(left, right, p):
    p0, i0 = left.steps[0].projective, right.steps[0].injective
    basis = kgmod.hom_space(p0, i0)
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        matrix = sum(c * h.matrix for c, h in zip(coeffs, basis)) % p
        phi = ModuleMap(p0, i0, matrix, validate=False)
        if phi.rank() == p0.dim:
            yield phi


@pytest.mark.parametrize("name, p", [("S3", 3), ("A4", 2)])
def test_tate_dims_do_not_depend_on_splice_isomorphism(groups, name, p):
    g = groups[name]
    window = (-3, 3)
    left_len, right_len = squeeze.tate_lengths(window)
    left = squeeze.left_squeezed_resolution(g, p, length=left_len)
    right = squeeze.right_squeezed_resolution(g, p, length=right_len)
    default = squeeze.tate_squeezed_homology(g, p, window, left=left, right=right)
    choices = list(_splice_isomorphisms(left, right, p))
    assert len(choices) >= 2
    for phi in choices:
        table = squeeze.tate_squeezed_homology(g, p, window, left=left, right=right, phi=phi)
        assert table.dims == default.dims


def test_tate_splice_rejects_singular_map(groups):
    g = groups["S3"]
    left = squeeze.left_squeezed_resolution(g, 3, length=2)
    right = squeeze.right_squeezed_resolution(g, 3, length=2)
    p0, i0 = left.steps[0].projective, right.steps[0].injective
    with pytest.raises(ConsistencyError):
        squeeze.tate_splice(left, right, phi=ModuleMap(p0, i0, np.zeros((i0.dim, p0.dim), dtype=np.int64)))


def test_trace_composites_are_module_maps(groups):
    left = squeeze.left_squeezed_resolution(groups["S3"], 3, length=2)
    st = left.steps[0]
    assert st.a_next_into_p.source is st.a_next
    assert st.a_next_into_p.target is st.projective
    right = squeeze.right_squeezed_resolution(groups["S3"], 3, length=2)
    assert right.steps[0].to_c_next.target is right.steps[1].c


@pytest.mark.parametrize(
    "name, p, verdict, nilpotent",
    [("C2", 2, "iso", True), ("S3", 3, "zero", False), ("C6", 3, "iso", True),
     ("A4", 2, "zero", False), ("A4", 3, "iso", True), ("S3", 2, "iso", True)],
)
def test_norm_map(groups, name, p, verdict, nilpotent):
    result = squeeze.norm_map(groups[name], p)
    assert result.verdict == verdict
    assert result.p_nilpotent is nilpotent
    assert result.consistent
    record = result.to_record(name)
    assert record.verdict == verdict


def test_classical_norm_verdict(groups):
    assert squeeze.classical_norm_verdict(groups["S3"], 3) == "zero"
    assert squeeze.classical_norm_verdict(groups["C3"], 2) == "iso"


def test_classical_tate_s3(groups):
    table = squeeze.classical_tate_dimensions(groups["S3"], 3, (0, 7))
    assert table.as_list() == [1, 0, 0, 1, 1, 0, 0, 1]


def test_classical_tate_duality(groups):
    table = squeeze.classical_tate_dimensions(groups["S3"], 3, (-4, 3))
    for n in range(0, 4):
        assert table.dim(n) == table.dim(-1 - n)


def test_classical_tate_cyclic(groups):
    assert squeeze.classical_tate_dimensions(groups["C2"], 2, (-3, 3)).as_list() == [1] * 7
    assert squeeze.classical_tate_dimensions(groups["C3"], 2, (-2, 2)).as_list() == [0] * 5


@pytest.mark.parametrize("name, p", [("S3", 3), ("C6", 3), ("C2", 2)])
def test_anderson_tate_prediction(groups, name, p):
    report = squeeze.anderson_tate_check(groups[name], p, (-3, 3))
    assert report.passed, report.mismatches


def test_anderson_tate_report_fields(groups):
    report = squeeze.anderson_tate_check(groups["S3"], 3, (-2, 2))
    assert report.p_quotient_order == 1
    assert report.h1 == 0
    assert not report.p_nilpotent


@pytest.mark.parametrize("name, p", [("S3", 3), ("A4", 2), ("C2", 2)])
def test_projective_start(groups, name, p):
    assert squeeze.projective_start_check(groups[name], p)


def test_kunneth_for_product(groups):
    window = (0, 3)
    c3 = squeeze.loops_table(groups["C3"], 3, window)
    s3 = squeeze.loops_table(groups["S3"], 3, window)
    predicted = squeeze.kunneth_prediction(c3, s3, window, "C3xS3")
    assert predicted.as_list() == [3, 0, 3, 3]
    assert squeeze.loops_table(groups["C3xS3"], 3, window).as_list() == predicted.as_list()


def test_kunneth_needs_wide_factor_tables(groups):
    short = squeeze.loops_table(groups["C3"], 3, (0, 1))
    with pytest.raises(InsufficientTraceError):
        squeeze.kunneth_prediction(short, short, (0, 3))


def test_betti_table_tsv(groups):
    table = squeeze.loops_table(groups["C2"], 2, (0, 2))
    assert table.to_tsv() == "# kind=loops group=C2 p=2 seed=0\n0\t2\n1\t0\n2\t0\n"


@pytest.mark.parametrize("name, p, top", [("S3", 3, 5), ("A4", 2, 3), ("C6", 3, 3)])
def test_cohomology_dims_match_homology(groups, name, p, top):
    g = groups[name]
    assert squeeze.cohomology_table(g, p, (0, top)).as_list() == squeeze.loops_table(g, p, (0, top)).as_list()
