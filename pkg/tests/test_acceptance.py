import pytest

import squeeze
from catalog import build_jobs, load_catalog, run_catalog, run_job
from errors import ParseError

pytestmark = pytest.mark.slow


def test_f20_loops_at_five(groups):
    table = squeeze.loops_table(groups["F20"], 5, (0, 8))
    assert table.as_list() == [1, 0, 0, 0, 0, 0, 1, 1, 0]


def test_a4_loops_at_two(groups):
    assert squeeze.loops_table(groups["A4"], 2, (0, 6)).as_list() == [1, 1, 2, 2, 2, 2, 2]


def test_f20_tate_matches_prediction(groups):
    report = squeeze.anderson_tate_check(groups["F20"], 5, (-2, 3))
    assert report.passed, report.mismatches
    assert report.p_quotient_order == 1


def test_jobs_are_built_per_prime(data_dir):
    catalog, base = load_catalog(data_dir / "catalog.json")
    jobs = build_jobs(catalog, base)
    group_jobs = [j for j in jobs if j["type"] == "group"]
    assert len(group_jobs) == sum(len(e.primes) for e in catalog.groups)
    product = [j for j in group_jobs if j["name"] == "C3xS3"]
    assert all(len(j["factors"]) == 2 for j in product)
    assert all(j["fixture"]["module"] is not None for j in jobs if j["type"] == "graded")


def test_single_job(data_dir):
    catalog, base = load_catalog(data_dir / "catalog.json")
    job = next(j for j in build_jobs(catalog, base) if j.get("name") == "S3" and j.get("p") == 3)
    results = run_job(job)
    failed = [r for r in results if not r["passed"]]
    assert not failed, failed
    assert {"norm", "tate_vanishing", "anderson_tate", "expected_loops"} <= {r["name"] for r in results}


def test_unknown_factor(data_dir, tmp_path):
    path = tmp_path / "catalog.json"
    path.write_text(
        '{"groups": [{"name": "X", "group_file": "%s", "primes": [2], "factors": ["C2", "Y"]}]}'
        % (data_dir / "groups" / "C2.json").as_posix(),
        encoding="utf-8",
    )
    catalog, base = load_catalog(path)
    with pytest.raises(ParseError):
        build_jobs(catalog, base)


def test_full_catalog(data_dir):
    report = run_catalog(data_dir / "catalog.json", workers=2)
    assert report.passed, [r for r in report.failed]
    assert report.peak_rss_mb > 0


def test_a4_tate_matches_prediction(groups):
    report = squeeze.anderson_tate_check(groups["A4"], 2, (-2, 3))
    assert report.passed, report.mismatches
    assert report.p_quotient_order == 1
