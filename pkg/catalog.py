"""Acceptance catalog: group entries, graded fixtures and the check runner."""
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, List, Tuple

import psutil
from pydantic import ValidationError

import gradedlc
import squeeze
from errors import LemmaViolationError, ParseError, SqueezeError
from permgrp import Group, group_from_spec, is_p_nilpotent, load_group_spec, o_p_subgroup
from records import CatalogEntry, CatalogFile, CheckReport, CheckResult, ExpectedTable, GradedFixture, GroupSpec

logger = logging.getLogger(__name__)

TATE_WINDOW = (-4, 4)
ANDERSON_WINDOW = (-3, 4)
DUALITY_RANGE = (-6, 6)
REGULARITY_TOP = 8
KUNNETH_TOP = 6


# =====================================================
# LOADING
# =====================================================

def load_catalog(path: str | Path) -> Tuple[CatalogFile, Path]:
    path = Path(path)
    try:
        catalog = CatalogFile.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ParseError(f"{path}: {e}") from e
    return catalog, path.parent


def resolve_group_spec(entry: CatalogEntry, base_dir: Path) -> GroupSpec:
    if entry.group is not None:
        spec = entry.group
    else:
        spec = load_group_spec(base_dir / entry.group_file)
    return spec.model_copy(update={"name": entry.name})


def build_jobs(catalog: CatalogFile, base_dir: Path, seed: int = 0) -> List[dict]:
    """One picklable job per (group, prime); graded fixtures follow."""
    specs = {e.name: resolve_group_spec(e, base_dir) for e in catalog.groups}
    jobs = []
    for entry in catalog.groups:
        for p in entry.primes:
            factors = []
            for name in entry.factors:
                if name not in specs:
                    raise ParseError(f"{entry.name}: unknown factor {name}")
                factors.append(specs[name].model_dump())
            jobs.append({
                "type": "group",
                "name": entry.name,
                "group": specs[entry.name].model_dump(),
                "p": p,
                "seed": seed,
                "expected": [t.model_dump() for t in entry.expected if t.prime == p],
                "factors": factors,
            })
    for fixture in catalog.graded_modules:
        if fixture.module is None and fixture.module_file is not None:
            module = gradedlc.load_graded_module(base_dir / fixture.module_file).to_spec()
            fixture = fixture.model_copy(update={"module": module, "module_file": None})
        jobs.append({"type": "graded", "fixture": fixture.model_dump()})
    return jobs


# =====================================================
# GROUP JOBS
# =====================================================

class _GroupRun:
    """Traces computed once per job and reused by the individual checks."""

    def __init__(self, group: Group, p: int, seed: int):
        self.group = group
        self.p = p
        self.seed = seed
        self.left = squeeze.left_squeezed_resolution(group, p, length=REGULARITY_TOP + 1, seed=seed)
        self.right = squeeze.right_squeezed_resolution(group, p, length=2 - TATE_WINDOW[0], seed=seed)

    def loops(self, window) -> list:
        if self.left.length < window[1] + 1:
            self.left = squeeze.left_squeezed_resolution(self.group, self.p, length=window[1] + 1, seed=self.seed)
        return squeeze.squeezed_homology(self.left, window).as_list()

    def cohomology(self, window) -> list:
        if self.right.length < window[1]:
            self.right = squeeze.right_squeezed_resolution(self.group, self.p, length=window[1], seed=self.seed)
        return squeeze.squeezed_cohomology(self.right, window).as_list()

    def tate(self, window) -> list:
        return squeeze.tate_squeezed_homology(self.group, self.p, window, self.seed,
                                              left=self.left, right=self.right).as_list()

    def classical(self, window) -> list:
        return squeeze.classical_tate_dimensions(self.group, self.p, window, self.seed).as_list()


def _run_check(results: list, job: str, name: str, fn: Callable[[], Tuple[bool, str]], provenance: str = ""):
    started = time.perf_counter()
    try:
        passed, detail = fn()
    except SqueezeError as e:
        passed, detail = False, f"{type(e).__name__}: {e}"
    results.append(CheckResult(job=job, name=name, passed=passed, detail=detail, provenance=provenance,
                               seconds=round(time.perf_counter() - started, 3)).model_dump())


def _compare(kind: str, got, want) -> Tuple[bool, str]:
    return got == want, f"{kind}: got {got}, expected {want}"


def run_group_job(job: dict) -> List[dict]:
    spec = GroupSpec.model_validate(job["group"])
    p, seed = job["p"], job["seed"]
    label = f"{job['name']}@p{p}"
    results: List[dict] = []
    try:
        group = group_from_spec(spec)
        run = _GroupRun(group, p, seed)
    except SqueezeError as e:
        results.append(CheckResult(job=label, name="setup", passed=False, detail=str(e)).model_dump())
        return results

    nilpotent = is_p_nilpotent(group, p)
    quotient = o_p_subgroup(group, p).index

    def norm():
        r = squeeze.norm_map(group, p)
        if not r.consistent:
            raise LemmaViolationError(f"norm verdict {r.verdict} with p-nilpotent={r.p_nilpotent}")
        return True, f"{r.verdict} (|O^p|={r.op_order})"

    def trace_checks():
        run.left.check()
        run.right.check()
        return True, f"left {run.left.length}, right {run.right.length}"

    def tate_vanishing():
        dims = run.tate(TATE_WINDOW)
        vanishes = not any(dims)
        return vanishes == nilpotent, f"tate {dims}, p-nilpotent={nilpotent}"

    def degree_zero():
        h0 = run.loops((0, 0))[0]
        c0 = run.cohomology((0, 0))[0]
        return h0 == c0 == quotient, f"H_0={h0}, H^0={c0}, |G/O^p|={quotient}"

    def regularity():
        return _compare("loops", run.loops((0, REGULARITY_TOP)), [group.order] + [0] * REGULARITY_TOP)

    def duality():
        lo, hi = DUALITY_RANGE
        dims = dict(zip(range(lo - 1, hi + 1), run.classical((lo - 1, hi))))
        bad = [n for n in range(lo, hi + 1) if dims[n] != dims[-1 - n]]
        return not bad, f"asymmetric at {bad}" if bad else "symmetric"

    def anderson():
        report = squeeze.anderson_tate_check(group, p, ANDERSON_WINDOW, seed)
        return report.passed, f"mismatches {report.mismatches}" if report.mismatches else "matches prediction"

    def projective_start():
        return squeeze.projective_start_check(group, p, seed), "P(k)_sigma = (Omega k)_sigma"

    _run_check(results, label, "norm", norm)
    _run_check(results, label, "traces", trace_checks)
    _run_check(results, label, "tate_vanishing", tate_vanishing)
    _run_check(results, label, "degree_zero", degree_zero)
    _run_check(results, label, "anderson_tate", anderson)
    _run_check(results, label, "projective_start", projective_start)
    if quotient == group.order:
        _run_check(results, label, "p_group_regularity", regularity)
    if group.order % p == 0:
        _run_check(results, label, "classical_duality", duality)

    if job["factors"]:
        def kunneth():
            tables = []
            for fs in job["factors"]:
                factor = group_from_spec(GroupSpec.model_validate(fs))
                tables.append(squeeze.loops_table(factor, p, (0, KUNNETH_TOP), seed))
            predicted = squeeze.kunneth_prediction(tables[0], tables[1], (0, KUNNETH_TOP)).as_list()
            return _compare("loops", run.loops((0, KUNNETH_TOP)), predicted)

        _run_check(results, label, "kunneth", kunneth)

    for raw in job["expected"]:
        expected = ExpectedTable.model_validate(raw)
        _run_check(results, label, f"expected_{expected.kind}", _expected_check(run, expected),
                   provenance=expected.provenance)
    return results


def _expected_check(run: _GroupRun, expected: ExpectedTable) -> Callable[[], Tuple[bool, str]]:
    def check():
        if expected.kind == "norm":
            return _compare("norm", squeeze.norm_map(run.group, run.p).verdict, expected.verdict)
        compute = {
            "loops": run.loops,
            "cohomology": run.cohomology,
            "tate": run.tate,
            "tate_classical": run.classical,
        }[expected.kind]
        return _compare(expected.kind, compute(tuple(expected.window)), expected.dims)

    return check


# =====================================================
# GRADED FIXTURES
# =====================================================

def run_graded_job(job: dict) -> List[dict]:
    fixture = GradedFixture.model_validate(job["fixture"])
    label = f"graded:{fixture.name}"
    results: List[dict] = []
    try:
        m = gradedlc.module_from_spec(fixture.module)
    except SqueezeError as e:
        results.append(CheckResult(job=label, name="setup", passed=False, detail=str(e)).model_dump())
        return results
    window = tuple(fixture.window)

    def hypotheses():
        gradedlc.hilbert_window(m)
        return True, "central and finitely generated"

    def les():
        bad = gradedlc.long_exact_sequence_check(m, window)
        return not bad, f"fails in degrees {bad}" if bad else "exact"

    def radical():
        report = gradedlc.radical_invariance_check(m, fixture.radical_exponent, window)
        return report.passed, f"mismatches {report.mismatches}" if report.mismatches else "identical"

    def torsion():
        local = gradedlc.local_cohomology(m, window)
        power = max(1, (m.hi - window[1]) // max(m.tau_degrees, default=1))
        direct = gradedlc.torsion_submodule_dims(m, power, window)
        return _compare("H^0", local.row(0), [direct[d] for d in range(window[0], window[1] + 1)])

    _run_check(results, label, "hypotheses", hypotheses)
    _run_check(results, label, "long_exact_sequence", les)
    _run_check(results, label, "radical_invariance", radical)
    _run_check(results, label, "torsion_oracle", torsion)
    if fixture.local:
        def local_values():
            table = gradedlc.local_cohomology(m, window)
            return _compare("local", {j: table.row(j) for j in fixture.local}, dict(fixture.local))

        _run_check(results, label, "expected_local", local_values, provenance=fixture.provenance)
    if fixture.cech:
        def cech_values():
            table = gradedlc.cech_cohomology(m, window)
            return _compare("cech", {j: table.row(j) for j in fixture.cech}, dict(fixture.cech))

        _run_check(results, label, "expected_cech", cech_values, provenance=fixture.provenance)
    return results


def run_job(job: dict) -> List[dict]:
    if job["type"] == "group":
        return run_group_job(job)
    return run_graded_job(job)


# =====================================================
# RUNNER
# =====================================================

def run_catalog(path: str | Path, workers: int = 1, seed: int = 0) -> CheckReport:
    catalog, base_dir = load_catalog(path)
    jobs = build_jobs(catalog, base_dir, seed)
    print(f"📁 {len(jobs)} jobs from {path}", file=sys.stderr)
    started = time.perf_counter()
    process = psutil.Process()
    peak = process.memory_info().rss

    raw: List[dict] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for chunk in pool.map(run_job, jobs):
                raw.extend(chunk)
                peak = max(peak, _tree_rss(process))
    else:
        for job in jobs:
            raw.extend(run_job(job))
            peak = max(peak, process.memory_info().rss)

    report = CheckReport(
        results=[CheckResult.model_validate(r) for r in raw],
        seconds=round(time.perf_counter() - started, 2),
        peak_rss_mb=round(peak / 2 ** 20, 1),
    )
    logger.info("catalog run: %d checks, %d failed, %.1fs", len(report.results), len(report.failed), report.seconds)
    return report


def _tree_rss(process: psutil.Process) -> int:
    total = process.memory_info().rss
    for child in process.children(recursive=True):
        try:
            total += child.memory_info().rss
        except psutil.NoSuchProcess:
            continue
    return total
