"""Pydantic models for everything read from or written to disk."""
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

Matrix = List[List[int]]


# =====================================================
# INPUT FILES
# =====================================================

class GroupSpec(BaseModel):
    name: str = ""
    degree: int = Field(ge=1)
    generators: List[List[int]]


class ExpectedTable(BaseModel):
    prime: int
    kind: Literal["loops", "cohomology", "tate", "tate_classical", "norm"]
    window: Optional[Tuple[int, int]] = None
    dims: Optional[List[int]] = None
    verdict: Optional[Literal["iso", "zero"]] = None
    provenance: Literal["PUBLISHED", "TRIVIAL", "DERIVED"] = "DERIVED"

    @model_validator(mode="after")
    def check_shape(self):
        if self.kind == "norm":
            if self.verdict is None:
                raise ValueError("norm expectations need a verdict")
        else:
            if self.window is None or self.dims is None:
                raise ValueError(f"{self.kind} expectations need window and dims")
            lo, hi = self.window
            if len(self.dims) != hi - lo + 1:
                raise ValueError(f"window {self.window} does not match {len(self.dims)} dims")
        return self


class CatalogEntry(BaseModel):
    name: str
    group: Optional[GroupSpec] = None
    group_file: Optional[str] = None
    primes: List[int]
    expected: List[ExpectedTable] = []
    factors: List[str] = []

    @model_validator(mode="after")
    def check_group(self):
        if (self.group is None) == (self.group_file is None):
            raise ValueError(f"{self.name}: give exactly one of group / group_file")
        return self


class GradedModuleSpec(BaseModel):
    """Graded module over k[tau_1..tau_s], either a preset or explicit data.

    Explicit form: `window` [lo, hi], `dims` per degree and for each tau_i a
    mapping degree -> matrix M_d -> M_{d+t_i} (column convention).
    """

    p: int
    preset: Optional[Literal["polynomial", "exterior_polynomial", "truncated_polynomial", "finite"]] = None
    params: Dict[str, int] = {}
    tau_degrees: List[int] = []
    window: Optional[Tuple[int, int]] = None
    dims: Dict[int, int] = {}
    actions: List[Dict[int, Matrix]] = []
    fg_bound: Optional[int] = None
    name: str = ""


class GradedFixture(BaseModel):
    name: str
    module: Optional[GradedModuleSpec] = None
    module_file: Optional[str] = None
    window: Tuple[int, int]
    local: Dict[int, List[int]] = {}
    cech: Dict[int, List[int]] = {}
    radical_exponent: int = 2
    provenance: Literal["PUBLISHED", "TRIVIAL", "DERIVED"] = "DERIVED"


class CatalogFile(BaseModel):
    version: int = 1
    groups: List[CatalogEntry]
    graded_modules: List[GradedFixture] = []


# =====================================================
# SERIALIZED COMPUTATIONS
# =====================================================

class ModuleRecord(BaseModel):
    version: str
    p: int
    dim: int
    gen_actions: List[Matrix]
    name: str = ""


class LeftStepRecord(BaseModel):
    cover_source: ModuleRecord
    cover_matrix: Matrix
    kernel_basis: Matrix
    a_next_basis: Matrix


class LeftTraceRecord(BaseModel):
    version: str
    group: GroupSpec
    p: int
    seed: int
    module_id: str
    a0: ModuleRecord
    steps: List[LeftStepRecord]


class RightStepRecord(BaseModel):
    hull_target: ModuleRecord
    hull_matrix: Matrix
    fixed_basis: Matrix


class RightTraceRecord(BaseModel):
    version: str
    group: GroupSpec
    p: int
    seed: int
    module_id: str
    c0: ModuleRecord
    steps: List[RightStepRecord]


class CacheRecord(BaseModel):
    key: str
    version: str
    kind: str
    payload: str


# =====================================================
# RESULTS
# =====================================================

class BettiTable(BaseModel):
    """Dimensions indexed by degree over a closed window."""

    kind: str
    group: str = ""
    p: int
    seed: int = 0
    window: Tuple[int, int]
    dims: Dict[int, int]

    def dim(self, n: int) -> int:
        return self.dims[n]

    def as_list(self) -> List[int]:
        lo, hi = self.window
        return [self.dims[n] for n in range(lo, hi + 1)]

    def header(self) -> str:
        return f"# kind={self.kind} group={self.group or '?'} p={self.p} seed={self.seed}"

    def to_tsv(self) -> str:
        lo, hi = self.window
        rows = [self.header()] + [f"{n}\t{self.dims[n]}" for n in range(lo, hi + 1)]
        return "\n".join(rows) + "\n"


class GradedBettiTable(BaseModel):
    """dims[j][d] = dimension of the j-th (co)homology in internal degree d."""

    kind: str
    p: int
    s: int
    window: Tuple[int, int]
    dims: Dict[int, Dict[int, int]]

    def dim(self, j: int, d: int) -> int:
        return self.dims.get(j, {}).get(d, 0)

    def row(self, j: int) -> List[int]:
        lo, hi = self.window
        return [self.dim(j, d) for d in range(lo, hi + 1)]

    def to_tsv(self) -> str:
        lo, hi = self.window
        rows = [f"# kind={self.kind} p={self.p} s={self.s}"]
        for j in sorted(self.dims):
            rows += [f"{j}\t{d}\t{self.dim(j, d)}" for d in range(lo, hi + 1)]
        return "\n".join(rows) + "\n"


class NormRecord(BaseModel):
    group: str = ""
    p: int
    verdict: Literal["iso", "zero", "other"]
    p_nilpotent: bool
    consistent: bool
    op_order: int
    matrix: Matrix


class AndersonTateReport(BaseModel):
    group: str = ""
    p: int
    window: Tuple[int, int]
    p_nilpotent: bool
    p_quotient_order: int
    h1: int
    predicted: Dict[int, int]
    computed: Dict[int, int]
    mismatches: List[int]

    @property
    def passed(self) -> bool:
        return not self.mismatches


class RadicalInvarianceReport(BaseModel):
    exponent: int
    base: GradedBettiTable
    powered: GradedBettiTable
    mismatches: List[Tuple[int, int]]

    @property
    def passed(self) -> bool:
        return not self.mismatches


class CheckResult(BaseModel):
    job: str
    name: str
    passed: bool
    detail: str = ""
    provenance: str = ""
    seconds: float = 0.0


class CheckReport(BaseModel):
    results: List[CheckResult]
    seconds: float = 0.0
    peak_rss_mb: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failed(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]
