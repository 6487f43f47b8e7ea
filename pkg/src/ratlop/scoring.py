"""The five-step interoperability score computation.

Given one maturity level per organization, a 4x6 incompatibility matrix,
and three operational indicators, produce the period's score breakdown:

    PI  = min over organizations of (level / 5)         potentiality
    DC  = 1 - marked_cells / 24                         compatibility
    PO  = (DS * QoS * TS) ** (1/3)                      operational performance
    Ratlop = weighted arithmetic mean of PI, DC, PO

All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DomainError
from .model import BarrierCategory, BcnModel, ConcernLevel

CELL_COUNT = 24
MATRIX_ROWS = 4
MATRIX_COLS = 6

#: Comparison tolerance used by consumers when checking stored scores.
SCORE_EPSILON = 1e-9


@dataclass(frozen=True)
class MaturityAssessment:
    """One organization's assessed maturity level for a period."""

    org_id: str
    imml: int

    def __post_init__(self):
        if not isinstance(self.imml, int) or isinstance(self.imml, bool):
            raise DomainError(f"maturity level for {self.org_id!r} must be an integer")
        if not 1 <= self.imml <= 5:
            raise DomainError(
                f"maturity level for {self.org_id!r} must be in 1..5, got {self.imml}"
            )


@dataclass(frozen=True)
class CompatibilityMatrix:
    """4x6 grid of binary incompatibility marks with optional evidence.

    Rows follow concern-level order (business, process, service, data),
    columns the barrier sub-category order.  `evidence` maps 1-based
    (row, col) to the assessor's unresolved findings for that cell.
    """

    cells: tuple[tuple[int, ...], ...]
    evidence: Mapping[tuple[int, int], tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.cells) != MATRIX_ROWS or any(len(row) != MATRIX_COLS for row in self.cells):
            raise DomainError(
                f"compatibility matrix must be {MATRIX_ROWS}x{MATRIX_COLS}"
            )
        for row in self.cells:
            for value in row:
                if value not in (0, 1):
                    raise DomainError(f"matrix cells must be 0 or 1, got {value!r}")
        for key in self.evidence:
            row, col = key
            if not (1 <= row <= MATRIX_ROWS and 1 <= col <= MATRIX_COLS):
                raise DomainError(f"evidence key out of range: {key}")

    @classmethod
    def empty(cls) -> "CompatibilityMatrix":
        return cls(cells=tuple((0,) * MATRIX_COLS for _ in range(MATRIX_ROWS)))

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[Sequence[int]],
        evidence: Mapping[tuple[int, int], Sequence[str]] | None = None,
    ) -> "CompatibilityMatrix":
        cells = tuple(tuple(int(v) for v in row) for row in rows)
        ev = {k: tuple(v) for k, v in (evidence or {}).items()}
        return cls(cells=cells, evidence=ev)

    @classmethod
    def from_evidence(
        cls,
        evidence: Mapping[tuple[int, int], Sequence[str]],
        threshold: int = 1,
    ) -> "CompatibilityMatrix":
        """Mark every cell whose unresolved-finding count reaches `threshold`."""
        if threshold < 1:
            raise DomainError(f"evidence threshold must be >= 1, got {threshold}")
        cells = [[0] * MATRIX_COLS for _ in range(MATRIX_ROWS)]
        for (row, col), findings in evidence.items():
            if not (1 <= row <= MATRIX_ROWS and 1 <= col <= MATRIX_COLS):
                raise DomainError(f"evidence key out of range: {(row, col)}")
            if len(findings) >= threshold:
                cells[row - 1][col - 1] = 1
        return cls(
            cells=tuple(tuple(r) for r in cells),
            evidence={k: tuple(v) for k, v in evidence.items()},
        )

    def cell(self, level: ConcernLevel, barrier: BarrierCategory) -> int:
        return self.cells[level.row - 1][barrier.col - 1]

    def marked_count(self) -> int:
        return sum(sum(row) for row in self.cells)

    def marked_cells(self) -> list[tuple[ConcernLevel, BarrierCategory]]:
        """Marked cells in row-major (concern, barrier) order."""
        out = []
        for level in ConcernLevel:
            for barrier in BarrierCategory:
                if self.cell(level, barrier) == 1:
                    out.append((level, barrier))
        return out

    def evidence_for(self, level: ConcernLevel, barrier: BarrierCategory) -> tuple[str, ...]:
        return tuple(self.evidence.get((level.row, barrier.col), ()))

    def with_cell(
        self, level: ConcernLevel, barrier: BarrierCategory, value: int
    ) -> "CompatibilityMatrix":
        """Copy with one cell replaced; clearing a cell drops its evidence."""
        rows = [list(r) for r in self.cells]
        rows[level.row - 1][barrier.col - 1] = value
        evidence = dict(self.evidence)
        if value == 0:
            evidence.pop((level.row, barrier.col), None)
        return CompatibilityMatrix(
            cells=tuple(tuple(r) for r in rows),
            evidence=evidence,
        )


@dataclass(frozen=True)
class PerformanceSnapshot:
    """The three operational indicators for one period, each in [0, 1]."""

    ds: float
    qos: float
    ts: float

    def __post_init__(self):
        for name, value in (("ds", self.ds), ("qos", self.qos), ("ts", self.ts)):
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"indicator {name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class WeightConfig:
    """Aggregation weights; equal weights reduce to the plain mean."""

    w_pi: float = 1.0
    w_dc: float = 1.0
    w_po: float = 1.0

    def __post_init__(self):
        for name, value in (("w_pi", self.w_pi), ("w_dc", self.w_dc), ("w_po", self.w_po)):
            if value < 0:
                raise DomainError(f"weight {name} must be non-negative, got {value}")
        if self.total() <= 0:
            raise DomainError("at least one aggregation weight must be positive")

    def total(self) -> float:
        return self.w_pi + self.w_dc + self.w_po


@dataclass(frozen=True)
class ScoreBreakdown:
    pi: float
    dc: float
    po: float
    ratlop: float
    weights: WeightConfig
    per_org_pi: Mapping[str, float]


def quantify_potentiality(imml: int) -> float:
    """Map a maturity level 1..5 to its potentiality fraction.

    Computed as imml / 5 so the five published quantification values
    (0.2, 0.4, 0.6, 0.8, 1.0) are reproduced exactly in binary floats.
    """
    if not isinstance(imml, int) or isinstance(imml, bool):
        raise DomainError(f"maturity level must be an integer, got {imml!r}")
    if not 1 <= imml <= 5:
        raise DomainError(f"maturity level must be in 1..5, got {imml}")
    return imml / 5


def aggregate_potentiality(
    assessments: Sequence[MaturityAssessment],
) -> tuple[float, dict[str, float]]:
    """Minimum of per-organization potentialities; the weakest member bounds the network."""
    if not assessments:
        raise DomainError("potentiality aggregation needs at least one assessment")
    per_org: dict[str, float] = {}
    for assessment in assessments:
        if assessment.org_id in per_org:
            raise DomainError(f"duplicate maturity assessment for {assessment.org_id!r}")
        per_org[assessment.org_id] = quantify_potentiality(assessment.imml)
    return min(per_org.values()), per_org


def compute_compatibility(matrix: CompatibilityMatrix) -> float:
    """DC = 1 - marked/24.

    Evaluated as (24 - marked) / 24, the correctly rounded double of the
    exact rational value.
    """
    return (CELL_COUNT - matrix.marked_count()) / CELL_COUNT


def compute_performance(snapshot: PerformanceSnapshot) -> float:
    """Geometric mean of the three indicators; one zero factor zeroes it."""
    return (snapshot.ds * snapshot.qos * snapshot.ts) ** (1 / 3)


def compute_ratlop(pi: float, dc: float, po: float, weights: WeightConfig | None = None) -> float:
    """Weighted arithmetic mean of the three component scores."""
    weights = weights or WeightConfig()
    for name, value in (("pi", pi), ("dc", dc), ("po", po)):
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"component {name} must be in [0, 1], got {value}")
    total = weights.total()
    if total <= 0:
        raise DomainError("at least one aggregation weight must be positive")
    return (weights.w_pi * pi + weights.w_dc * dc + weights.w_po * po) / total


def compose_scores(
    maturity: Sequence[MaturityAssessment],
    matrix: CompatibilityMatrix,
    snapshot: PerformanceSnapshot,
    weights: WeightConfig | None = None,
) -> ScoreBreakdown:
    """Run the scoring pipeline on already-validated inputs."""
    weights = weights or WeightConfig()
    pi, per_org = aggregate_potentiality(maturity)
    dc = compute_compatibility(matrix)
    po = compute_performance(snapshot)
    ratlop = compute_ratlop(pi, dc, po, weights)
    return ScoreBreakdown(pi=pi, dc=dc, po=po, ratlop=ratlop, weights=weights, per_org_pi=per_org)


def assess(
    model: BcnModel,
    maturity: Sequence[MaturityAssessment],
    matrix: CompatibilityMatrix,
    snapshot: PerformanceSnapshot,
    weights: WeightConfig | None = None,
) -> ScoreBreakdown:
    """Full assessment against a network model.

    Requires exactly one maturity assessment per organization in the model.
    """
    model_orgs = set(model.org_ids())
    assessed: set[str] = set()
    for assessment in maturity:
        if assessment.org_id in assessed:
            raise DomainError(f"duplicate maturity assessment for {assessment.org_id!r}")
        assessed.add(assessment.org_id)
    missing = sorted(model_orgs - assessed)
    extra = sorted(assessed - model_orgs)
    if missing:
        raise DomainError(f"missing maturity assessment for organizations: {', '.join(missing)}")
    if extra:
        raise DomainError(f"maturity assessment for unknown organizations: {', '.join(extra)}")
    return compose_scores(maturity, matrix, snapshot, weights)


# --- document fragments ----------------------------------------------------


def matrix_to_document(matrix: CompatibilityMatrix) -> dict:
    return {
        "cells": [list(row) for row in matrix.cells],
        "evidence": {f"{row},{col}": list(v) for (row, col), v in sorted(matrix.evidence.items())},
    }


def matrix_from_document(doc: dict, source: str = "<matrix>") -> CompatibilityMatrix:
    cells = doc.get("cells")
    if not isinstance(cells, list):
        raise DomainError(f"{source}: matrix document needs a 'cells' array")
    evidence: dict[tuple[int, int], tuple[str, ...]] = {}
    for key, findings in (doc.get("evidence") or {}).items():
        try:
            row_s, col_s = key.split(",")
            coords = (int(row_s), int(col_s))
        except (ValueError, AttributeError):
            raise DomainError(f"{source}: evidence keys must look like 'row,col', got {key!r}") from None
        if not isinstance(findings, (list, tuple)) or not all(isinstance(f, str) for f in findings):
            raise DomainError(f"{source}: evidence for {key!r} must be a list of strings")
        evidence[coords] = tuple(findings)
    try:
        return CompatibilityMatrix.from_rows(cells, evidence)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{source}: malformed matrix cells: {exc}") from exc


def breakdown_to_document(scores: ScoreBreakdown) -> dict:
    return {
        "pi": scores.pi,
        "dc": scores.dc,
        "po": scores.po,
        "ratlop": scores.ratlop,
        "weights": {"w_pi": scores.weights.w_pi, "w_dc": scores.weights.w_dc, "w_po": scores.weights.w_po},
        "per_org_pi": dict(sorted(scores.per_org_pi.items())),
    }


def breakdown_from_document(doc: dict, source: str = "<scores>") -> ScoreBreakdown:
    try:
        weights_doc = doc["weights"]
        return ScoreBreakdown(
            pi=float(doc["pi"]),
            dc=float(doc["dc"]),
            po=float(doc["po"]),
            ratlop=float(doc["ratlop"]),
            weights=WeightConfig(
                w_pi=float(weights_doc["w_pi"]),
                w_dc=float(weights_doc["w_dc"]),
                w_po=float(weights_doc["w_po"]),
            ),
            per_org_pi={str(k): float(v) for k, v in doc["per_org_pi"].items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"{source}: malformed score breakdown: {exc}") from exc
