"""Append-only assessment store and trend retrieval.

Layout under the store root, one directory per collaboration network:

    <root>/<bcn_id>/model                     network structure document
    <root>/<bcn_id>/assessments/<ordinal>.<revision>
    <root>/<bcn_id>/.lock                     writer lock

Files are canonical JSON, so the same content is always the same bytes.
Assessments are never rewritten: a correction is a new revision of the
same period ordinal, and the highest revision wins.  Every load
recomputes the scores from the stored inputs and rejects the record if
they drifted more than SCORE_EPSILON (tampering, bit rot, or a buggy
writer).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

from filelock import FileLock

from .errors import ConflictError, DomainError, IntegrityError, NotFoundError, ParseError
from .jsonio import canonical_dumps, loads_document, read_document, write_document
from .model import (
    BcnModel,
    PeriodId,
    canonical_period,
    model_from_document,
    model_to_document,
    validate_model,
)
from .scoring import (
    SCORE_EPSILON,
    CompatibilityMatrix,
    MaturityAssessment,
    PerformanceSnapshot,
    ScoreBreakdown,
    WeightConfig,
    assess,
    breakdown_from_document,
    breakdown_to_document,
    compose_scores,
    matrix_from_document,
    matrix_to_document,
)

ASSESSMENT_FORMAT = "ratlop-assessment/1"

_SAFE_ID = re.compile(r"^[^/\\\x00-\x1f]+$")
_RECORD_NAME = re.compile(r"^(\d+)\.(\d+)$")


def _check_store_id(bcn_id: str) -> str:
    if not bcn_id or bcn_id in (".", "..") or not _SAFE_ID.match(bcn_id):
        raise DomainError(f"unusable network id for storage: {bcn_id!r}")
    return bcn_id


@dataclass(frozen=True)
class AssessmentRecord:
    """One stored (or previewed) period assessment, inputs and scores together.

    `recorded_at` is the persistence timestamp (UTC); None on records that
    were computed but never written (dry runs).
    """

    bcn_id: str
    period: PeriodId
    revision: int
    maturity: tuple[MaturityAssessment, ...]
    matrix: CompatibilityMatrix
    snapshot: PerformanceSnapshot
    scores: ScoreBreakdown
    provenance: Mapping[str, str]
    recorded_at: str | None = None

    @property
    def weights(self) -> WeightConfig:
        return self.scores.weights


def assessment_to_document(record: AssessmentRecord) -> dict:
    return {
        "format": ASSESSMENT_FORMAT,
        "bcn_id": record.bcn_id,
        "period": {"label": record.period.label, "ordinal": record.period.ordinal},
        "revision": record.revision,
        "inputs": {
            "maturity": [
                {"org_id": a.org_id, "imml": a.imml}
                for a in sorted(record.maturity, key=lambda a: a.org_id)
            ],
            "matrix": matrix_to_document(record.matrix),
            "snapshot": {
                "ds": record.snapshot.ds,
                "qos": record.snapshot.qos,
                "ts": record.snapshot.ts,
            },
        },
        "provenance": dict(sorted(record.provenance.items())),
        "scores": breakdown_to_document(record.scores),
        "recorded_at": record.recorded_at,
    }


def assessment_from_document(doc: dict, source: str = "<assessment>") -> AssessmentRecord:
    fmt = doc.get("format")
    if fmt != ASSESSMENT_FORMAT:
        raise ParseError(f"{source}: expected format {ASSESSMENT_FORMAT!r}, got {fmt!r}")
    try:
        period_doc = doc["period"]
        inputs = doc["inputs"]
        snapshot_doc = inputs["snapshot"]
        record = AssessmentRecord(
            bcn_id=str(doc["bcn_id"]),
            period=PeriodId(label=str(period_doc["label"]), ordinal=int(period_doc["ordinal"])),
            revision=int(doc["revision"]),
            maturity=tuple(
                MaturityAssessment(org_id=str(m["org_id"]), imml=m["imml"])
                for m in inputs["maturity"]
            ),
            matrix=matrix_from_document(inputs["matrix"], source),
            snapshot=PerformanceSnapshot(
                ds=float(snapshot_doc["ds"]),
                qos=float(snapshot_doc["qos"]),
                ts=float(snapshot_doc["ts"]),
            ),
            scores=breakdown_from_document(doc["scores"], source),
            provenance={str(k): str(v) for k, v in (doc.get("provenance") or {}).items()},
            recorded_at=None if doc.get("recorded_at") is None else str(doc["recorded_at"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{source}: malformed assessment document: {exc}") from exc
    if record.revision < 1:
        raise ParseError(f"{source}: revision must be >= 1, got {record.revision}")
    return record


def verify_record(record: AssessmentRecord, source: str = "<assessment>") -> None:
    """Recompute scores from the record's inputs; mismatch means the record lies."""
    expected = compose_scores(record.maturity, record.matrix, record.snapshot, record.weights)
    stored = record.scores
    for name, got, want in (
        ("pi", stored.pi, expected.pi),
        ("dc", stored.dc, expected.dc),
        ("po", stored.po, expected.po),
        ("ratlop", stored.ratlop, expected.ratlop),
    ):
        if abs(got - want) > SCORE_EPSILON:
            raise IntegrityError(
                f"{source}: stored {name}={got!r} disagrees with recomputed {want!r}"
            )
    for org_id, got in stored.per_org_pi.items():
        want = expected.per_org_pi.get(org_id)
        if want is None or abs(got - want) > SCORE_EPSILON:
            raise IntegrityError(
                f"{source}: stored per-organization potentiality for {org_id!r} "
                f"disagrees with recomputation"
            )


class Store:
    """Filesystem-backed store for network models and their assessments."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    # -- paths ---------------------------------------------------------

    def _bcn_dir(self, bcn_id: str) -> Path:
        return self.root / _check_store_id(bcn_id)

    def _model_path(self, bcn_id: str) -> Path:
        return self._bcn_dir(bcn_id) / "model"

    def _assessments_dir(self, bcn_id: str) -> Path:
        return self._bcn_dir(bcn_id) / "assessments"

    def _lock(self, bcn_id: str) -> FileLock:
        bcn_dir = self._bcn_dir(bcn_id)
        bcn_dir.mkdir(parents=True, exist_ok=True)
        return FileLock(bcn_dir / ".lock")

    # -- models --------------------------------------------------------

    def put_model(self, model: BcnModel) -> bool:
        """Create or replace a network model.  Returns True on first create.

        Structural violations reject the write; `details` carries one
        entry per violation for error reporting.
        """
        violations = validate_model(model)
        if violations:
            raise DomainError(
                f"model {model.bcn_id!r} has {len(violations)} structural "
                f"violation{'s' if len(violations) != 1 else ''}",
                details=[
                    {"rule": v.rule, "subject": v.subject, "message": v.message}
                    for v in violations
                ],
            )
        path = self._model_path(model.bcn_id)
        with self._lock(model.bcn_id):
            created = not path.exists()
            write_document(path, model_to_document(model))
        return created

    def has_bcn(self, bcn_id: str) -> bool:
        return self._model_path(bcn_id).exists()

    def get_model_text(self, bcn_id: str) -> str:
        path = self._model_path(bcn_id)
        if not path.exists():
            raise NotFoundError(f"no network {bcn_id!r} in store")
        return path.read_text(encoding="utf-8")

    def get_model(self, bcn_id: str) -> BcnModel:
        text = self.get_model_text(bcn_id)
        return model_from_document(loads_document(text, source=str(self._model_path(bcn_id))))

    def list_bcns(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(
            entry.name
            for entry in self.root.iterdir()
            if entry.is_dir() and (entry / "model").exists()
        )

    # -- assessments ---------------------------------------------------

    def _scan_revisions(self, bcn_id: str) -> dict[int, list[int]]:
        """ordinal -> sorted revisions present on disk."""
        directory = self._assessments_dir(bcn_id)
        found: dict[int, list[int]] = {}
        if directory.exists():
            for entry in directory.iterdir():
                match = _RECORD_NAME.match(entry.name)
                if match:
                    found.setdefault(int(match.group(1)), []).append(int(match.group(2)))
        for revisions in found.values():
            revisions.sort()
        return found

    def revisions(self, bcn_id: str, ordinal: int) -> list[int]:
        if not self.has_bcn(bcn_id):
            raise NotFoundError(f"no network {bcn_id!r} in store")
        return self._scan_revisions(bcn_id).get(ordinal, [])

    def _record_path(self, bcn_id: str, ordinal: int, revision: int) -> Path:
        return self._assessments_dir(bcn_id) / f"{ordinal}.{revision}"

    def record_assessment(
        self,
        bcn_id: str,
        period: PeriodId,
        maturity: Sequence[MaturityAssessment],
        matrix: CompatibilityMatrix,
        snapshot: PerformanceSnapshot,
        weights: WeightConfig | None = None,
        provenance: Mapping[str, str] | None = None,
        scores: ScoreBreakdown | None = None,
        expect_revision: int | None = None,
        dry_run: bool = False,
    ) -> AssessmentRecord:
        """Score and persist one period assessment.

        Callers may hand in pre-computed `scores`; they are verified
        against recomputation before the write (IntegrityError on
        disagreement) and the recomputed values are what gets stored.
        A period already on file gains a new revision; the old one stays.
        `expect_revision` is optimistic concurrency: pass the latest
        revision the caller has seen (0 for "none"), and the write is
        refused if someone else got there first.  `dry_run` computes the
        record without persisting anything.
        """
        model = self.get_model(bcn_id)
        computed = assess(model, maturity, matrix, snapshot, weights or (scores.weights if scores else None))
        if scores is not None:
            for name, claimed, actual in (
                ("pi", scores.pi, computed.pi),
                ("dc", scores.dc, computed.dc),
                ("po", scores.po, computed.po),
                ("ratlop", scores.ratlop, computed.ratlop),
            ):
                if abs(claimed - actual) > SCORE_EPSILON:
                    raise IntegrityError(
                        f"submitted {name}={claimed!r} disagrees with the value "
                        f"recomputed from the inputs ({actual!r})"
                    )
        scores = computed

        with self._lock(bcn_id):
            existing = self._scan_revisions(bcn_id).get(period.ordinal, [])
            if existing:
                latest = self._load_raw(bcn_id, period.ordinal, existing[-1])
                if latest.period.label != period.label:
                    raise DomainError(
                        f"period ordinal {period.ordinal} is already recorded as "
                        f"{latest.period.label!r}; refusing to relabel it {period.label!r}"
                    )
            current = existing[-1] if existing else 0
            if expect_revision is not None and expect_revision != current:
                raise ConflictError(
                    f"period {period.label!r} is at revision {current}, "
                    f"caller expected {expect_revision}"
                )
            record = AssessmentRecord(
                bcn_id=bcn_id,
                period=period,
                revision=current + 1,
                maturity=tuple(sorted(maturity, key=lambda a: a.org_id)),
                matrix=matrix,
                snapshot=snapshot,
                scores=scores,
                provenance=dict(provenance or {}),
                recorded_at=None
                if dry_run
                else datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
            )
            if dry_run:
                return record
            self._assessments_dir(bcn_id).mkdir(parents=True, exist_ok=True)
            write_document(
                self._record_path(bcn_id, period.ordinal, record.revision),
                assessment_to_document(record),
            )
            return record

    def _load_raw(self, bcn_id: str, ordinal: int, revision: int) -> AssessmentRecord:
        path = self._record_path(bcn_id, ordinal, revision)
        if not path.exists():
            raise NotFoundError(
                f"network {bcn_id!r} has no assessment {ordinal}.{revision}"
            )
        try:
            return assessment_from_document(read_document(path), source=str(path))
        except ParseError as exc:
            raise IntegrityError(f"stored assessment {path} is unreadable: {exc}") from exc

    def load_assessment(
        self, bcn_id: str, ordinal: int, revision: int | None = None, verify: bool = True
    ) -> AssessmentRecord:
        """Load one record (latest revision by default), verifying its scores."""
        if not self.has_bcn(bcn_id):
            raise NotFoundError(f"no network {bcn_id!r} in store")
        if revision is None:
            revisions = self._scan_revisions(bcn_id).get(ordinal, [])
            if not revisions:
                raise NotFoundError(f"network {bcn_id!r} has no assessment for ordinal {ordinal}")
            revision = revisions[-1]
        record = self._load_raw(bcn_id, ordinal, revision)
        if verify:
            verify_record(record, source=str(self._record_path(bcn_id, ordinal, revision)))
        return record

    def list_periods(self, bcn_id: str) -> list[PeriodId]:
        """All assessed periods, ascending, taken from each latest revision."""
        if not self.has_bcn(bcn_id):
            raise NotFoundError(f"no network {bcn_id!r} in store")
        periods = []
        for ordinal, revisions in sorted(self._scan_revisions(bcn_id).items()):
            periods.append(self._load_raw(bcn_id, ordinal, revisions[-1]).period)
        return periods

    def resolve_period(self, bcn_id: str, label: str) -> PeriodId:
        """Label -> period: quarter labels parse directly, others need a stored match."""
        try:
            return canonical_period(label)
        except DomainError:
            for period in self.list_periods(bcn_id):
                if period.label == label:
                    return period
            raise NotFoundError(
                f"network {bcn_id!r} has no assessed period labelled {label!r}"
            ) from None

    def latest_assessment(self, bcn_id: str) -> AssessmentRecord:
        """Highest-ordinal period, highest revision — the current as-is state."""
        if not self.has_bcn(bcn_id):
            raise NotFoundError(f"no network {bcn_id!r} in store")
        found = self._scan_revisions(bcn_id)
        if not found:
            raise NotFoundError(f"network {bcn_id!r} has no recorded assessments")
        ordinal = max(found)
        return self.load_assessment(bcn_id, ordinal, found[ordinal][-1])

    def trend(
        self,
        bcn_id: str,
        from_ordinal: int | None = None,
        to_ordinal: int | None = None,
    ) -> list[AssessmentRecord]:
        """Latest-revision records in ascending period order, each verified.

        The optional bounds are inclusive ordinals.
        """
        if not self.has_bcn(bcn_id):
            raise NotFoundError(f"no network {bcn_id!r} in store")
        if from_ordinal is not None and to_ordinal is not None and from_ordinal > to_ordinal:
            raise DomainError(
                f"trend range is inverted: from ordinal {from_ordinal} > to ordinal {to_ordinal}"
            )
        records = []
        for ordinal, revisions in sorted(self._scan_revisions(bcn_id).items()):
            if from_ordinal is not None and ordinal < from_ordinal:
                continue
            if to_ordinal is not None and ordinal > to_ordinal:
                continue
            records.append(self.load_assessment(bcn_id, ordinal, revisions[-1]))
        return records

    def get_trend(
        self,
        bcn_id: str,
        from_ordinal: int | None = None,
        to_ordinal: int | None = None,
    ) -> "Trend":
        return build_trend(self.trend(bcn_id, from_ordinal, to_ordinal))


@dataclass(frozen=True)
class Trend:
    """Aligned per-period score series plus period-over-period deltas."""

    periods: tuple[PeriodId, ...]
    pi_series: tuple[float, ...]
    dc_series: tuple[float, ...]
    po_series: tuple[float, ...]
    ratlop_series: tuple[float, ...]
    #: deltas[i] = ratlop_series[i+1] - ratlop_series[i]
    deltas: tuple[float, ...]
    records: tuple[AssessmentRecord, ...]


def build_trend(records: Sequence[AssessmentRecord]) -> Trend:
    ratlops = tuple(r.scores.ratlop for r in records)
    return Trend(
        periods=tuple(r.period for r in records),
        pi_series=tuple(r.scores.pi for r in records),
        dc_series=tuple(r.scores.dc for r in records),
        po_series=tuple(r.scores.po for r in records),
        ratlop_series=ratlops,
        deltas=tuple(b - a for a, b in zip(ratlops, ratlops[1:])),
        records=tuple(records),
    )


def trend_entry(record: AssessmentRecord) -> dict:
    """Flat trend row used by the API and the CSV export (full precision)."""
    return {
        "period": record.period.label,
        "ordinal": record.period.ordinal,
        "revision": record.revision,
        "pi": record.scores.pi,
        "dc": record.scores.dc,
        "po": record.scores.po,
        "ratlop": record.scores.ratlop,
    }


def record_text(record: AssessmentRecord) -> str:
    """Canonical serialized form; byte-identical to what the store holds."""
    return canonical_dumps(assessment_to_document(record))
