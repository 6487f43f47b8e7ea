"""Bundled example: a four-organization public-finance network tracked
over four quarters, with raw indicator files for every period.

Useful as a demo store, as seed data for the web UI, and as a realistic
end-to-end fixture.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .cli import parse_matrix_file, parse_maturity_file
from .jsonio import read_document
from .model import BcnModel, PeriodId, canonical_period, model_from_document
from .scoring import CompatibilityMatrix, MaturityAssessment
from .survey import SnapshotResult, load_indicator_dir
from .timeline import AssessmentRecord, Store

FIXTURE_BCN = "public-finance"
QUARTERS = ("2010-Q1", "2010-Q2", "2010-Q3", "2010-Q4")


def fixture_path() -> Path:
    return Path(__file__).parent / "fixtures" / "public_finance"


def load_model() -> BcnModel:
    path = fixture_path() / "model.json"
    return model_from_document(read_document(path), source=str(path))


def quarter_inputs(
    label: str,
) -> tuple[PeriodId, list[MaturityAssessment], CompatibilityMatrix, SnapshotResult]:
    """Parse one quarter's maturity, matrix, and indicator files."""
    if label not in QUARTERS:
        raise KeyError(f"no bundled quarter {label!r}; have {', '.join(QUARTERS)}")
    directory = fixture_path() / label
    period = canonical_period(label)
    maturity = parse_maturity_file(directory / "maturity.csv")
    matrix = parse_matrix_file(directory / "matrix.csv")
    result = load_indicator_dir(directory / "indicators", period)
    return period, maturity, matrix, result


def ingest(store: Store, quarters: Sequence[str] = QUARTERS) -> list[AssessmentRecord]:
    """Load the model and record the given quarters into a store."""
    store.put_model(load_model())
    records = []
    for label in quarters:
        period, maturity, matrix, result = quarter_inputs(label)
        records.append(
            store.record_assessment(
                FIXTURE_BCN,
                period,
                maturity,
                matrix,
                result.snapshot,
                provenance=result.provenance,
            )
        )
    return records
