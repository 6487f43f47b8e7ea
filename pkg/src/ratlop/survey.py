"""Raw operational data -> performance snapshot.

Server availabilities aggregate into DS, network-link availabilities into
QoS, and end-user survey ratings into TS.  CSV imports are atomic: any
malformed row rejects the whole file, with line numbers reported.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

from .errors import DomainError, ParseError
from .model import PeriodId
from .scoring import PerformanceSnapshot

AVAILABILITY_HEADER = ("id", "availability")
SURVEY_HEADER = ("respondent", "rating")


class AggregationMode(str, Enum):
    MEAN = "mean"
    MIN = "min"


@dataclass(frozen=True)
class ServerAvailability:
    server_id: str
    availability: float
    period: PeriodId

    def __post_init__(self):
        if not 0.0 <= self.availability <= 1.0:
            raise DomainError(
                f"server {self.server_id!r}: availability must be in [0, 1], got {self.availability}"
            )


@dataclass(frozen=True)
class LinkAvailability:
    link_id: str
    availability: float
    period: PeriodId

    def __post_init__(self):
        if not 0.0 <= self.availability <= 1.0:
            raise DomainError(
                f"link {self.link_id!r}: availability must be in [0, 1], got {self.availability}"
            )


@dataclass(frozen=True)
class SurveyResponse:
    respondent_id: str
    rating: int
    period: PeriodId

    def __post_init__(self):
        if self.rating < 1:
            raise DomainError(
                f"respondent {self.respondent_id!r}: rating must be >= 1, got {self.rating}"
            )


def normalize_rating(rating: int, scale_max: int) -> float:
    """Min-max normalization of a 1..scale_max rating onto [0, 1]."""
    if scale_max < 2:
        raise DomainError(f"rating scale maximum must be >= 2, got {scale_max}")
    if not 1 <= rating <= scale_max:
        raise DomainError(f"rating must be in 1..{scale_max}, got {rating}")
    return (rating - 1) / (scale_max - 1)


def compute_ts(responses: Sequence[SurveyResponse], scale_max: int) -> float:
    """Mean normalized satisfaction across respondents (uniform weights)."""
    if not responses:
        raise DomainError("satisfaction is undefined without survey responses")
    periods = {r.period for r in responses}
    if len(periods) > 1:
        labels = sorted(p.label for p in periods)
        raise DomainError(f"survey responses span multiple periods: {', '.join(labels)}")
    normalized = []
    for response in responses:
        try:
            normalized.append(normalize_rating(response.rating, scale_max))
        except DomainError as exc:
            raise DomainError(f"respondent {response.respondent_id!r}: {exc}") from exc
    return sum(normalized) / len(normalized)


def aggregate_availability(
    values: Sequence[float], mode: AggregationMode = AggregationMode.MEAN
) -> float:
    if not len(values):
        raise DomainError("availability aggregation needs at least one value")
    for value in values:
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"availability values must be in [0, 1], got {value}")
    if mode is AggregationMode.MIN:
        return min(values)
    return sum(values) / len(values)


@dataclass
class SnapshotConfig:
    """Ingestion settings plus manual override values."""

    scale_max: int = 5
    server_mode: AggregationMode = AggregationMode.MEAN
    link_mode: AggregationMode = AggregationMode.MEAN
    ds_override: float | None = None
    qos_override: float | None = None
    ts_override: float | None = None


@dataclass(frozen=True)
class SnapshotResult:
    snapshot: PerformanceSnapshot
    #: per-indicator provenance, e.g. {"ds": "mean:3", "ts": "override"}
    provenance: dict[str, str]


def build_snapshot(
    servers: Sequence[ServerAvailability],
    links: Sequence[LinkAvailability],
    responses: Sequence[SurveyResponse],
    config: SnapshotConfig | None = None,
) -> SnapshotResult:
    """Aggregate raw data (or overrides) into one snapshot.

    Each indicator needs either raw data or an override; the chosen route
    is recorded in the provenance for auditability.
    """
    config = config or SnapshotConfig()
    provenance: dict[str, str] = {}

    if config.ds_override is not None:
        ds = config.ds_override
        provenance["ds"] = "override"
    elif servers:
        ds = aggregate_availability([s.availability for s in servers], config.server_mode)
        provenance["ds"] = f"{config.server_mode.value}:{len(servers)}"
    else:
        raise DomainError("indicator ds has neither server data nor an override")

    if config.qos_override is not None:
        qos = config.qos_override
        provenance["qos"] = "override"
    elif links:
        qos = aggregate_availability([l.availability for l in links], config.link_mode)
        provenance["qos"] = f"{config.link_mode.value}:{len(links)}"
    else:
        raise DomainError("indicator qos has neither link data nor an override")

    if config.ts_override is not None:
        ts = config.ts_override
        provenance["ts"] = "override"
    elif responses:
        ts = compute_ts(responses, config.scale_max)
        provenance["ts"] = f"survey:{len(responses)}"
    else:
        raise DomainError("indicator ts has neither survey data nor an override")

    return SnapshotResult(snapshot=PerformanceSnapshot(ds=ds, qos=qos, ts=ts), provenance=provenance)


# --- CSV import ------------------------------------------------------------


def _read_rows(text: str, header: tuple[str, str], source: str) -> list[tuple[int, list[str]]]:
    reader = csv.reader(io.StringIO(text))
    rows = [(lineno, row) for lineno, row in enumerate(reader, start=1) if row]
    if not rows:
        raise ParseError(f"{source}: file is empty")
    first_line, first = rows[0]
    if tuple(field.strip() for field in first) != header:
        raise ParseError(
            f"{source}: line {first_line}: expected header {','.join(header)!r}",
            line=first_line,
        )
    return rows[1:]


def _reject_if_errors(errors: list[str], source: str) -> None:
    if errors:
        raise ParseError(
            f"{source}: rejected ({len(errors)} bad row{'s' if len(errors) != 1 else ''}): "
            + "; ".join(errors),
            details=errors,
        )


def parse_availability_csv(text: str, period: PeriodId, source: str = "<csv>") -> list[tuple[str, float]]:
    """Parse an `id,availability` file; returns (id, availability) pairs."""
    out: list[tuple[str, float]] = []
    errors: list[str] = []
    for lineno, row in _read_rows(text, AVAILABILITY_HEADER, source):
        if len(row) != 2:
            errors.append(f"line {lineno}: expected 2 fields, got {len(row)}")
            continue
        ident, raw = row[0].strip(), row[1].strip()
        if not ident:
            errors.append(f"line {lineno}: empty id")
            continue
        try:
            value = float(raw)
        except ValueError:
            errors.append(f"line {lineno}: {raw!r} is not a number")
            continue
        if not 0.0 <= value <= 1.0:
            errors.append(f"line {lineno}: availability {value} outside [0, 1]")
            continue
        out.append((ident, value))
    _reject_if_errors(errors, source)
    return out


def parse_server_csv(text: str, period: PeriodId, source: str = "<servers>") -> list[ServerAvailability]:
    return [
        ServerAvailability(server_id=ident, availability=value, period=period)
        for ident, value in parse_availability_csv(text, period, source)
    ]


def parse_link_csv(text: str, period: PeriodId, source: str = "<links>") -> list[LinkAvailability]:
    return [
        LinkAvailability(link_id=ident, availability=value, period=period)
        for ident, value in parse_availability_csv(text, period, source)
    ]


def parse_survey_csv(
    text: str, period: PeriodId, scale_max: int, source: str = "<surveys>"
) -> list[SurveyResponse]:
    """Parse a `respondent,rating` file against the declared scale."""
    if scale_max < 2:
        raise DomainError(f"rating scale maximum must be >= 2, got {scale_max}")
    out: list[SurveyResponse] = []
    errors: list[str] = []
    for lineno, row in _read_rows(text, SURVEY_HEADER, source):
        if len(row) != 2:
            errors.append(f"line {lineno}: expected 2 fields, got {len(row)}")
            continue
        respondent, raw = row[0].strip(), row[1].strip()
        if not respondent:
            errors.append(f"line {lineno}: empty respondent")
            continue
        try:
            rating = int(raw)
        except ValueError:
            errors.append(f"line {lineno}: {raw!r} is not an integer rating")
            continue
        if not 1 <= rating <= scale_max:
            errors.append(f"line {lineno}: rating {rating} outside 1..{scale_max}")
            continue
        out.append(SurveyResponse(respondent_id=respondent, rating=rating, period=period))
    _reject_if_errors(errors, source)
    return out


def load_indicator_dir(
    directory: str | Path, period: PeriodId, config: SnapshotConfig | None = None
) -> SnapshotResult:
    """Ingest servers.csv / links.csv / surveys.csv from one directory.

    A missing file is only an error if the matching indicator has no
    override in the config.
    """
    directory = Path(directory)
    config = config or SnapshotConfig()

    def read(name: str) -> str | None:
        path = directory / name
        return path.read_text(encoding="utf-8") if path.exists() else None

    servers_text = read("servers.csv")
    links_text = read("links.csv")
    surveys_text = read("surveys.csv")
    servers = (
        parse_server_csv(servers_text, period, str(directory / "servers.csv"))
        if servers_text is not None
        else []
    )
    links = (
        parse_link_csv(links_text, period, str(directory / "links.csv"))
        if links_text is not None
        else []
    )
    responses = (
        parse_survey_csv(surveys_text, period, config.scale_max, str(directory / "surveys.csv"))
        if surveys_text is not None
        else []
    )
    return build_snapshot(servers, links, responses, config)
