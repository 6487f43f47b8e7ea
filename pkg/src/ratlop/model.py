"""Domain model of a business collaboration network (BCN).

A BCN is the scope of one interoperability study: the organizations that
cooperate, their automated business processes, the application services
wiring sub-processes together, and the connections between them.  The
module also carries the two fixed taxonomies the compatibility matrix is
indexed by (four concern levels x six barrier sub-categories), period
identifiers for quarterly monitoring, and structural validation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import DomainError, ParseError

BCN_FORMAT = "ratlop-bcn/1"

_QUARTER_RE = re.compile(r"^(\d{4})-Q([1-4])$")
_UNSAFE_ID = re.compile(r"[/\\\x00-\x1f]")


class ConcernLevel(str, Enum):
    """The four concern levels, in fixed matrix row order."""

    BUSINESS = "business"
    PROCESS = "process"
    SERVICE = "service"
    DATA = "data"

    @property
    def row(self) -> int:
        """1-based matrix row index."""
        return _CONCERN_ROWS[self]

    @classmethod
    def from_row(cls, row: int) -> "ConcernLevel":
        for member, idx in _CONCERN_ROWS.items():
            if idx == row:
                return member
        raise DomainError(f"concern row index out of range: {row}")


_CONCERN_ROWS = {m: i for i, m in enumerate(ConcernLevel, start=1)}


class BarrierFamily(str, Enum):
    CONCEPTUAL = "conceptual"
    ORGANISATIONAL = "organisational"
    TECHNOLOGY = "technology"


class BarrierCategory(str, Enum):
    """The six barrier sub-categories, in fixed matrix column order."""

    CONCEPTUAL_SYNTACTIC = "conceptual_syntactic"
    CONCEPTUAL_SEMANTIC = "conceptual_semantic"
    ORG_AUTHORITIES_RESPONSIBILITIES = "org_authorities_responsibilities"
    ORG_ORGANISATION = "org_organisation"
    TECH_PLATFORM = "tech_platform"
    TECH_COMMUNICATION = "tech_communication"

    @property
    def col(self) -> int:
        """1-based matrix column index."""
        return _BARRIER_COLS[self]

    @property
    def family(self) -> BarrierFamily:
        return _BARRIER_FAMILIES[self]

    @classmethod
    def from_col(cls, col: int) -> "BarrierCategory":
        for member, idx in _BARRIER_COLS.items():
            if idx == col:
                return member
        raise DomainError(f"barrier column index out of range: {col}")


_BARRIER_COLS = {m: i for i, m in enumerate(BarrierCategory, start=1)}
_BARRIER_FAMILIES = {
    BarrierCategory.CONCEPTUAL_SYNTACTIC: BarrierFamily.CONCEPTUAL,
    BarrierCategory.CONCEPTUAL_SEMANTIC: BarrierFamily.CONCEPTUAL,
    BarrierCategory.ORG_AUTHORITIES_RESPONSIBILITIES: BarrierFamily.ORGANISATIONAL,
    BarrierCategory.ORG_ORGANISATION: BarrierFamily.ORGANISATIONAL,
    BarrierCategory.TECH_PLATFORM: BarrierFamily.TECHNOLOGY,
    BarrierCategory.TECH_COMMUNICATION: BarrierFamily.TECHNOLOGY,
}

MATURITY_LEVELS = 5
_GENERIC_LEVEL_NAMES = tuple(f"Level {i}" for i in range(1, MATURITY_LEVELS + 1))


@dataclass(frozen=True)
class MaturityModelRef:
    """A named five-level maturity model.

    Models are data, not code: scoring consumes only the assessed level
    integer, so the reference carries display metadata (names and the
    prerequisites to reach each level).
    """

    model_id: str
    level_count: int = MATURITY_LEVELS
    level_names: tuple[str, ...] = _GENERIC_LEVEL_NAMES
    level_prerequisites: tuple[tuple[str, ...], ...] = ((),) * MATURITY_LEVELS

    def __post_init__(self):
        if self.level_count != MATURITY_LEVELS:
            raise DomainError(
                f"maturity model {self.model_id!r}: level_count must be "
                f"{MATURITY_LEVELS}, got {self.level_count}"
            )
        if len(self.level_names) != self.level_count:
            raise DomainError(
                f"maturity model {self.model_id!r}: expected {self.level_count} "
                f"level names, got {len(self.level_names)}"
            )
        if len(self.level_prerequisites) != self.level_count:
            raise DomainError(
                f"maturity model {self.model_id!r}: expected {self.level_count} "
                f"prerequisite lists, got {len(self.level_prerequisites)}"
            )


# Commonly used five-level models, referenced by id only.
KNOWN_MATURITY_MODELS = {
    model_id: MaturityModelRef(model_id)
    for model_id in ("ITIM", "LISI", "OIMM", "EIMM", "GIMM", "SPICE")
}


@dataclass(frozen=True)
class Organization:
    org_id: str
    name: str
    maturity_model: MaturityModelRef = KNOWN_MATURITY_MODELS["LISI"]


class ProcessKind(str, Enum):
    ELEMENTARY = "elementary"
    COMPOSITE = "composite"


@dataclass(frozen=True)
class BusinessProcess:
    process_id: str
    owner_org: str
    kind: ProcessKind = ProcessKind.ELEMENTARY
    children: tuple[str, ...] = ()


@dataclass(frozen=True)
class ApplicationService:
    service_id: str
    provider_process: str
    name: str


@dataclass(frozen=True)
class Connection:
    connection_id: str
    from_process: str
    to_process: str
    via_service: str | None = None


@dataclass(frozen=True)
class BcnModel:
    bcn_id: str
    organizations: tuple[Organization, ...]
    processes: tuple[BusinessProcess, ...]
    services: tuple[ApplicationService, ...]
    connections: tuple[Connection, ...]
    focus_process: str

    def org_ids(self) -> list[str]:
        return [o.org_id for o in self.organizations]

    def process_ids(self) -> list[str]:
        return [p.process_id for p in self.processes]


@dataclass(frozen=True)
class PeriodId:
    """One assessment period; ordering within a BCN is by `ordinal`."""

    label: str
    ordinal: int

    def __post_init__(self):
        if not self.label:
            raise DomainError("period label must be non-empty")
        if self.ordinal < 0:
            raise DomainError(f"period ordinal must be >= 0, got {self.ordinal}")


def canonical_period(label: str, ordinal: int | None = None) -> PeriodId:
    """Build a PeriodId from a label.

    Quarter labels "YYYY-Qn" get ordinal year*4 + (n-1); any other label
    needs an explicit ordinal.
    """
    if not label:
        raise DomainError("period label must be non-empty")
    match = _QUARTER_RE.match(label)
    if match:
        year, quarter = int(match.group(1)), int(match.group(2))
        derived = year * 4 + (quarter - 1)
        if ordinal is not None and ordinal != derived:
            raise DomainError(
                f"period {label!r}: explicit ordinal {ordinal} contradicts "
                f"the quarter ordinal {derived}"
            )
        return PeriodId(label, derived)
    if ordinal is None:
        raise DomainError(
            f"period label {label!r} is not of the form YYYY-Qn and no "
            f"explicit ordinal was given"
        )
    return PeriodId(label, ordinal)


@dataclass(frozen=True)
class Violation:
    """One structural-validation finding: rule broken, subject id, detail."""

    rule: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.subject}: {self.message}"


def _check_id(violations: list[Violation], kind: str, value: str) -> None:
    if not value:
        violations.append(Violation("identifier", f"<empty {kind}>", f"{kind} id must be non-empty"))
    elif _UNSAFE_ID.search(value) or value in (".", ".."):
        violations.append(Violation("identifier", value, f"{kind} id contains unsafe characters"))


def validate_model(model: BcnModel) -> list[Violation]:
    """Structural validation; violations are data, never exceptions.

    Pure and idempotent: the same model always yields the same report.
    """
    violations: list[Violation] = []

    _check_id(violations, "bcn", model.bcn_id)
    if not model.organizations:
        violations.append(Violation("organizations", model.bcn_id, "model has no organizations"))

    org_ids: set[str] = set()
    for org in model.organizations:
        _check_id(violations, "organization", org.org_id)
        if org.org_id in org_ids:
            violations.append(Violation("duplicate-id", org.org_id, "duplicate organization id"))
        org_ids.add(org.org_id)

    process_ids: set[str] = set()
    for proc in model.processes:
        _check_id(violations, "process", proc.process_id)
        if proc.process_id in process_ids:
            violations.append(Violation("duplicate-id", proc.process_id, "duplicate process id"))
        process_ids.add(proc.process_id)

    for proc in model.processes:
        if proc.owner_org not in org_ids:
            violations.append(
                Violation("owner-org", proc.process_id, f"owner organization {proc.owner_org!r} does not exist")
            )
        if proc.kind is ProcessKind.ELEMENTARY and proc.children:
            violations.append(
                Violation("children", proc.process_id, "elementary process must not have children")
            )
        if proc.kind is ProcessKind.COMPOSITE and not proc.children:
            violations.append(
                Violation("children", proc.process_id, "composite process must have at least one child")
            )
        for child in proc.children:
            if child not in process_ids:
                violations.append(
                    Violation("children", proc.process_id, f"child process {child!r} does not exist")
                )

    violations.extend(_find_cycles(model))

    service_ids: set[str] = set()
    for svc in model.services:
        _check_id(violations, "service", svc.service_id)
        if svc.service_id in service_ids:
            violations.append(Violation("duplicate-id", svc.service_id, "duplicate service id"))
        service_ids.add(svc.service_id)
        if svc.provider_process not in process_ids:
            violations.append(
                Violation(
                    "provider-process", svc.service_id, f"provider process {svc.provider_process!r} does not exist"
                )
            )

    connection_ids: set[str] = set()
    for conn in model.connections:
        _check_id(violations, "connection", conn.connection_id)
        if conn.connection_id in connection_ids:
            violations.append(Violation("duplicate-id", conn.connection_id, "duplicate connection id"))
        connection_ids.add(conn.connection_id)
        for endpoint in (conn.from_process, conn.to_process):
            if endpoint not in process_ids:
                violations.append(
                    Violation("endpoints", conn.connection_id, f"endpoint process {endpoint!r} does not exist")
                )
        if conn.from_process == conn.to_process:
            violations.append(
                Violation("endpoints", conn.connection_id, "connection must link two distinct processes")
            )
        if conn.via_service is not None and conn.via_service not in service_ids:
            violations.append(
                Violation("endpoints", conn.connection_id, f"service {conn.via_service!r} does not exist")
            )

    if model.focus_process not in process_ids:
        violations.append(
            Violation("focus-process", model.focus_process, "focus process does not exist")
        )

    return violations


def _find_cycles(model: BcnModel) -> list[Violation]:
    children = {p.process_id: p.children for p in model.processes}
    violations: list[Violation] = []
    WHITE, GREY, BLACK = 0, 1, 2
    color = {pid: WHITE for pid in children}

    def visit(pid: str) -> None:
        color[pid] = GREY
        for child in children.get(pid, ()):
            if child not in color:
                continue
            if color[child] == GREY:
                violations.append(
                    Violation("cycle", pid, f"process composition cycles through {child!r}")
                )
            elif color[child] == WHITE:
                visit(child)
        color[pid] = BLACK

    for pid in children:
        if color[pid] == WHITE:
            visit(pid)
    return violations


# --- document (de)serialization -------------------------------------------


def model_to_document(model: BcnModel) -> dict:
    return {
        "format": BCN_FORMAT,
        "bcn_id": model.bcn_id,
        "organizations": [
            {
                "org_id": o.org_id,
                "name": o.name,
                "maturity_model": {
                    "model_id": o.maturity_model.model_id,
                    "level_count": o.maturity_model.level_count,
                    "level_names": list(o.maturity_model.level_names),
                    "level_prerequisites": [list(p) for p in o.maturity_model.level_prerequisites],
                },
            }
            for o in model.organizations
        ],
        "processes": [
            {
                "process_id": p.process_id,
                "owner_org": p.owner_org,
                "kind": p.kind.value,
                "children": list(p.children),
            }
            for p in model.processes
        ],
        "services": [
            {"service_id": s.service_id, "provider_process": s.provider_process, "name": s.name}
            for s in model.services
        ],
        "connections": [
            {
                "connection_id": c.connection_id,
                "from_process": c.from_process,
                "to_process": c.to_process,
                "via_service": c.via_service,
            }
            for c in model.connections
        ],
        "focus_process": model.focus_process,
    }


def _require(doc: dict, key: str, kind: type, source: str):
    if key not in doc:
        raise ParseError(f"{source}: missing required key {key!r}")
    value = doc[key]
    if not isinstance(value, kind):
        raise ParseError(f"{source}: key {key!r} must be {kind.__name__}, got {type(value).__name__}")
    return value


def _maturity_model_from(doc: dict, source: str) -> MaturityModelRef:
    model_id = _require(doc, "model_id", str, source)
    if set(doc) == {"model_id"} and model_id in KNOWN_MATURITY_MODELS:
        return KNOWN_MATURITY_MODELS[model_id]
    try:
        return MaturityModelRef(
            model_id=model_id,
            level_count=doc.get("level_count", MATURITY_LEVELS),
            level_names=tuple(doc.get("level_names", _GENERIC_LEVEL_NAMES)),
            level_prerequisites=tuple(tuple(p) for p in doc.get("level_prerequisites", ((),) * MATURITY_LEVELS)),
        )
    except DomainError as exc:
        raise ParseError(f"{source}: {exc}") from exc


def model_from_document(doc: dict, source: str = "<document>") -> BcnModel:
    fmt = doc.get("format")
    if fmt != BCN_FORMAT:
        raise ParseError(f"{source}: expected format {BCN_FORMAT!r}, got {fmt!r}")
    organizations = []
    for entry in _require(doc, "organizations", list, source):
        if not isinstance(entry, dict):
            raise ParseError(f"{source}: organization entries must be objects")
        mm = entry.get("maturity_model")
        organizations.append(
            Organization(
                org_id=_require(entry, "org_id", str, source),
                name=entry.get("name", entry["org_id"]),
                maturity_model=_maturity_model_from(mm, source) if isinstance(mm, dict) else KNOWN_MATURITY_MODELS["LISI"],
            )
        )
    processes = []
    for entry in _require(doc, "processes", list, source):
        if not isinstance(entry, dict):
            raise ParseError(f"{source}: process entries must be objects")
        kind_raw = entry.get("kind", "elementary")
        try:
            kind = ProcessKind(kind_raw)
        except ValueError:
            raise ParseError(f"{source}: unknown process kind {kind_raw!r}") from None
        processes.append(
            BusinessProcess(
                process_id=_require(entry, "process_id", str, source),
                owner_org=_require(entry, "owner_org", str, source),
                kind=kind,
                children=tuple(entry.get("children", ())),
            )
        )
    services = []
    for entry in _require(doc, "services", list, source):
        if not isinstance(entry, dict):
            raise ParseError(f"{source}: service entries must be objects")
        services.append(
            ApplicationService(
                service_id=_require(entry, "service_id", str, source),
                provider_process=_require(entry, "provider_process", str, source),
                name=entry.get("name", entry["service_id"]),
            )
        )
    connections = []
    for entry in _require(doc, "connections", list, source):
        if not isinstance(entry, dict):
            raise ParseError(f"{source}: connection entries must be objects")
        connections.append(
            Connection(
                connection_id=_require(entry, "connection_id", str, source),
                from_process=_require(entry, "from_process", str, source),
                to_process=_require(entry, "to_process", str, source),
                via_service=entry.get("via_service"),
            )
        )
    return BcnModel(
        bcn_id=_require(doc, "bcn_id", str, source),
        organizations=tuple(organizations),
        processes=tuple(processes),
        services=tuple(services),
        connections=tuple(connections),
        focus_process=_require(doc, "focus_process", str, source),
    )
