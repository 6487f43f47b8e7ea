"""HTTP service over the store: models, assessments, trends, planning.

Responses are rendered through the canonical JSON serializer, so the
same store state and request always produce the same bytes, and every
score in a response is exactly the value the scoring pipeline computed.

Error bodies all share one shape:

    {"error": {"code": "...", "message": "...", "details": ...}}

with `code` from the closed set shared with the library exceptions.
"""

from __future__ import annotations

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import __version__
from .errors import DomainError, RatlopError
from .jsonio import canonical_dumps, loads_document
from .model import canonical_period, model_from_document
from .planner import cost_model_from_document, plan_for_latest, scenario_to_document
from .scoring import (
    MaturityAssessment,
    PerformanceSnapshot,
    WeightConfig,
    matrix_from_document,
)
from .survey import (
    AggregationMode,
    SnapshotConfig,
    build_snapshot,
    parse_link_csv,
    parse_server_csv,
    parse_survey_csv,
)
from .timeline import Store, assessment_to_document, trend_entry

STATUS_BY_CODE = {
    "validation": 422,
    "not_found": 404,
    "integrity": 409,
    "infeasible": 422,
    "conflict": 409,
}


class _TransportError(Exception):
    """Request-envelope problem (wrong media type etc.), outside the domain codes."""

    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


def _json(body: dict, status: int = 200) -> Response:
    return Response(canonical_dumps(body), status_code=status, media_type="application/json")


def _error(code: str, message: str, details: object = None, status: int | None = None) -> Response:
    body = {"error": {"code": code, "message": message, "details": details}}
    return _json(body, status or STATUS_BY_CODE.get(code, 422))


async def _read_json(request: Request) -> dict:
    content_type = request.headers.get("content-type", "")
    if content_type.split(";")[0].strip().lower() != "application/json":
        raise _TransportError(415, f"expected content-type application/json, got {content_type!r}")
    raw = await request.body()
    return loads_document(raw.decode("utf-8", errors="replace"), source="<request body>")


def _parse_weights(doc: object) -> WeightConfig | None:
    if doc is None:
        return None
    if not isinstance(doc, dict):
        raise DomainError("weights must be an object with w_pi / w_dc / w_po")
    try:
        return WeightConfig(
            w_pi=float(doc.get("w_pi", 1.0)),
            w_dc=float(doc.get("w_dc", 1.0)),
            w_po=float(doc.get("w_po", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise DomainError(f"malformed weights: {exc}") from exc


def _parse_maturity(doc: object) -> list[MaturityAssessment]:
    if not isinstance(doc, list) or not doc:
        raise DomainError("maturity must be a non-empty array of {org_id, imml} objects")
    out = []
    for entry in doc:
        if not isinstance(entry, dict) or "org_id" not in entry or "imml" not in entry:
            raise DomainError("each maturity entry needs org_id and imml")
        out.append(MaturityAssessment(org_id=str(entry["org_id"]), imml=entry["imml"]))
    return out


def _parse_snapshot_inputs(body: dict, period) -> tuple[PerformanceSnapshot, dict[str, str]]:
    has_snapshot = body.get("snapshot") is not None
    has_indicators = body.get("indicators") is not None
    if has_snapshot == has_indicators:
        raise DomainError("provide exactly one of 'snapshot' or 'indicators'")
    if has_snapshot:
        doc = body["snapshot"]
        if not isinstance(doc, dict):
            raise DomainError("snapshot must be an object with ds / qos / ts")
        try:
            snapshot = PerformanceSnapshot(
                ds=float(doc["ds"]), qos=float(doc["qos"]), ts=float(doc["ts"])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed snapshot: {exc}") from exc
        return snapshot, {"ds": "direct", "qos": "direct", "ts": "direct"}

    doc = body["indicators"]
    if not isinstance(doc, dict):
        raise DomainError("indicators must be an object")
    try:
        config = SnapshotConfig(
            scale_max=int(doc.get("scale_max", 5)),
            server_mode=AggregationMode(doc.get("server_mode", "mean")),
            link_mode=AggregationMode(doc.get("link_mode", "mean")),
            ds_override=None if doc.get("ds_override") is None else float(doc["ds_override"]),
            qos_override=None if doc.get("qos_override") is None else float(doc["qos_override"]),
            ts_override=None if doc.get("ts_override") is None else float(doc["ts_override"]),
        )
    except (TypeError, ValueError) as exc:
        raise DomainError(f"malformed indicator settings: {exc}") from exc
    servers = (
        parse_server_csv(str(doc["servers_csv"]), period, "servers_csv")
        if doc.get("servers_csv") is not None
        else []
    )
    links = (
        parse_link_csv(str(doc["links_csv"]), period, "links_csv")
        if doc.get("links_csv") is not None
        else []
    )
    responses = (
        parse_survey_csv(str(doc["surveys_csv"]), period, config.scale_max, "surveys_csv")
        if doc.get("surveys_csv") is not None
        else []
    )
    result = build_snapshot(servers, links, responses, config)
    return result.snapshot, result.provenance


def create_app(store: Store) -> FastAPI:
    app = FastAPI(title="ratlop", openapi_url=None, docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RatlopError)
    async def _domain_error(request: Request, exc: RatlopError):
        details = exc.details
        if details is None and getattr(exc, "line", None) is not None:
            details = {"line": exc.line}
        return _error(exc.code, str(exc), details)

    @app.exception_handler(_TransportError)
    async def _transport_error(request: Request, exc: _TransportError):
        return _error("validation", str(exc), status=exc.status)

    @app.get("/health")
    async def health():
        return _json({"status": "ok", "version": __version__})

    @app.put("/bcns/{bcn_id}")
    async def put_bcn(bcn_id: str, request: Request):
        doc = await _read_json(request)
        model = model_from_document(doc, source="<request body>")
        if model.bcn_id != bcn_id:
            raise DomainError(
                f"document bcn_id {model.bcn_id!r} does not match the path id {bcn_id!r}"
            )
        created = store.put_model(model)
        return _json({"bcn_id": bcn_id, "created": created}, status=201 if created else 200)

    @app.get("/bcns/{bcn_id}")
    async def get_bcn(bcn_id: str):
        return Response(store.get_model_text(bcn_id), media_type="application/json")

    @app.post("/bcns/{bcn_id}/assessments/{period_label}")
    async def post_assessment(bcn_id: str, period_label: str, request: Request):
        body = await _read_json(request)
        ordinal = body.get("ordinal")
        if ordinal is not None and not isinstance(ordinal, int):
            raise DomainError("ordinal must be an integer")
        period = canonical_period(period_label, ordinal)
        maturity = _parse_maturity(body.get("maturity"))
        if body.get("matrix") is None:
            raise DomainError("assessment needs a 'matrix'")
        matrix = matrix_from_document(body["matrix"], source="matrix")
        snapshot, provenance = _parse_snapshot_inputs(body, period)
        weights = _parse_weights(body.get("weights"))
        expect_revision = body.get("expect_revision")
        if expect_revision is not None and not isinstance(expect_revision, int):
            raise DomainError("expect_revision must be an integer")
        dry_run = bool(body.get("dry_run", False))
        record = store.record_assessment(
            bcn_id,
            period,
            maturity,
            matrix,
            snapshot,
            weights=weights,
            provenance=provenance,
            expect_revision=expect_revision,
            dry_run=dry_run,
        )
        return _json(assessment_to_document(record), status=200 if dry_run else 201)

    @app.get("/bcns/{bcn_id}/trend")
    async def get_trend(bcn_id: str, request: Request):
        def bound(name: str) -> int | None:
            raw = request.query_params.get(name)
            if raw is None or raw == "":
                return None
            if raw.lstrip("-").isdigit():
                return int(raw)
            return store.resolve_period(bcn_id, raw).ordinal

        trend = store.get_trend(bcn_id, bound("from"), bound("to"))
        return _json(
            {
                "bcn_id": bcn_id,
                "points": [trend_entry(r) for r in trend.records],
                "deltas": list(trend.deltas),
            }
        )

    @app.post("/bcns/{bcn_id}/plan")
    async def post_plan(bcn_id: str, request: Request):
        body = await _read_json(request)
        if "target" not in body:
            raise DomainError("plan request needs a 'target'")
        try:
            target = float(body["target"])
        except (TypeError, ValueError) as exc:
            raise DomainError(f"malformed target: {exc}") from exc
        costs = (
            cost_model_from_document(body["costs"], source="costs")
            if body.get("costs") is not None
            else None
        )
        weights = _parse_weights(body.get("weights"))
        try:
            budget = float(body.get("time_budget_s", 10.0))
        except (TypeError, ValueError) as exc:
            raise DomainError(f"malformed time_budget_s: {exc}") from exc
        if budget <= 0:
            raise DomainError(f"time_budget_s must be positive, got {budget}")
        scenario = plan_for_latest(
            store, bcn_id, target, weights=weights, costs=costs, time_budget_s=budget
        )
        return _json(scenario_to_document(scenario))

    return app
