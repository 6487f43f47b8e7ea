"""Periodic interoperability assessment for business collaboration networks.

The pipeline: describe the network (`model`), score a period from
maturity + incompatibility + operational data (`scoring`, `survey`),
keep the append-only history and trend (`timeline`), and plan the
cheapest path to a target score (`planner`).  `api` and `cli` expose
the same operations over HTTP and the shell.
"""

from .errors import (
    ConflictError,
    DomainError,
    InfeasibleError,
    IntegrityError,
    NotFoundError,
    ParseError,
    RatlopError,
)
from .model import (
    BCN_FORMAT,
    KNOWN_MATURITY_MODELS,
    ApplicationService,
    BarrierCategory,
    BarrierFamily,
    BcnModel,
    BusinessProcess,
    ConcernLevel,
    Connection,
    MaturityModelRef,
    Organization,
    PeriodId,
    ProcessKind,
    Violation,
    canonical_period,
    model_from_document,
    model_to_document,
    validate_model,
)
from .planner import (
    ClearCell,
    CostModel,
    RaiseIndicator,
    RaiseMaturity,
    Scenario,
    apply_scenario,
    plan_for_latest,
    plan_improvement,
    required_effort,
    scenario_to_document,
    simulate,
)
from .scoring import (
    CompatibilityMatrix,
    MaturityAssessment,
    PerformanceSnapshot,
    ScoreBreakdown,
    WeightConfig,
    aggregate_potentiality,
    assess,
    compose_scores,
    compute_compatibility,
    compute_performance,
    compute_ratlop,
    quantify_potentiality,
)
from .survey import (
    AggregationMode,
    LinkAvailability,
    ServerAvailability,
    SnapshotConfig,
    SnapshotResult,
    SurveyResponse,
    aggregate_availability,
    build_snapshot,
    compute_ts,
    normalize_rating,
)
from .timeline import (
    ASSESSMENT_FORMAT,
    AssessmentRecord,
    Store,
    Trend,
    assessment_from_document,
    assessment_to_document,
    build_trend,
    trend_entry,
    verify_record,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "RatlopError",
    "DomainError",
    "ParseError",
    "NotFoundError",
    "IntegrityError",
    "InfeasibleError",
    "ConflictError",
    # model
    "BCN_FORMAT",
    "ConcernLevel",
    "BarrierFamily",
    "BarrierCategory",
    "MaturityModelRef",
    "KNOWN_MATURITY_MODELS",
    "Organization",
    "ProcessKind",
    "BusinessProcess",
    "ApplicationService",
    "Connection",
    "BcnModel",
    "PeriodId",
    "canonical_period",
    "Violation",
    "validate_model",
    "model_to_document",
    "model_from_document",
    # scoring
    "MaturityAssessment",
    "CompatibilityMatrix",
    "PerformanceSnapshot",
    "WeightConfig",
    "ScoreBreakdown",
    "quantify_potentiality",
    "aggregate_potentiality",
    "compute_compatibility",
    "compute_performance",
    "compute_ratlop",
    "compose_scores",
    "assess",
    # survey
    "AggregationMode",
    "ServerAvailability",
    "LinkAvailability",
    "SurveyResponse",
    "normalize_rating",
    "compute_ts",
    "aggregate_availability",
    "SnapshotConfig",
    "SnapshotResult",
    "build_snapshot",
    # timeline
    "ASSESSMENT_FORMAT",
    "Store",
    "AssessmentRecord",
    "Trend",
    "assessment_to_document",
    "assessment_from_document",
    "build_trend",
    "trend_entry",
    "verify_record",
    # planner
    "CostModel",
    "RaiseMaturity",
    "ClearCell",
    "RaiseIndicator",
    "Scenario",
    "plan_improvement",
    "plan_for_latest",
    "simulate",
    "apply_scenario",
    "required_effort",
    "scenario_to_document",
]
