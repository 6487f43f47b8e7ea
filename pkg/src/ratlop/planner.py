"""Minimum-cost improvement planning.

Given a period's inputs and a score target, find the cheapest set of
improvement actions whose predicted score reaches the target.  The
action space has three independent families:

* raise the network's maturity floor: every organization below the
  chosen floor is raised exactly to it;
* clear marked incompatibility cells, cheapest first (cost depends on
  the cell's barrier family, the gain per cell is uniform);
* raise an operational indicator along a fixed grid (multiples of
  `indicator_step` above its current value, capped at 1.0), paying
  proportionally to the distance climbed.

The search is branch and bound over (floor, cells cleared, three
indicator targets) seeded with the max-everything plan, so a best-so-far
plan always exists; if the time budget runs out the incumbent is
returned flagged non-optimal instead of raising.

Plans compare by cost, then by action count, then by the lexicographic
order of their canonical action keys, so equal-cost searches are
deterministic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Mapping, Sequence

from .errors import DomainError, InfeasibleError
from .model import BarrierCategory, BarrierFamily, ConcernLevel, PeriodId

if TYPE_CHECKING:
    from .timeline import Store
from .scoring import (
    CompatibilityMatrix,
    MaturityAssessment,
    PerformanceSnapshot,
    ScoreBreakdown,
    WeightConfig,
    breakdown_to_document,
    compose_scores,
    compute_ratlop,
)

SCENARIO_FORMAT = "ratlop-scenario/1"

#: Two plan costs within this distance count as a tie and fall through
#: to the structural tie-breaks.
COST_TIE_EPSILON = 1e-9

INDICATOR_ORDER = ("ds", "qos", "ts")


@dataclass(frozen=True)
class CostModel:
    """Effort prices for the three action families."""

    cost_per_maturity_level: float = 5.0
    cost_per_cell: Mapping[BarrierFamily, float] = field(
        default_factory=lambda: {family: 1.0 for family in BarrierFamily}
    )
    cost_per_indicator_step: float = 0.5
    indicator_step: float = 0.05

    def __post_init__(self):
        if self.cost_per_maturity_level <= 0:
            raise DomainError("cost_per_maturity_level must be positive")
        if self.cost_per_indicator_step <= 0:
            raise DomainError("cost_per_indicator_step must be positive")
        for family in BarrierFamily:
            if family not in self.cost_per_cell:
                raise DomainError(f"cost_per_cell is missing the {family.value!r} family")
            if self.cost_per_cell[family] <= 0:
                raise DomainError(f"cost_per_cell[{family.value!r}] must be positive")
        step = self.indicator_step
        if not 0 < step <= 1:
            raise DomainError(f"indicator_step must be in (0, 1], got {step}")
        per_unit = round(1 / step)
        if per_unit < 1 or abs(per_unit * step - 1.0) > 1e-9:
            raise DomainError(
                f"indicator_step must divide 1 evenly, got {step}"
            )

    def cell_cost(self, barrier: BarrierCategory) -> float:
        return self.cost_per_cell[barrier.family]


def cost_model_to_document(costs: CostModel) -> dict:
    return {
        "cost_per_maturity_level": costs.cost_per_maturity_level,
        "cost_per_cell": {family.value: costs.cost_per_cell[family] for family in BarrierFamily},
        "cost_per_indicator_step": costs.cost_per_indicator_step,
        "indicator_step": costs.indicator_step,
    }


def cost_model_from_document(doc: Mapping, source: str = "<costs>") -> CostModel:
    """Parse a cost override document; absent keys keep their defaults."""
    defaults = CostModel()
    per_cell = dict(defaults.cost_per_cell)
    raw_cells = doc.get("cost_per_cell") or {}
    if not isinstance(raw_cells, Mapping):
        raise DomainError(f"{source}: cost_per_cell must be an object")
    for key, value in raw_cells.items():
        try:
            family = BarrierFamily(key)
        except ValueError:
            raise DomainError(f"{source}: unknown barrier family {key!r}") from None
        per_cell[family] = float(value)
    try:
        return CostModel(
            cost_per_maturity_level=float(
                doc.get("cost_per_maturity_level", defaults.cost_per_maturity_level)
            ),
            cost_per_cell=per_cell,
            cost_per_indicator_step=float(
                doc.get("cost_per_indicator_step", defaults.cost_per_indicator_step)
            ),
            indicator_step=float(doc.get("indicator_step", defaults.indicator_step)),
        )
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{source}: malformed cost model: {exc}") from exc


# --- actions ---------------------------------------------------------------


@dataclass(frozen=True)
class RaiseMaturity:
    org_id: str
    from_level: int
    to_level: int
    cost: float

    def sort_key(self):
        return (0, self.org_id)

    def to_document(self) -> dict:
        return {
            "kind": "raise_maturity",
            "org_id": self.org_id,
            "from_level": self.from_level,
            "to_level": self.to_level,
            "cost": self.cost,
        }


@dataclass(frozen=True)
class ClearCell:
    concern: ConcernLevel
    barrier: BarrierCategory
    cost: float

    def sort_key(self):
        return (1, self.concern.row, self.barrier.col)

    def to_document(self) -> dict:
        return {
            "kind": "clear_cell",
            "concern": self.concern.value,
            "barrier": self.barrier.value,
            "row": self.concern.row,
            "col": self.barrier.col,
            "cost": self.cost,
        }


@dataclass(frozen=True)
class RaiseIndicator:
    indicator: str
    from_value: float
    to_value: float
    cost: float

    def sort_key(self):
        return (2, INDICATOR_ORDER.index(self.indicator))

    def to_document(self) -> dict:
        return {
            "kind": "raise_indicator",
            "indicator": self.indicator,
            "from_value": self.from_value,
            "to_value": self.to_value,
            "cost": self.cost,
        }


PlanAction = RaiseMaturity | ClearCell | RaiseIndicator


@dataclass(frozen=True)
class Scenario:
    """One improvement plan: the actions, their cost, and both score states."""

    target: float
    baseline: ScoreBreakdown
    predicted: ScoreBreakdown
    actions: tuple[PlanAction, ...]
    total_cost: float
    optimal: bool
    costs: CostModel
    bcn_id: str | None = None
    base_period: PeriodId | None = None
    base_revision: int | None = None


def scenario_to_document(scenario: Scenario) -> dict:
    basis = None
    if scenario.bcn_id is not None:
        basis = {"bcn_id": scenario.bcn_id}
        if scenario.base_period is not None:
            basis["period"] = {
                "label": scenario.base_period.label,
                "ordinal": scenario.base_period.ordinal,
            }
        if scenario.base_revision is not None:
            basis["revision"] = scenario.base_revision
    return {
        "format": SCENARIO_FORMAT,
        "target": scenario.target,
        "optimal": scenario.optimal,
        "total_cost": scenario.total_cost,
        "baseline": breakdown_to_document(scenario.baseline),
        "predicted": breakdown_to_document(scenario.predicted),
        "actions": [action.to_document() for action in scenario.actions],
        "costs": cost_model_to_document(scenario.costs),
        "basis": basis,
    }


# --- search ----------------------------------------------------------------


def _canonical_actions(actions: Sequence[PlanAction]) -> tuple[PlanAction, ...]:
    return tuple(sorted(actions, key=lambda a: a.sort_key()))


def _plan_cost(actions: Sequence[PlanAction]) -> float:
    """Sum costs in canonical action order so equal plans sum identically."""
    total = 0.0
    for action in _canonical_actions(actions):
        total += action.cost
    return total


def _better(cost_a: float, key_a, cost_b: float, key_b) -> bool:
    """Does candidate a beat candidate b?  Cost first, ties structurally."""
    if cost_a < cost_b - COST_TIE_EPSILON:
        return True
    if cost_a > cost_b + COST_TIE_EPSILON:
        return False
    return key_a < key_b


def _tie_key(actions: tuple[PlanAction, ...]):
    return (len(actions), tuple(action.sort_key() for action in actions))


def _indicator_ladder(value: float, costs: CostModel) -> list[tuple[float, float]]:
    """(target_value, cost) options for one indicator, starting with 'stay put'."""
    options = [(value, 0.0)]
    if value >= 1.0:
        return options
    step = costs.indicator_step
    k = 0
    while True:
        k += 1
        raised = value + k * step
        if raised >= 1.0:
            options.append((1.0, (1.0 - value) / step * costs.cost_per_indicator_step))
            return options
        options.append((raised, (raised - value) / step * costs.cost_per_indicator_step))


def plan_improvement(
    maturity: Sequence[MaturityAssessment],
    matrix: CompatibilityMatrix,
    snapshot: PerformanceSnapshot,
    target: float,
    weights: WeightConfig | None = None,
    costs: CostModel | None = None,
    time_budget_s: float = 10.0,
) -> Scenario:
    """Cheapest action set whose predicted score reaches `target`.

    Raises InfeasibleError when the target exceeds 1.0 (the score of a
    maxed-out network); any target up to 1.0 is reachable.
    """
    if target < 0:
        raise DomainError(f"target must be non-negative, got {target}")
    weights = weights or WeightConfig()
    costs = costs or CostModel()
    baseline = compose_scores(maturity, matrix, snapshot, weights)

    def scenario_for(actions: tuple[PlanAction, ...], optimal: bool) -> Scenario:
        predicted = compose_scores(*_apply_actions(maturity, matrix, snapshot, actions), weights)
        return Scenario(
            target=target,
            baseline=baseline,
            predicted=predicted,
            actions=actions,
            total_cost=_plan_cost(actions),
            optimal=optimal,
            costs=costs,
        )

    if baseline.ratlop >= target:
        return scenario_for((), optimal=True)
    if target > 1.0:
        raise InfeasibleError(
            f"target {target} exceeds 1.0, the score of a fully improved network"
        )

    levels = {a.org_id: a.imml for a in maturity}
    floor0 = min(levels.values())

    # Candidate maturity floors: (pi, actions) per floor choice.
    floor_options: list[tuple[float, tuple[RaiseMaturity, ...]]] = []
    for floor in range(floor0, 6):
        actions = tuple(
            RaiseMaturity(
                org_id=org_id,
                from_level=level,
                to_level=floor,
                cost=(floor - level) * costs.cost_per_maturity_level,
            )
            for org_id, level in sorted(levels.items())
            if level < floor
        )
        floor_options.append((floor / 5, actions))

    # Candidate clear counts: prefix of the marked cells, cheapest first.
    marked = matrix.marked_cells()
    by_price = sorted(
        marked, key=lambda pair: (costs.cell_cost(pair[1]), pair[0].row, pair[1].col)
    )
    clear_options: list[tuple[float, tuple[ClearCell, ...]]] = []
    for count in range(len(marked) + 1):
        dc = (24 - (len(marked) - count)) / 24
        actions = tuple(
            ClearCell(concern=concern, barrier=barrier, cost=costs.cell_cost(barrier))
            for concern, barrier in by_price[:count]
        )
        clear_options.append((dc, actions))

    ladders = [
        _indicator_ladder(snapshot.ds, costs),
        _indicator_ladder(snapshot.qos, costs),
        _indicator_ladder(snapshot.ts, costs),
    ]

    # Seed with the everything-to-the-max plan so a finite bound (and a
    # fallback on timeout) always exists.
    max_actions = _canonical_actions(
        list(floor_options[-1][1])
        + list(clear_options[-1][1])
        + [
            RaiseIndicator(indicator=name, from_value=ladder[0][0], to_value=ladder[-1][0], cost=ladder[-1][1])
            for name, ladder in zip(INDICATOR_ORDER, ladders)
            if len(ladder) > 1
        ]
    )
    best_actions = max_actions
    best_cost = _plan_cost(max_actions)
    best_key = _tie_key(max_actions)

    deadline = time.monotonic() + time_budget_s
    timed_out = False

    for pi, floor_actions in floor_options:
        floor_cost = _plan_cost(floor_actions)
        if floor_cost > best_cost + COST_TIE_EPSILON:
            continue
        # Even a perfect DC and PO cannot save this floor: skip early.
        if compute_ratlop(pi, 1.0, 1.0, weights) < target:
            continue
        for dc, cell_actions in clear_options:
            if timed_out:
                break
            partial = list(floor_actions) + list(cell_actions)
            partial_cost = _plan_cost(partial)
            if partial_cost > best_cost + COST_TIE_EPSILON:
                continue
            if compute_ratlop(pi, dc, 1.0, weights) < target:
                continue
            for ds_value, ds_cost in ladders[0]:
                if time.monotonic() > deadline:
                    timed_out = True
                    break
                for qos_value, qos_cost in ladders[1]:
                    for ts_value, ts_cost in ladders[2]:
                        po = (ds_value * qos_value * ts_value) ** (1 / 3)
                        if compute_ratlop(pi, dc, po, weights) < target:
                            continue
                        candidate = list(partial)
                        if ds_cost > 0.0 or snapshot.ds != ds_value:
                            candidate.append(
                                RaiseIndicator("ds", snapshot.ds, ds_value, ds_cost)
                            )
                        if qos_cost > 0.0 or snapshot.qos != qos_value:
                            candidate.append(
                                RaiseIndicator("qos", snapshot.qos, qos_value, qos_cost)
                            )
                        if ts_cost > 0.0 or snapshot.ts != ts_value:
                            candidate.append(
                                RaiseIndicator("ts", snapshot.ts, ts_value, ts_cost)
                            )
                        actions = _canonical_actions(candidate)
                        cost = _plan_cost(actions)
                        if cost > best_cost + COST_TIE_EPSILON:
                            continue
                        key = _tie_key(actions)
                        if _better(cost, key, best_cost, best_key):
                            best_actions, best_cost, best_key = actions, cost, key
        if timed_out:
            break

    return scenario_for(best_actions, optimal=not timed_out)


def _apply_actions(
    maturity: Sequence[MaturityAssessment],
    matrix: CompatibilityMatrix,
    snapshot: PerformanceSnapshot,
    actions: Sequence[PlanAction],
) -> tuple[tuple[MaturityAssessment, ...], CompatibilityMatrix, PerformanceSnapshot]:
    """Transform period inputs action by action, left to right.

    Each action must be valid against the state it meets: maturity only
    rises, only marked cells can be cleared, indicators only improve.
    """
    levels = {a.org_id: a.imml for a in maturity}
    indicators = {"ds": snapshot.ds, "qos": snapshot.qos, "ts": snapshot.ts}
    for action in actions:
        if isinstance(action, RaiseMaturity):
            if action.org_id not in levels:
                raise DomainError(f"plan raises unknown organization {action.org_id!r}")
            if action.to_level <= levels[action.org_id]:
                raise DomainError(
                    f"raising {action.org_id!r} to level {action.to_level} is not an "
                    f"improvement over its current level {levels[action.org_id]}"
                )
            levels[action.org_id] = action.to_level
        elif isinstance(action, ClearCell):
            if matrix.cell(action.concern, action.barrier) != 1:
                raise DomainError(
                    f"cell ({action.concern.value}, {action.barrier.value}) is "
                    f"already clear; nothing to resolve"
                )
            matrix = matrix.with_cell(action.concern, action.barrier, 0)
        elif isinstance(action, RaiseIndicator):
            if action.indicator not in indicators:
                raise DomainError(f"unknown indicator {action.indicator!r}")
            current = indicators[action.indicator]
            if not current < action.to_value <= 1.0:
                raise DomainError(
                    f"indicator {action.indicator} target {action.to_value} must "
                    f"exceed the current value {current} and stay within 1.0"
                )
            indicators[action.indicator] = action.to_value
        else:
            raise DomainError(f"unknown action {action!r}")
    new_maturity = tuple(
        MaturityAssessment(org_id=org_id, imml=level) for org_id, level in sorted(levels.items())
    )
    new_snapshot = PerformanceSnapshot(
        ds=indicators["ds"], qos=indicators["qos"], ts=indicators["ts"]
    )
    return new_maturity, matrix, new_snapshot


def simulate(
    maturity: Sequence[MaturityAssessment],
    matrix: CompatibilityMatrix,
    snapshot: PerformanceSnapshot,
    actions: Sequence[PlanAction],
    weights: WeightConfig | None = None,
) -> ScoreBreakdown:
    """Score the state the actions would produce, without touching any store."""
    return compose_scores(*_apply_actions(maturity, matrix, snapshot, actions), weights)


def apply_scenario(
    scenario: Scenario,
    maturity: Sequence[MaturityAssessment],
    matrix: CompatibilityMatrix,
    snapshot: PerformanceSnapshot,
) -> tuple[tuple[MaturityAssessment, ...], CompatibilityMatrix, PerformanceSnapshot]:
    """Apply a plan's actions to period inputs, e.g. to stage the next assessment."""
    return _apply_actions(maturity, matrix, snapshot, scenario.actions)


def required_effort(
    maturity: Sequence[MaturityAssessment],
    matrix: CompatibilityMatrix,
    snapshot: PerformanceSnapshot,
    target: float,
    weights: WeightConfig | None = None,
    costs: CostModel | None = None,
    time_budget_s: float = 10.0,
) -> float:
    """Total cost of the cheapest plan reaching `target`; 0 when already met."""
    return plan_improvement(
        maturity, matrix, snapshot, target, weights=weights, costs=costs, time_budget_s=time_budget_s
    ).total_cost


def plan_for_latest(
    store: "Store",
    bcn_id: str,
    target: float,
    weights: WeightConfig | None = None,
    costs: CostModel | None = None,
    time_budget_s: float = 10.0,
) -> Scenario:
    """Plan from a network's most recent stored assessment.

    Weights default to the ones that assessment was scored with.
    """
    base = store.latest_assessment(bcn_id)
    scenario = plan_improvement(
        base.maturity,
        base.matrix,
        base.snapshot,
        target,
        weights=weights or base.weights,
        costs=costs,
        time_budget_s=time_budget_s,
    )
    return replace(
        scenario, bcn_id=bcn_id, base_period=base.period, base_revision=base.revision
    )
