"""Command-line front end: init, validate, assess, trend, plan.

Every command is a thin composition of library calls plus file parsing;
scores are always printed with six decimals.  Exit codes: 0 success,
1 domain error, 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path
from typing import Sequence

from .errors import DomainError, ParseError, RatlopError
from .jsonio import fmt6, read_document, write_document
from .model import canonical_period, model_from_document, validate_model
from .planner import (
    ClearCell,
    CostModel,
    RaiseIndicator,
    RaiseMaturity,
    cost_model_from_document,
    plan_for_latest,
    scenario_to_document,
)
from .scoring import CompatibilityMatrix, MaturityAssessment, WeightConfig, matrix_from_document
from .survey import AggregationMode, SnapshotConfig, build_snapshot, load_indicator_dir
from .timeline import AssessmentRecord, Store


def _store_from(args) -> Store:
    root = args.store or os.environ.get("RATLOP_STORE")
    if not root:
        raise ParseError("no store configured: pass --store DIR or set RATLOP_STORE")
    return Store(root)


# --- input files -----------------------------------------------------------


def parse_maturity_file(path: str | Path) -> list[MaturityAssessment]:
    """Lines of `org_id,level[,model_id]`; blank lines ignored; all-or-nothing."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    out: list[MaturityAssessment] = []
    errors: list[str] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        parts = [p.strip() for p in stripped.split(",")]
        if len(parts) not in (2, 3):
            errors.append(f"line {lineno}: expected org_id,level[,model_id]")
            continue
        org_id = parts[0]
        if not org_id:
            errors.append(f"line {lineno}: empty org_id")
            continue
        try:
            level = int(parts[1])
        except ValueError:
            errors.append(f"line {lineno}: level {parts[1]!r} is not an integer")
            continue
        try:
            out.append(MaturityAssessment(org_id=org_id, imml=level))
        except DomainError as exc:
            errors.append(f"line {lineno}: {exc}")
    if errors:
        raise ParseError(f"{path}: rejected: " + "; ".join(errors), details=errors)
    if not out:
        raise ParseError(f"{path}: no maturity lines found")
    return out


def parse_matrix_file(path: str | Path, evidence_path: str | Path | None = None) -> CompatibilityMatrix:
    """4 rows x 6 comma-separated 0/1 cells, concern order business/process/service/data."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    rows: list[list[int]] = []
    errors: list[str] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        parts = [p.strip() for p in stripped.split(",")]
        if len(parts) != 6:
            errors.append(f"line {lineno}: expected 6 cells, got {len(parts)}")
            continue
        row = []
        for value in parts:
            if value not in ("0", "1"):
                errors.append(f"line {lineno}: cell {value!r} is not 0 or 1")
                break
            row.append(int(value))
        else:
            rows.append(row)
    if errors:
        raise ParseError(f"{path}: rejected: " + "; ".join(errors), details=errors)
    if len(rows) != 4:
        raise ParseError(f"{path}: expected 4 matrix rows, got {len(rows)}")
    evidence_doc = {}
    if evidence_path is not None:
        evidence_doc = read_document(evidence_path)
    try:
        return matrix_from_document({"cells": rows, "evidence": evidence_doc}, source=str(path))
    except DomainError as exc:
        raise ParseError(str(exc)) from exc


def parse_weights(raw: str) -> WeightConfig:
    parts = raw.split(",")
    if len(parts) != 3:
        raise ParseError(f"weights must be three comma-separated numbers, got {raw!r}")
    try:
        w1, w2, w3 = (float(p) for p in parts)
    except ValueError:
        raise ParseError(f"weights must be numeric, got {raw!r}") from None
    return WeightConfig(w_pi=w1, w_dc=w2, w_po=w3)


# --- commands --------------------------------------------------------------


def cmd_init(args) -> int:
    store = _store_from(args)
    model = model_from_document(read_document(args.model_file), source=str(args.model_file))
    violations = validate_model(model)
    if violations:
        for violation in violations:
            print(violation, file=sys.stderr)
        return 1
    created = store.put_model(model)
    verb = "created" if created else "replaced"
    print(f"{verb} {model.bcn_id} ({len(model.organizations)} organizations) in {store.root}")
    return 0


def cmd_validate(args) -> int:
    model = model_from_document(read_document(args.model_file), source=str(args.model_file))
    violations = validate_model(model)
    if violations:
        for violation in violations:
            print(violation)
        print(f"{len(violations)} violation{'s' if len(violations) != 1 else ''}")
        return 1
    print(f"{model.bcn_id}: ok")
    return 0


def _print_breakdown(record: AssessmentRecord) -> None:
    print(f"{record.bcn_id} {record.period.label} (revision {record.revision})")
    scores = record.scores
    print(f"  potentiality (PI)    {fmt6(scores.pi)}")
    for org_id, value in sorted(scores.per_org_pi.items()):
        print(f"    {org_id:<19}{fmt6(value)}")
    print(f"  compatibility (DC)   {fmt6(scores.dc)}")
    print(f"  performance (PO)     {fmt6(scores.po)}")
    print(f"  ratlop               {fmt6(scores.ratlop)}")
    if record.provenance:
        parts = " ".join(f"{k}={v}" for k, v in sorted(record.provenance.items()))
        print(f"  indicators: {parts}")


def cmd_assess(args) -> int:
    store = _store_from(args)
    period = canonical_period(args.period, args.ordinal)
    maturity = parse_maturity_file(args.maturity_file)
    matrix = parse_matrix_file(args.matrix_file, args.evidence)
    config = SnapshotConfig(
        scale_max=args.scale,
        server_mode=AggregationMode(args.server_mode),
        link_mode=AggregationMode(args.link_mode),
        ds_override=args.ds,
        qos_override=args.qos,
        ts_override=args.ts,
    )
    if args.indicators_dir:
        result = load_indicator_dir(args.indicators_dir, period, config)
    else:
        result = build_snapshot([], [], [], config)
    weights = parse_weights(args.weights) if args.weights else None
    record = store.record_assessment(
        args.bcn,
        period,
        maturity,
        matrix,
        result.snapshot,
        weights=weights,
        provenance=result.provenance,
    )
    _print_breakdown(record)
    return 0


def cmd_trend(args) -> int:
    store = _store_from(args)

    def bound(label: str | None) -> int | None:
        if label is None:
            return None
        if label.lstrip("-").isdigit():
            return int(label)
        return store.resolve_period(args.bcn, label).ordinal

    trend = store.get_trend(args.bcn, bound(args.from_period), bound(args.to_period))
    if not trend.records:
        raise DomainError(f"network {args.bcn!r} has no assessments in the requested range")
    header = f"{'period':<12}{'rev':>4}  {'pi':>9}{'dc':>10}{'po':>10}{'ratlop':>10}{'delta':>10}"
    print(header)
    for index, record in enumerate(trend.records):
        scores = record.scores
        delta = "" if index == 0 else f"{trend.deltas[index - 1]:+.6f}"
        print(
            f"{record.period.label:<12}{record.revision:>4}  "
            f"{fmt6(scores.pi):>9}{fmt6(scores.dc):>10}{fmt6(scores.po):>10}"
            f"{fmt6(scores.ratlop):>10}{delta:>10}"
        )
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["period", "pi", "dc", "po", "ratlop"])
            for record in trend.records:
                scores = record.scores
                writer.writerow(
                    [
                        record.period.label,
                        fmt6(scores.pi),
                        fmt6(scores.dc),
                        fmt6(scores.po),
                        fmt6(scores.ratlop),
                    ]
                )
        print(f"wrote {args.csv}")
    return 0


def _describe_action(action) -> str:
    if isinstance(action, RaiseMaturity):
        return (
            f"raise maturity of {action.org_id}: {action.from_level} -> "
            f"{action.to_level} (cost {fmt6(action.cost)})"
        )
    if isinstance(action, ClearCell):
        return (
            f"clear {action.concern.value} / {action.barrier.value} "
            f"(cost {fmt6(action.cost)})"
        )
    if isinstance(action, RaiseIndicator):
        return (
            f"raise {action.indicator}: {fmt6(action.from_value)} -> "
            f"{fmt6(action.to_value)} (cost {fmt6(action.cost)})"
        )
    raise TypeError(f"unknown action {action!r}")


def cmd_plan(args) -> int:
    store = _store_from(args)
    costs = None
    if args.costs:
        costs = cost_model_from_document(read_document(args.costs), source=str(args.costs))
    scenario = plan_for_latest(
        store, args.bcn, args.target, costs=costs, time_budget_s=args.budget
    )
    if args.out:
        write_document(args.out, scenario_to_document(scenario))
    if not scenario.actions:
        print("no action required")
        print(f"  ratlop {fmt6(scenario.baseline.ratlop)} already meets target {fmt6(scenario.target)}")
        return 0
    print(
        f"target {fmt6(scenario.target)} from {scenario.base_period.label} "
        f"(ratlop {fmt6(scenario.baseline.ratlop)})"
    )
    print(f"predicted ratlop {fmt6(scenario.predicted.ratlop)}")
    print(f"total cost {fmt6(scenario.total_cost)}")
    print("actions:")
    for action in scenario.actions:
        print(f"  {_describe_action(action)}")
    if not scenario.optimal:
        print("note: time budget hit; best plan found so far, optimality not proven")
    if args.out:
        print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratlop",
        description="Periodic interoperability assessment for collaboration networks.",
    )
    parser.add_argument("--store", help="store directory (or set RATLOP_STORE)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_init = sub.add_parser("init", help="load a network model document into the store")
    p_init.add_argument("model_file")
    p_init.set_defaults(func=cmd_init)

    p_validate = sub.add_parser("validate", help="structurally validate a model document")
    p_validate.add_argument("model_file")
    p_validate.set_defaults(func=cmd_validate)

    p_assess = sub.add_parser("assess", help="score one period and record it")
    p_assess.add_argument("bcn")
    p_assess.add_argument("period")
    p_assess.add_argument("maturity_file")
    p_assess.add_argument("matrix_file")
    p_assess.add_argument("indicators_dir", nargs="?")
    p_assess.add_argument("--weights", help="w_pi,w_dc,w_po (default equal)")
    p_assess.add_argument("--evidence", help="JSON file of findings keyed by 'row,col'")
    p_assess.add_argument("--ordinal", type=int, help="period ordinal for non-quarter labels")
    p_assess.add_argument("--ds", type=float, help="override the server availability indicator")
    p_assess.add_argument("--qos", type=float, help="override the link availability indicator")
    p_assess.add_argument("--ts", type=float, help="override the satisfaction indicator")
    p_assess.add_argument("--scale", type=int, default=5, help="survey rating scale maximum")
    p_assess.add_argument("--server-mode", choices=["mean", "min"], default="mean")
    p_assess.add_argument("--link-mode", choices=["mean", "min"], default="mean")
    p_assess.set_defaults(func=cmd_assess)

    p_trend = sub.add_parser("trend", help="print the score series for a network")
    p_trend.add_argument("bcn")
    p_trend.add_argument("from_period", nargs="?", help="first period label or ordinal")
    p_trend.add_argument("to_period", nargs="?", help="last period label or ordinal")
    p_trend.add_argument("--csv", help="also dump the series to this CSV file")
    p_trend.set_defaults(func=cmd_trend)

    p_plan = sub.add_parser("plan", help="plan the cheapest path to a score target")
    p_plan.add_argument("bcn")
    p_plan.add_argument("--target", type=float, required=True)
    p_plan.add_argument("--costs", help="JSON file overriding the effort cost model")
    p_plan.add_argument("--budget", type=float, default=10.0, help="search time budget in seconds")
    p_plan.add_argument("--out", help="write the scenario document to this file")
    p_plan.set_defaults(func=cmd_plan)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RatlopError as exc:
        print(f"error ({exc.code}): {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
