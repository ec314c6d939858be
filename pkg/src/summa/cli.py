"""Batch front-end: load a job document, run its tasks, emit reports.

Exit codes: 0 clean, 1 witnessed failure under --strict, 2 schema errors,
3 runtime errors.  Machine reports are bit-stable in exact mode: task
results are serialized with sorted keys and wall-clock timing is kept out
of the machine format.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import __version__
from .document import Document, Task, parse_spec_document
from .errors import SchemaError, SummaError
from .ideals import HorizonParams, Verdict
from .regularity import (
    TargetOperator,
    check_core_inclusion,
    check_maps_to_zero,
    check_regular_family,
    check_regular_singleton,
    check_uniform_core_inclusion,
    reevaluate_witness,
)
from .scalars import as_fraction, scalar_to_json
from .selection import (
    EnumParams,
    test_theorem_equivalence,
    uniform_limit,
    verify_uniform_limsup_identity,
)
from .sets import SetDescriptor
from .sigma import check_almost_regular, sigma_limit
from .model import OperatorEntry

REPORT_SCHEMA_VERSION = 1


@dataclass
class TaskResult:
    task_id: str
    kind: str
    verdicts: list
    mode: str
    horizon: dict
    timing: Optional[float]

    def to_json(self) -> dict:
        return {
            "taskId": self.task_id,
            "kind": self.kind,
            "verdicts": self.verdicts,
            "mode": self.mode,
            "horizon": self.horizon,
            # wall-clock time is non-deterministic; the machine format keeps
            # the field but always serializes it as null
            "timing": None,
        }

    @property
    def has_failure(self) -> bool:
        return any(_is_failure(v) for v in self.verdicts)


def _is_failure(verdict: dict) -> bool:
    if verdict.get("verdict") == Verdict.FAILS.value:
        return True
    return verdict.get("status") == "diverges" and verdict.get("kind") not in (
        "theorem-equivalence",
    )


def _fmt_vec(value) -> Optional[list]:
    if value is None:
        return None
    return [scalar_to_json(c) for c in value]


def _target_from(task_spec: dict, d: int, m: int) -> TargetOperator:
    if "target" not in task_spec:
        if d == m:
            return TargetOperator.identity(d)
        return TargetOperator.zero(m, d)
    grid = [[as_fraction(v) for v in row] for row in task_spec["target"]]
    return TargetOperator(OperatorEntry.of(grid))


def _test_sets_from(task_spec: dict) -> list:
    return [SetDescriptor.from_json(obj) for obj in task_spec.get("testSets", [])]


def _enum_from(task_spec: dict) -> EnumParams:
    obj = task_spec.get("enum", {})
    return EnumParams(
        prefix_len=int(obj.get("prefix", 1)),
        period_len=int(obj.get("period", 2)),
        budget=int(obj.get("budget", 4096)),
    )


def run_task(doc: Document, task: Task, h: HorizonParams) -> list:
    """Execute one task, returning its verdict payloads."""
    spec = task.spec
    kind = task.kind
    if kind == "check-regular":
        family = doc.family(spec["family"])
        target = _target_from(spec, family.d, family.m)
        args = (
            doc.ideal(spec["idealI"]),
            doc.ideal(spec["idealJ"]),
            target,
            h,
            _test_sets_from(spec),
        )
        if family.kappa == 1:
            reports = check_regular_singleton(family[0], *args)
        else:
            reports = check_regular_family(family, *args)
        return [r.to_json() for r in reports]
    if kind == "check-maps-zero":
        family = doc.family(spec["family"])
        reports = check_maps_to_zero(family, doc.ideal(spec["idealJ"]), h)
        return [r.to_json() for r in reports]
    if kind == "check-core-inclusion":
        reports = check_core_inclusion(
            doc.matrix(spec["matrix"]), doc.ideal(spec["idealI"]), h, _test_sets_from(spec)
        )
        return [r.to_json() for r in reports]
    if kind == "check-uniform-core":
        reports = check_uniform_core_inclusion(
            doc.family(spec["family"]), doc.ideal(spec["idealI"]), h, _test_sets_from(spec)
        )
        return [r.to_json() for r in reports]
    if kind == "uniform-limit":
        result = uniform_limit(
            doc.family(spec["family"]), doc.sequence(spec["sequence"]), doc.ideal(spec["ideal"]), h
        )
        return [
            {
                "kind": "uniform-limit",
                "status": result.status,
                "value": _fmt_vec(result.value),
                "certified": result.certified,
                "certificateT": result.certificate_t,
                "witnessPair": list(result.witness_pair) if result.witness_pair else None,
            }
        ]
    if kind == "theorem-equivalence":
        report = test_theorem_equivalence(
            doc.family(spec["family"]),
            doc.sequence(spec["sequence"]),
            doc.ideal(spec["ideal"]),
            h,
            _enum_from(spec),
        )
        return [
            {
                "kind": "theorem-equivalence",
                "i": report.item_i.value,
                "ii": report.item_ii.value,
                "iii": report.item_iii.value,
                "etaUniform": _fmt_vec(report.eta_uniform),
                "etaCommon": _fmt_vec(report.eta_common),
                "witnessSelection": report.witness_selection.to_json()
                if report.witness_selection
                else None,
                "selections": len(report.outcomes),
                "consistent": report.consistent,
                "verdict": Verdict.FAILS.value if not report.consistent else None,
            }
        ]
    if kind == "uniform-limsup":
        report = verify_uniform_limsup_identity(
            doc.family(spec["family"]),
            doc.sequence(spec["sequence"]),
            doc.ideal(spec["ideal"]),
            h,
            _enum_from(spec),
        )
        return [
            {
                "kind": "uniform-limsup",
                "lhs": str(report.lhs),
                "rhsLowerBound": None
                if report.rhs_lower_bound is None
                else str(report.rhs_lower_bound),
                "adversarialRhs": str(report.adversarial_rhs),
                "verdict": report.verdict.value,
            }
        ]
    if kind == "sigma-limit":
        result = sigma_limit(
            doc.sequence(spec["sequence"]),
            doc.sigma(spec["sigma"]),
            doc.ideal(spec["ideal"]),
            h,
            int(spec.get("nuMax", 8)),
        )
        return [
            {
                "kind": "sigma-limit",
                "status": result.status,
                "value": _fmt_vec(result.value),
                "certified": result.certified,
                "nuScope": result.nu_scope,
            }
        ]
    if kind == "check-almost-regular":
        A = doc.matrix(spec["matrix"])
        reports = check_almost_regular(
            A,
            doc.sigma(spec["sigma"]),
            doc.ideal(spec["idealI"]),
            doc.ideal(spec["idealJ"]),
            _target_from(spec, A.d, A.m),
            h,
            _test_sets_from(spec),
            nu_max=int(spec.get("nuMax", 8)),
        )
        return [r.to_json() for r in reports]
    raise SchemaError(f"unknown task kind {kind!r}")


def _horizon_json(h: HorizonParams) -> dict:
    return {"N": h.N, "eps": str(h.eps), "tmax": h.probe_depth}


def run_document(doc: Document, default_h: HorizonParams, mode: str) -> list:
    results = []
    for task in doc.tasks:
        h = task.horizon or default_h
        started = time.perf_counter()
        verdicts = run_task(doc, task, h)
        results.append(
            TaskResult(
                task_id=task.task_id,
                kind=task.kind,
                verdicts=verdicts,
                mode=mode,
                horizon=_horizon_json(h),
                timing=time.perf_counter() - started,
            )
        )
    return results


def emit_report(results: list, fmt: str, seed: Optional[int] = None) -> str:
    """Render results; the machine format is deterministic in exact mode."""
    if fmt == "machine":
        payload = {
            "schemaVersion": REPORT_SCHEMA_VERSION,
            "seed": seed,
            "results": [r.to_json() for r in results],
        }
        return json.dumps(payload, sort_keys=True, indent=2)
    lines = []
    for r in results:
        lines.append(
            f"task {r.task_id} [{r.kind}] horizon N={r.horizon['N']} "
            f"eps={r.horizon['eps']} ({r.timing:.3f}s)"
        )
        for v in r.verdicts:
            if "condition" in v:
                line = f"  {v['condition']:>4}  {v['verdict']:<18} margin={v['margin']}"
                if v.get("witness"):
                    w = v["witness"]
                    line += f"  witness n={w['n']}"
                    if w.get("member"):
                        line += f" member={w['member']}"
                    if w.get("value") is not None:
                        line += f" value={w['value']}"
                lines.append(line)
                if v.get("notes"):
                    lines.append(f"        note: {v['notes']}")
            elif v.get("kind") == "theorem-equivalence":
                lines.append(
                    f"  (i) {v['i']}  (ii) {v['ii']}  (iii) {v['iii']}  "
                    f"selections={v['selections']} consistent={v['consistent']}"
                )
                if v.get("witnessSelection"):
                    w = v["witnessSelection"]
                    lines.append(
                        f"        witness selection prefix={w['prefix']} period={w['period']}"
                    )
            elif v.get("kind") == "uniform-limsup":
                lines.append(
                    f"  lhs={v['lhs']} adversarial={v['adversarialRhs']} "
                    f"enumerated<= {v['rhsLowerBound']}  {v['verdict']}"
                )
            else:
                lines.append("  " + json.dumps(v, sort_keys=True))
    return "\n".join(lines)


def _replay(doc: Document, results: list, witness_id: str, default_h: HorizonParams):
    """Re-run one recorded witness; exact mode must reproduce it bit for bit."""
    try:
        task_id, condition = witness_id.split(".", 1)
    except ValueError:
        raise SchemaError(f"--replay-witness expects '<taskId>.<condition>', got {witness_id!r}")
    task = next((t for t in doc.tasks if t.task_id == task_id), None)
    if task is None:
        raise SchemaError(f"no task with id {task_id!r}")
    result = next(r for r in results if r.task_id == task_id)
    verdict = next(
        (v for v in result.verdicts if v.get("condition") == condition), None
    )
    if verdict is None or not verdict.get("witness"):
        raise SummaError(f"task {task_id!r} has no witness for condition {condition!r}")
    h = task.horizon or default_h

    from .regularity import ConditionReport, Witness

    w = verdict["witness"]
    report = ConditionReport(
        condition=condition,
        verdict=Verdict(verdict["verdict"]),
        margin=as_fraction(verdict["margin"]),
        witness=Witness(
            n=w["n"],
            member=w.get("member"),
            component=tuple(w["component"]) if w.get("component") else None,
            test_set=SetDescriptor.from_json(w["testSet"]) if w.get("testSet") else None,
            value=as_fraction(w["value"]) if isinstance(w.get("value"), str) else None,
        ),
    )
    spec = task.spec
    if "family" in spec:
        members = list(doc.family(spec["family"]))
    else:
        members = [doc.matrix(spec["matrix"])]
    if condition.startswith("K"):
        # sigma-mean witnesses replay through the composed family route
        from .sigma import compose_sigma

        sigma = doc.sigma(spec["sigma"])
        nu = int(report.witness.member.split("=", 1)[1]) if report.witness.member else 0
        composed = compose_sigma(members[0], sigma, nu)
        mapped = {"K1": "D1", "K2": "D3", "K3": "D4"}[condition]
        report = ConditionReport(mapped, report.verdict, report.margin, report.witness)
        value = reevaluate_witness([composed], report, h)
    else:
        value = reevaluate_witness(members, report, h)
    recorded = w.get("value")
    reproduced = recorded is not None and scalar_to_json(value) == recorded
    return {
        "witness": witness_id,
        "recorded": recorded,
        "reevaluated": scalar_to_json(value),
        "reproduced": reproduced,
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="summa",
        description="Summability engine: run matrix transform and regularity tasks "
        "from a JSON job document.",
    )
    parser.add_argument("--version", action="version", version=f"summa {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    validate_p = sub.add_parser("validate", help="parse and validate a document")
    validate_p.add_argument("document")
    validate_p.add_argument("--mode", choices=("exact", "interval"), default="exact")

    run_p = sub.add_parser("run", help="run the tasks declared in a document")
    run_p.add_argument("document")
    run_p.add_argument("--mode", choices=("exact", "interval"), default="exact")
    run_p.add_argument("--horizon", type=int, default=64, metavar="N")
    run_p.add_argument("--eps", default="1/16", metavar="P/Q")
    run_p.add_argument("--tmax", type=int, default=None)
    run_p.add_argument("--strict", action="store_true", help="exit 1 on any witnessed failure")
    run_p.add_argument("--format", choices=("text", "machine"), default="text")
    run_p.add_argument("--replay-witness", default=None, metavar="TASK.COND")
    run_p.add_argument("--seed", type=int, default=None, help="recorded in the report; core checks are deterministic")

    args = parser.parse_args(argv)

    try:
        with open(args.document, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.document}: {exc}", file=sys.stderr)
        return 2

    try:
        doc = parse_spec_document(text, mode=args.mode)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(
            f"ok: {len(doc.matrices)} matrices, {len(doc.sequences)} sequences, "
            f"{len(doc.ideals)} ideals, {len(doc.sigmas)} sigma maps, "
            f"{len(doc.tasks)} tasks"
        )
        return 0

    try:
        default_h = HorizonParams(
            N=args.horizon, eps=as_fraction(args.eps), tmax=args.tmax
        )
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2

    try:
        results = run_document(doc, default_h, args.mode)
        if args.replay_witness:
            outcome = _replay(doc, results, args.replay_witness, default_h)
            print(json.dumps(outcome, sort_keys=True, indent=2))
            return 0 if outcome["reproduced"] else 1
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except SummaError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3

    print(emit_report(results, args.format, seed=args.seed))
    if args.strict and any(r.has_failure for r in results):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
