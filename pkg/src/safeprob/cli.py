"""Command-line interface.

Commands: ``check`` (one notion for one scenario file), ``report`` (the
whole hierarchy), ``events`` (partition sanity check for event
conditioning), ``coverage`` (Monte Carlo confidence coverage) and
``demo`` (bundled worked examples).

Exit codes: 0 when the queried notion holds (or all demo assertions
pass), 1 when it fails (the printed report carries a counterexample),
2 for usage or validation errors. Reports are deterministic: identical
inputs, including seeds, produce byte-identical output. ``--json``
switches to a machine-readable rendering with stable field order.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .calibration import check_calibrated_full
from .confidence import coverage_estimate, exponential_mean, normal_location
from .core import format_value
from .demos import run_dilation_demo, run_gamble_demo, run_monty_demo
from .errors import SafeprobError, ValidationError
from .pivots import PivotSpec, canonical_pivot, check_pivotal_safety
from .safety import (
    NOTION_NOTATION,
    NOTION_QUERIES,
    SafetyQuery,
    Verdict,
    check_safety,
    hierarchy_report,
)
from .scenario import parse_scenario

NOTIONS = tuple(NOTION_QUERIES) + ("calibrated", "pivotal")


def _verdict_json(verdict: Verdict) -> dict:
    out: dict = {"holds": verdict.holds}
    ce = verdict.counterexample
    if ce is not None:
        body: dict = {}
        if ce.vertex is not None:
            body["vertex"] = {
                z: str(w) for z, w in ce.vertex.weights.items() if w
            }
        for key in ("v", "w", "u"):
            val = getattr(ce, key)
            if val is not None:
                body[key] = format_value(val)
        for key in ("lhs", "rhs"):
            val = getattr(ce, key)
            if val is not None:
                body[key] = str(val) if isinstance(val, Fraction) else val
        out["counterexample"] = body
    else:
        out["counterexample"] = None
    out["notes"] = list(verdict.notes)
    return out


def _verdict_lines(name: str, verdict: Verdict) -> list[str]:
    label = NOTION_NOTATION.get(name, name)
    lines = [f"{name} ({label}): {'HOLDS' if verdict.holds else 'FAILS'}"]
    ce = verdict.counterexample
    if ce is not None:
        if ce.vertex is not None:
            mass = " ".join(
                f"{z}={w}" for z, w in ce.vertex.weights.items() if w
            )
            lines.append(f"  counterexample vertex: {mass}")
        detail = []
        for key in ("v", "w", "u"):
            val = getattr(ce, key)
            if val is not None:
                detail.append(f"{key}={format_value(val)}")
        for key in ("lhs", "rhs"):
            val = getattr(ce, key)
            if val is not None:
                detail.append(f"{key}={val}")
        if detail:
            lines.append("  " + " ".join(detail))
    for note in verdict.notes:
        lines.append(f"  note: {note}")
    return lines


def _emit(report: dict, text_lines: list[str], as_json: bool) -> None:
    if as_json:
        print(json.dumps(report, indent=2))
    else:
        print("\n".join([f"safeprob {__version__}"] + text_lines))


def _base_report(args, scenario) -> dict:
    return {
        "tool": "safeprob",
        "version": __version__,
        "input": {"path": scenario.path, "sha256": scenario.digest},
        "command": args.command,
    }


def _pivot_from_rv(scenario, u_rv, v_rv, name: str) -> PivotSpec:
    if name not in scenario.rvs:
        raise ValidationError(f"unknown rv {name!r} for --pivot")
    prv = scenario.rvs[name]
    mapping = {}
    for z in scenario.space.atoms:
        cell = (u_rv.table[z], v_rv.table[z])
        existing = mapping.get(cell)
        if existing is not None and existing != prv.table[z]:
            raise ValidationError(
                f"--pivot {name}: value at {z!r} conflicts with an atom sharing "
                f"its (target, conditioner) cell"
            )
        mapping[cell] = prv.table[z]
    return PivotSpec(name=name, mapping=mapping)


def _cmd_check(args) -> int:
    scenario = parse_scenario(args.file)
    if scenario.space is None:
        raise ValidationError("this file holds an event scenario; use the events command")
    for rv_name in (args.u, args.v):
        if rv_name not in scenario.rvs:
            raise ValidationError(f"unknown rv {rv_name!r}")
    u_rv, v_rv = scenario.rvs[args.u], scenario.rvs[args.v]
    w_rv = None
    if args.w is not None:
        if args.w not in scenario.rvs:
            raise ValidationError(f"unknown rv {args.w!r}")
        w_rv = scenario.rvs[args.w]

    if args.notion == "calibrated":
        if w_rv is not None:
            raise ValidationError("--w is not supported with the calibrated notion")
        verdict = check_calibrated_full(u_rv, v_rv, scenario.pragmatic, scenario.credal)
    elif args.notion == "pivotal":
        if args.pivot is not None:
            spec = _pivot_from_rv(scenario, u_rv, v_rv, args.pivot)
        else:
            spec = canonical_pivot(scenario.pragmatic, u_rv, v_rv)
        verdict = check_pivotal_safety(
            scenario.pragmatic, u_rv, v_rv, spec, scenario.credal, w=w_rv
        )
    else:
        left, right = NOTION_QUERIES[args.notion]
        query = SafetyQuery(u_rv, left, v_rv, right, stratifier=w_rv)
        verdict = check_safety(query, scenario.pragmatic, scenario.credal)

    report = _base_report(args, scenario)
    report["query"] = {
        "notion": args.notion, "u": args.u, "v": args.v,
        "w": args.w, "pivot": args.pivot,
    }
    report["verdicts"] = {args.notion: _verdict_json(verdict)}
    report["warnings"] = list(scenario.warnings)

    lines = [f"input: {scenario.path} (sha256:{scenario.digest[:16]})",
             f"query: notion={args.notion} u={args.u} v={args.v}"
             + (f" w={args.w}" if args.w else "")
             + (f" pivot={args.pivot}" if args.pivot else "")]
    lines += _verdict_lines(args.notion, verdict)
    lines += [f"warning: {w}" for w in scenario.warnings]
    _emit(report, lines, args.json)
    return 0 if verdict.holds else 1


def _cmd_report(args) -> int:
    scenario = parse_scenario(args.file)
    if scenario.space is None:
        raise ValidationError("this file holds an event scenario; use the events command")
    for rv_name in (args.u, args.v):
        if rv_name not in scenario.rvs:
            raise ValidationError(f"unknown rv {rv_name!r}")
    u_rv, v_rv = scenario.rvs[args.u], scenario.rvs[args.v]
    verdicts = hierarchy_report(u_rv, v_rv, scenario.pragmatic, scenario.credal)

    report = _base_report(args, scenario)
    report["query"] = {"u": args.u, "v": args.v}
    report["verdicts"] = {k: _verdict_json(v) for k, v in verdicts.items()}
    warnings = list(scenario.warnings)
    if "pivotal" not in verdicts:
        try:
            canonical_pivot(scenario.pragmatic, u_rv, v_rv)
        except SafeprobError as exc:
            warnings.append(f"pivotal safety not evaluated: {exc}")
    report["warnings"] = warnings

    lines = [f"input: {scenario.path} (sha256:{scenario.digest[:16]})",
             f"query: report u={args.u} v={args.v}"]
    for name, verdict in verdicts.items():
        lines += _verdict_lines(name, verdict)
    lines += [f"warning: {w}" for w in warnings]
    _emit(report, lines, args.json)
    return 0


def _cmd_events(args) -> int:
    scenario = parse_scenario(args.file)
    if scenario.events is None:
        raise ValidationError("this file does not hold an event scenario")
    from .updates import partition_check

    outcome = partition_check(scenario.events)
    verdict = outcome["verdict"]
    report = _base_report(args, scenario)
    report["is_partition"] = outcome["is_partition"]
    report["verdicts"] = {"valid": _verdict_json(verdict)}
    report["warnings"] = list(scenario.warnings)

    lines = [f"input: {scenario.path} (sha256:{scenario.digest[:16]})",
             f"observable sets form a partition: {outcome['is_partition']}"]
    lines += _verdict_lines("valid", verdict)
    _emit(report, lines, args.json)
    return 0 if verdict.holds else 1


_FAMILIES = {"normal": normal_location, "expmean": exponential_mean}


def _cmd_coverage(args) -> int:
    family = _FAMILIES[args.family](args.n)
    result = coverage_estimate(family, args.theta0, args.a, args.b, args.samples, args.seed)
    target = args.b - args.a
    within = abs(result["coverage"] - target) <= 3 * result["stderr"]
    report = {
        "tool": "safeprob", "version": __version__, "command": "coverage",
        "family": family.name, "theta0": args.theta0, "a": args.a, "b": args.b,
        "samples": args.samples, "seed": args.seed,
        "coverage": result["coverage"], "stderr": result["stderr"],
        "target": target, "within_3_stderr": within,
    }
    lines = [
        f"family: {family.name}",
        f"theta0={args.theta0} a={args.a} b={args.b} samples={args.samples} seed={args.seed}",
        f"coverage: {result['coverage']:.6f} (stderr {result['stderr']:.6f}, target {target:.6f})",
        f"within 3 standard errors: {within}",
    ]
    _emit(report, lines, args.json)
    return 0 if within else 1


def _fraction_str(x) -> str:
    return str(x) if isinstance(x, Fraction) else f"{float(x):.6f}"


def _cmd_demo(args) -> int:
    if args.name == "dilation":
        result = run_dilation_demo()
        lines = [f"dilation scenario, known marginal {result['marginal']}"]
        for name, verdict in result["report"].items():
            lines += _verdict_lines(name, verdict)
        lines.append(
            "three-valued extension: indicator stays average-safe: "
            f"{result['extension_indicator_holds']}; full mean fails: "
            f"{not result['extension_mean_verdict'].holds}"
        )
        ce = result["extension_mean_verdict"].counterexample
        if ce is not None:
            mass = " ".join(f"{z}={w}" for z, w in ce.vertex.weights.items() if w)
            lines.append(f"  witness vertex: {mass}")
        report = {"tool": "safeprob", "version": __version__, "command": "demo",
                  "name": "dilation", "ok": result["ok"],
                  "verdicts": {k: _verdict_json(v) for k, v in result["report"].items()}}
    elif args.name == "monty-hall":
        result = run_monty_demo()
        naive, control = result["naive"], result["control"]
        lines = [
            f"event conditioning: observables overlap, partition={naive['is_partition']}",
        ]
        lines += _verdict_lines("valid", naive["verdict"])
        lines.append(f"partition control: partition={control['is_partition']}")
        lines += _verdict_lines("valid", control["verdict"])
        lines.append(
            f"fair-coin pragmatic distribution: pivot simple={result['pivot_verdict'].is_simple}, "
            f"pivotally safe={result['pivotal'].holds}"
        )
        for kind, entry in result["losses"].items():
            believed = {format_value(k): _fraction_str(x)
                        for k, x in entry["table"]["believed"].items()}
            actual = [_fraction_str(x) for x in entry["table"]["actual"]]
            lines.append(
                f"{kind}: decision-safe={entry['verdict'].holds} "
                f"believed={believed} actual-per-vertex={actual}"
            )
        report = {"tool": "safeprob", "version": __version__, "command": "demo",
                  "name": "monty-hall", "ok": result["ok"],
                  "pivotal": _verdict_json(result["pivotal"])}
    else:
        result = run_gamble_demo()
        lines = [
            f"gamble on a positive parameter, true value {result['theta_bar']}, n={result['n']}",
            f"actual expected loss (closed form): {result['actual_expected_loss']:.6f}",
            f"actual expected loss (Monte Carlo): {result['actual_expected_loss_mc']:.6f}",
            f"believed expected loss (Monte Carlo): {result['believed_expected_loss']:.6f}",
        ]
        report = {"tool": "safeprob", "version": __version__, "command": "demo",
                  "name": "gamble", "ok": result["ok"],
                  "actual": result["actual_expected_loss"],
                  "actual_mc": result["actual_expected_loss_mc"],
                  "believed": result["believed_expected_loss"]}
    lines.append(f"demo assertions pass: {result['ok']}")
    _emit(report, lines, args.json)
    return 0 if result["ok"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="safeprob",
        description="Decide safety of a pragmatic distribution relative to a credal set.",
    )
    parser.add_argument("--version", action="version", version=f"safeprob {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="decide one safety notion")
    p_check.add_argument("file")
    p_check.add_argument("--u", required=True, metavar="NAME")
    p_check.add_argument("--v", required=True, metavar="NAME")
    p_check.add_argument("--notion", required=True, choices=NOTIONS)
    p_check.add_argument("--w", metavar="NAME")
    p_check.add_argument("--pivot", metavar="NAME")
    p_check.add_argument("--json", action="store_true")
    p_check.set_defaults(func=_cmd_check)

    p_report = sub.add_parser("report", help="evaluate the whole hierarchy")
    p_report.add_argument("file")
    p_report.add_argument("--u", required=True, metavar="NAME")
    p_report.add_argument("--v", required=True, metavar="NAME")
    p_report.add_argument("--json", action="store_true")
    p_report.set_defaults(func=_cmd_report)

    p_events = sub.add_parser("events", help="partition sanity check for event conditioning")
    p_events.add_argument("file")
    p_events.add_argument("--json", action="store_true")
    p_events.set_defaults(func=_cmd_events)

    p_cov = sub.add_parser("coverage", help="Monte Carlo confidence coverage")
    p_cov.add_argument("--family", required=True, choices=sorted(_FAMILIES))
    p_cov.add_argument("--n", required=True, type=int)
    p_cov.add_argument("--theta0", required=True, type=float)
    p_cov.add_argument("--a", required=True, type=float)
    p_cov.add_argument("--b", required=True, type=float)
    p_cov.add_argument("--samples", required=True, type=int)
    p_cov.add_argument("--seed", required=True, type=int)
    p_cov.add_argument("--json", action="store_true")
    p_cov.set_defaults(func=_cmd_coverage)

    p_demo = sub.add_parser("demo", help="run a bundled demonstration")
    p_demo.add_argument("name", choices=["dilation", "monty-hall", "gamble"])
    p_demo.add_argument("--json", action="store_true")
    p_demo.set_defaults(func=_cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SafeprobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
