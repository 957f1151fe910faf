"""Batch command line front end.

One logical command per invocation, deterministic reports (canonical JSON or
stable indented text), exit code 0 on pass, 1 on property failure, 2 on input
error.  Measures are addressed by vertex index or given inline as "p/q"
weights; payoffs by name from the scenario file or inline.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .duality import detect_arbitrage, robust_price, superhedge, verify_duality
from .enlargement import azema, compensator, enlarge, informed_compare, jeulin_yor
from .errors import EmptyMeasureSet, NotCalibrated, NotComplete, SemistaticError
from .hedging import NotReplicable, is_semistatically_complete, replicate
from .model import FilteredModel, Measure, validate_model
from .polytope import build_constraints, enumerate_extreme_points
from .rationals import fmt, rat
from .scenario import Scenario, ScenarioError, canonical_json, load_scenario, parse_inline_measure
from .tree import AtomicTree, NoTree, extract_tree
from . import verify as verify_suites

PASS, FAIL, INPUT_ERROR = 0, 1, 2


def _emit(report: dict, fmt_mode: str) -> None:
    if fmt_mode == "json":
        sys.stdout.write(canonical_json(report))
    else:
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def _resolve_measure(arg: str, model: FilteredModel) -> Measure:
    if "," in arg or "/" in arg:
        return parse_inline_measure(arg, model)
    try:
        index = int(arg)
    except ValueError as exc:
        raise ScenarioError(f"measure must be a vertex index or inline weights, got {arg!r}") from exc
    vertex_set = enumerate_extreme_points(build_constraints(model))
    if not 0 <= index < len(vertex_set.vertices):
        raise ScenarioError(f"vertex index {index} out of range ({len(vertex_set.vertices)} vertices)")
    return vertex_set.vertices[index]


def _resolve_payoff(arg: str, scenario: Scenario):
    if arg in scenario.payoffs:
        return scenario.payoffs[arg]
    if "," in arg:
        values = [rat(p.strip()) for p in arg.split(",")]
        if len(values) != scenario.model.n_cells:
            raise ScenarioError("inline payoff has the wrong length")
        return tuple(values)
    raise ScenarioError(f"unknown payoff {arg!r}; scenario defines {sorted(scenario.payoffs)}")


def render_tree(tree: AtomicTree, model: FilteredModel) -> list[str]:
    parents = [tree.parent_index(i) for i in range(len(tree.nodes))]
    children: dict[int | None, list[int]] = {}
    for i, p in enumerate(parents):
        children.setdefault(p, []).append(i)

    lines: list[str] = []

    def walk(index: int, prefix: str, connector: str) -> None:
        node = tree.nodes[index]
        lines.append(f"{prefix}{connector}{model.cell_label(node.cell)} (birth {node.birth})")
        if connector == "":
            child_prefix = prefix
        elif connector.startswith("`"):
            child_prefix = prefix + "   "
        else:
            child_prefix = prefix + "|  "
        kids = children.get(index, [])
        for pos, kid in enumerate(kids):
            walk(kid, child_prefix, "`- " if pos == len(kids) - 1 else "|- ")

    for root in children.get(None, []):
        walk(root, "", "")
    return lines


def _cmd_validate(scenario: Scenario, args) -> tuple[dict, int]:
    report = validate_model(scenario.model)
    return report.to_json(), PASS if report.ok else INPUT_ERROR


def _cmd_extremes(scenario: Scenario, args) -> tuple[dict, int]:
    vertex_set = enumerate_extreme_points(build_constraints(scenario.model))
    result = {
        "count": len(vertex_set.vertices),
        "vertices": vertex_set.to_json(scenario.model),
        "empty_is_arbitrage": len(vertex_set.vertices) == 0,
    }
    return result, PASS


def _cmd_complete(scenario: Scenario, args) -> tuple[dict, int]:
    measure = _resolve_measure(args.measure, scenario.model)
    report = is_semistatically_complete(measure, scenario.model)
    result = report.to_json()
    result["measure"] = measure.to_json(scenario.model)
    return result, PASS


def _cmd_replicate(scenario: Scenario, args) -> tuple[dict, int]:
    model = scenario.model
    measure = _resolve_measure(args.measure, model)
    payoff = _resolve_payoff(args.payoff, scenario)
    outcome = replicate(payoff, measure, model)
    if isinstance(outcome, NotReplicable):
        return outcome.to_json(), PASS
    return {"replicable": True, "strategy": outcome.to_json(model)}, PASS


def _cmd_price(scenario: Scenario, args) -> tuple[dict, int]:
    payoff = _resolve_payoff(args.payoff, scenario)
    result = robust_price(payoff, scenario.model)
    return result.to_json(scenario.model), PASS


def _cmd_superhedge(scenario: Scenario, args) -> tuple[dict, int]:
    payoff = _resolve_payoff(args.payoff, scenario)
    result = superhedge(payoff, scenario.model)
    return result.to_json(scenario.model), PASS


def _cmd_duality(scenario: Scenario, args) -> tuple[dict, int]:
    payoff = _resolve_payoff(args.payoff, scenario)
    try:
        report = verify_duality(payoff, scenario.model)
    except EmptyMeasureSet:
        arb = detect_arbitrage(scenario.model)
        return {"status": "arbitrage", "certificate": arb.to_json(scenario.model)}, PASS
    return report.to_json(scenario.model), PASS if report.ok else FAIL


def _cmd_tree(scenario: Scenario, args) -> tuple[dict, int]:
    model = scenario.model
    measure = _resolve_measure(args.measure, model)
    outcome = extract_tree(measure, model)
    if isinstance(outcome, NoTree):
        return outcome.to_json(model), PASS
    result = outcome.to_json(model)
    result["render"] = render_tree(outcome, model)
    return result, PASS


def _cmd_enlarge(scenario: Scenario, args) -> tuple[dict, int]:
    model = scenario.model
    if not scenario.jumps:
        raise ScenarioError("scenario declares no jumps to enlarge with")
    enlarged = enlarge(model, scenario.jumps)
    result: dict = {
        "jumps": [j.to_json(model) for j in scenario.jumps],
        "enlarged_partitions": [
            [model.cell_label(cell) for cell in partition.cells]
            for partition in enlarged.model.filtration.partitions
        ],
    }
    if args.measure is not None:
        measure = _resolve_measure(args.measure, enlarged.model)
        per_jump = []
        for jump in scenario.jumps:
            z = azema(measure, jump, enlarged)
            comp = compensator(measure, jump, enlarged)
            jy = jeulin_yor(measure, jump, enlarged)
            per_jump.append(
                {
                    "azema": [[fmt(x) for x in row] for row in z.values],
                    "supermartingale_ok": z.supermartingale_ok,
                    "compensator_increments": [[fmt(x) for x in row] for row in comp.increments],
                    "predictable_ok": comp.predictable_ok,
                    "compensated_martingale_ok": comp.martingale_ok,
                    "jeulin_yor": [[fmt(x) for x in row] for row in jy.values],
                    "martingale_ok": jy.martingale_ok,
                }
            )
        result["measure"] = measure.to_json(enlarged.model)
        result["per_jump"] = per_jump
        ok = all(p["martingale_ok"] and p["predictable_ok"] for p in per_jump)
        return result, PASS if ok else FAIL
    return result, PASS


def _cmd_informed_compare(scenario: Scenario, args) -> tuple[dict, int]:
    if not scenario.jumps:
        raise ScenarioError("scenario declares no jumps to compare with")
    report, enlarged = informed_compare(scenario.model, scenario.jumps, scenario.payoffs)
    code = PASS
    if report.corollary_equal is False:
        code = FAIL
    return report.to_json(enlarged), code


def _cmd_verify(args) -> tuple[dict, int]:
    if args.suite == "all":
        report = verify_suites.suite_all()
    elif args.suite == "multinomial":
        report = verify_suites.suite_multinomial(args.pmax, args.mmax)
    else:
        fn = verify_suites.SUITES[args.suite]
        report = fn() if args.seed is None else fn(seed=args.seed)
    return report, PASS if report["ok"] else FAIL


COMMANDS = {
    "validate": _cmd_validate,
    "extremes": _cmd_extremes,
    "complete": _cmd_complete,
    "replicate": _cmd_replicate,
    "price": _cmd_price,
    "superhedge": _cmd_superhedge,
    "duality": _cmd_duality,
    "tree": _cmd_tree,
    "enlarge": _cmd_enlarge,
    "informed-compare": _cmd_informed_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semistatic",
        description="Exact-rational analysis of semi-static hedging on finite filtered market models.",
    )
    parser.add_argument("--format", dest="format_global", choices=["json", "text"], default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", dest="format_sub", choices=["json", "text"], default=None)

    def scenario_command(name: str, **flags):
        p = sub.add_parser(name)
        add_format(p)
        for flag, kwargs in flags.items():
            p.add_argument(flag, **kwargs)
        p.add_argument("scenario", help="path to a scenario JSON file")
        return p

    scenario_command("validate")
    scenario_command("extremes")
    scenario_command("complete", **{"--measure": {"required": True}})
    scenario_command("replicate", **{"--payoff": {"required": True}, "--measure": {"required": True}})
    scenario_command("price", **{"--payoff": {"required": True}})
    scenario_command("superhedge", **{"--payoff": {"required": True}})
    scenario_command("duality", **{"--payoff": {"required": True}})
    scenario_command("tree", **{"--measure": {"required": True}})
    scenario_command("enlarge", **{"--measure": {"required": False, "default": None}})
    scenario_command("informed-compare")

    verify = sub.add_parser("verify")
    add_format(verify)
    verify.add_argument("--suite", required=True, choices=sorted(verify_suites.SUITES) + ["all"])
    verify.add_argument("--pmax", type=int, default=5)
    verify.add_argument("--mmax", type=int, default=6)
    verify.add_argument("--seed", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.format = args.format_sub or args.format_global or "text"
    threads = os.environ.get("SEMISTATIC_THREADS")
    if threads is not None and not threads.isdigit():
        # accepted for compatibility; evaluation is sequential and deterministic
        _emit({"error": f"SEMISTATIC_THREADS must be a positive integer, got {threads!r}"}, args.format)
        return INPUT_ERROR
    try:
        if args.command == "verify":
            report, code = _cmd_verify(args)
            envelope = {"command": args.command, "result": report, "ok": code == PASS}
        else:
            scenario = load_scenario(args.scenario)
            result, code = COMMANDS[args.command](scenario, args)
            envelope = {
                "command": args.command,
                "scenario": scenario.name,
                "result": result,
                "ok": code == PASS,
            }
    except (ScenarioError, NotCalibrated, NotComplete) as exc:
        _emit({"error": str(exc)}, args.format)
        return INPUT_ERROR
    except SemistaticError as exc:
        _emit({"error": str(exc)}, args.format)
        return FAIL
    _emit(envelope, args.format)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
