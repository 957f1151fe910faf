"""Scenario files: JSON ingestion and serialization codecs.

A scenario is a model plus optional jumps and named payoffs.  Rationals on
the wire are integers or canonical "p/q" strings; floats are rejected.  Claim
and payoff vectors are given per outcome and quotiented onto the terminal
partition at load time, which must leave them well defined.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .errors import SemistaticError
from .hedging import SemiStaticStrategy
from .model import (
    FilteredModel,
    Filtration,
    Measure,
    Partition,
    Payoff,
    PriceProcess,
    PriorSupport,
    StaticClaim,
    TimeGrid,
    natural_filtration,
    validate_model,
)
from .rationals import fmt, rat
from .tree import AtomicTree, TreeNode

ZERO = Fraction(0)


class ScenarioError(SemistaticError):
    """Malformed or invalid scenario input."""


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    model: FilteredModel
    jumps: tuple = ()
    payoffs: dict[str, Payoff] = field(default_factory=dict)
    notes: str = ""


def _quotient(values: Sequence[Fraction], cells: Sequence[Sequence[int]], what: str) -> Payoff:
    out = []
    for cell in cells:
        base = values[cell[0]]
        if any(values[w] != base for w in cell):
            raise ScenarioError(f"{what} is not constant on the terminal cell {sorted(cell)}")
        out.append(base)
    return tuple(out)


def load_scenario(path: str | Path) -> Scenario:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
    return parse_scenario(data, name_hint=Path(path).stem)


def parse_scenario(data: dict, name_hint: str = "scenario") -> Scenario:
    try:
        outcomes = tuple(str(w) for w in data["outcomes"])
        if len(set(outcomes)) != len(outcomes):
            raise ScenarioError("outcome labels must be unique")
        index = {w: i for i, w in enumerate(outcomes)}
        times = tuple(rat(t) for t in data["times"])
        grid = TimeGrid(times)

        prices = PriceProcess(
            tuple(
                tuple(tuple(rat(x) for x in slice_k) for slice_k in asset)
                for asset in data["prices"]
            )
        )

        spec = data.get("filtration", "natural")
        if spec == "natural":
            filtration = natural_filtration(prices)
        else:
            partitions = []
            for cells in spec:
                partitions.append(Partition([[index[w] for w in cell] for cell in cells]))
            filtration = Filtration(partitions)

        terminal = filtration.partitions[-1].cells
        claims = tuple(
            StaticClaim(_quotient(tuple(rat(x) for x in payoff), terminal, f"claim {i}"))
            for i, payoff in enumerate(data.get("claims", []))
        )

        support_spec = data.get("prior_support", "all")
        if support_spec == "all":
            allowed = frozenset(range(len(terminal)))
        else:
            listed = {index[w] for w in support_spec}
            allowed = set()
            for c, cell in enumerate(terminal):
                hit = listed.intersection(cell)
                if hit and not set(cell) <= listed:
                    raise ScenarioError(
                        f"prior support lists part of the terminal cell {sorted(cell)}"
                    )
                if hit:
                    allowed.add(c)
            allowed = frozenset(allowed)

        model = FilteredModel(
            outcomes=outcomes,
            grid=grid,
            filtration=filtration,
            prices=prices,
            claims=claims,
            priors=PriorSupport(allowed),
        )

        from .enlargement import SingleJump  # local import to avoid a cycle

        jumps = []
        for j in data.get("jumps", []):
            tau = [None] * len(outcomes)
            mark = [ZERO] * len(outcomes)
            for w, t in j["tau"].items():
                tau[index[w]] = None if t == "inf" else int(t)
            for w, x in j["mark"].items():
                mark[index[w]] = rat(x)
            jumps.append(SingleJump(tuple(tau), tuple(mark)))

        payoffs = {
            name: _quotient(tuple(rat(x) for x in vec), terminal, f"payoff {name}")
            for name, vec in data.get("payoffs", {}).items()
        }
    except ScenarioError:
        raise
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc

    report = validate_model(model)
    if not report.ok:
        first = report.violations[0]
        raise ScenarioError(
            f"invalid model ({len(report.violations)} violations; first: {first.code} at {first.where}: {first.message})"
        )
    return Scenario(
        name=str(data.get("name", name_hint)),
        description=str(data.get("description", "")),
        model=model,
        jumps=tuple(jumps),
        payoffs=payoffs,
        notes=str(data.get("notes", "")),
    )


def parse_inline_measure(text: str, model: FilteredModel) -> Measure:
    """Comma-separated "p/q" weights over terminal cells, e.g. "1/4,1/2,1/4"."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != model.n_cells:
        raise ScenarioError(
            f"inline measure has {len(parts)} weights, model has {model.n_cells} terminal cells"
        )
    try:
        return model.measure([rat(p) for p in parts])
    except (ValueError, TypeError) as exc:
        raise ScenarioError(f"invalid inline measure: {exc}") from exc


def measure_from_json(data: dict, model: FilteredModel) -> Measure:
    return model.measure([rat(w) for w in data["weights"]])


def strategy_from_json(data: dict, model: FilteredModel) -> SemiStaticStrategy:
    dynamic = [
        [[ZERO for _ in range(model.prices.assets)] for _ in model.filtration.partitions[k - 1].cells]
        for k in range(1, model.horizon + 1)
    ]
    for entry in data.get("dynamic", []):
        k = int(entry["k"])
        label = entry["cell"]
        cells = model.filtration.partitions[k - 1].cells
        c = next((i for i, cell in enumerate(cells) if model.cell_label(cell) == label), None)
        if c is None:
            raise ScenarioError(f"unknown cell label {label!r} at k={k}")
        dynamic[k - 1][c][int(entry["asset"])] = rat(entry["value"])
    return SemiStaticStrategy(
        cash=rat(data["cash"]),
        static=tuple(rat(a) for a in data.get("static", [])),
        dynamic=tuple(tuple(tuple(v) for v in s) for s in dynamic),
    )


def tree_from_json(data: dict, model: FilteredModel) -> AtomicTree:
    label_index = {w: i for i, w in enumerate(model.outcomes)}
    nodes = []
    for node in data["nodes"]:
        cell = tuple(sorted(label_index[w] for w in node["cell"].split("|")))
        nodes.append(TreeNode(cell, int(node["birth"])))
    return AtomicTree(nodes)


def canonical_json(obj) -> str:
    """Deterministic serialization: sorted keys, tight separators, newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def measure_to_json(measure: Measure, model: FilteredModel) -> dict:
    return measure.to_json(model)


def payoff_to_json(payoff: Sequence[Fraction]) -> list[str]:
    return [fmt(x) for x in payoff]
