"""JSON network descriptions.

Top-level keys: ``queues``, ``processors``, ``arrivals``, ``admission_cost``,
``activation_cost``, ``output_profit``, ``activation_family`` (optional,
defaults to all subsets) and an optional ``name``. Distributions are
``{"values": [...], "probs": [...]}``; a bare number means a constant.
Processor ``supply``/``demand`` map queue ids to units per activation.
"""

from __future__ import annotations

import json
from typing import Any

from .model import (
    ActivationFamily,
    Distribution,
    NetworkSpec,
    ProcessorSpec,
    QueueSpec,
    StochasticModel,
    validate_spec,
)


class ParseError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _expect(obj, kind, where: str):
    if not isinstance(obj, kind):
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ParseError(where, f"expected {name}, got {type(obj).__name__}")
    return obj


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ParseError(where, f"expected a number, got {x!r}")
    return float(x)


def _dist(obj, where: str) -> Distribution:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return Distribution.constant(float(obj))
    _expect(obj, dict, where)
    for key in ("values", "probs"):
        if key not in obj:
            raise ParseError(where, f"missing {key!r}")
        _expect(obj[key], list, f"{where}.{key}")
    values = tuple(_number(v, f"{where}.values[{i}]") for i, v in enumerate(obj["values"]))
    probs = tuple(_number(v, f"{where}.probs[{i}]") for i, v in enumerate(obj["probs"]))
    return Distribution(values, probs)


def _amounts(obj, where: str) -> tuple[tuple[str, float], ...]:
    if isinstance(obj, dict):
        return tuple((str(k), _number(v, f"{where}.{k}")) for k, v in obj.items())
    _expect(obj, list, where)
    out = []
    for i, pair in enumerate(obj):
        if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
            raise ParseError(f"{where}[{i}]", "expected [queue_id, amount]")
        out.append((pair[0], _number(pair[1], f"{where}[{i}][1]")))
    return tuple(out)


def _dist_table(doc: dict, key: str) -> dict[str, Distribution]:
    raw = _expect(doc.get(key, {}), dict, f"$.{key}")
    return {str(k): _dist(v, f"$.{key}.{k}") for k, v in raw.items()}


def parse_config(text: str) -> NetworkSpec:
    """Parse without validating the network structure."""
    if not text.strip():
        raise ParseError("line 1 column 1", "empty document")
    try:
        doc: Any = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    _expect(doc, dict, "$")
    for key in ("queues", "processors", "arrivals"):
        if key not in doc:
            raise ParseError("$", f"missing required key {key!r}")

    queues = []
    for i, q in enumerate(_expect(doc["queues"], list, "$.queues")):
        where = f"$.queues[{i}]"
        _expect(q, dict, where)
        if "id" not in q or "kind" not in q:
            raise ParseError(where, "queue needs 'id' and 'kind'")
        queues.append(QueueSpec(str(q["id"]), str(q["kind"])))

    procs = []
    for i, p in enumerate(_expect(doc["processors"], list, "$.processors")):
        where = f"$.processors[{i}]"
        _expect(p, dict, where)
        if "id" not in p or "kind" not in p or "supply" not in p:
            raise ParseError(where, "processor needs 'id', 'kind' and 'supply'")
        alpha_out = p.get("alpha_out")
        procs.append(ProcessorSpec(
            id=str(p["id"]),
            kind=str(p["kind"]),
            supply=_amounts(p["supply"], f"{where}.supply"),
            demand=_amounts(p.get("demand", {}), f"{where}.demand"),
            alpha_out=None if alpha_out is None else _number(alpha_out, f"{where}.alpha_out"),
        ))

    fam_doc = _expect(doc.get("activation_family", {"kind": "all"}), dict, "$.activation_family")
    kind = str(fam_doc.get("kind", "all"))
    vectors = tuple(tuple(int(x) for x in _expect(v, list, f"$.activation_family.vectors[{i}]"))
                    for i, v in enumerate(_expect(fam_doc.get("vectors", []), list, "$.activation_family.vectors")))
    groups = tuple(tuple(str(x) for x in _expect(g, list, f"$.activation_family.groups[{i}]"))
                   for i, g in enumerate(_expect(fam_doc.get("groups", []), list, "$.activation_family.groups")))

    return NetworkSpec(
        name=str(doc.get("name", "")),
        queues=tuple(queues),
        processors=tuple(procs),
        stochastic=StochasticModel(
            arrivals=_dist_table(doc, "arrivals"),
            admission_cost=_dist_table(doc, "admission_cost"),
            activation_cost=_dist_table(doc, "activation_cost"),
            output_profit=_dist_table(doc, "output_profit"),
        ),
        activation_family=ActivationFamily(kind, vectors, groups),
    )


def load_config(text: str) -> NetworkSpec:
    return validate_spec(parse_config(text))


def dump_config(spec: NetworkSpec) -> str:
    return json.dumps(spec.to_dict(), indent=2) + "\n"
