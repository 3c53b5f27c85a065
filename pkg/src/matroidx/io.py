"""JSON (de)serialization of weighted instances.

Schema::

    {"n": int,
     "matroid1": {"family": ..., <params>},
     "matroid2": {"family": ..., <params>},
     "weights": ["p/q", ...]}

Families and their parameters: ``uniform`` {k}, ``partition`` {blocks, caps},
``graphic`` {vertices, edges}, ``linear_gf2`` {rows, columns} with columns
given as bitstrings, most significant row first.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .core import (
    GraphicMatroid,
    InputError,
    LinearMatroidGF2,
    Matroid,
    PartitionMatroid,
    UniformMatroid,
    WeightedInstance,
)

FAMILIES = ("uniform", "partition", "graphic", "linear_gf2")


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text) -> Fraction:
    if isinstance(text, bool):
        raise InputError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise InputError(f"weights must be rational strings, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational: {text!r}") from None


def matroid_to_json(m: Matroid) -> dict:
    if m.kind not in FAMILIES:
        raise InputError(f"cannot serialize a {m.kind} oracle")
    return {"family": m.kind, **m.params()}


def matroid_from_json(data: dict, n: int) -> Matroid:
    if not isinstance(data, dict):
        raise InputError("matroid entry must be an object")
    family = data.get("family")
    try:
        if family == "uniform":
            return UniformMatroid(n, int(data["k"]))
        if family == "partition":
            blocks = [int(b) for b in data["blocks"]]
            if len(blocks) != n:
                raise InputError(f"partition has {len(blocks)} block labels for n={n}")
            return PartitionMatroid(blocks, [int(c) for c in data["caps"]])
        if family == "graphic":
            edges = [(int(u), int(v)) for u, v in data["edges"]]
            if len(edges) != n:
                raise InputError(f"graphic matroid has {len(edges)} edges for n={n}")
            return GraphicMatroid(int(data["vertices"]), edges)
        if family == "linear_gf2":
            rows = int(data["rows"])
            columns = []
            for bits in data["columns"]:
                if len(bits) != rows or set(bits) - {"0", "1"}:
                    raise InputError(f"column {bits!r} is not a {rows}-bit string")
                columns.append(int(bits, 2) if bits else 0)
            if len(columns) != n:
                raise InputError(f"linear_gf2 has {len(columns)} columns for n={n}")
            return LinearMatroidGF2(rows, columns)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad {family} parameters: {exc}") from None
    raise InputError(f"unknown matroid family {family!r}")


def instance_to_json(inst: WeightedInstance) -> dict:
    n = inst.n
    if sorted(inst.weights) != list(range(n)):
        raise InputError("only instances weighting every element can be serialized")
    return {
        "n": n,
        "matroid1": matroid_to_json(inst.m1),
        "matroid2": matroid_to_json(inst.m2),
        "weights": [format_fraction(inst.weights[e]) for e in range(n)],
    }


def instance_from_json(data) -> WeightedInstance:
    if not isinstance(data, dict):
        raise InputError("instance must be a JSON object")
    try:
        n = int(data["n"])
        weights = [parse_fraction(w) for w in data["weights"]]
        m1 = matroid_from_json(data["matroid1"], n)
        m2 = matroid_from_json(data["matroid2"], n)
    except KeyError as exc:
        raise InputError(f"instance is missing {exc}") from None
    if len(weights) != n:
        raise InputError(f"{len(weights)} weights for n={n}")
    return WeightedInstance(m1, m2, dict(enumerate(weights)))


def dumps_instance(inst: WeightedInstance) -> str:
    return json.dumps(instance_to_json(inst), indent=2, sort_keys=True) + "\n"


def loads_instance(text: str) -> WeightedInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    return instance_from_json(data)
