"""Seeded random instances and a few hand-built fixtures."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
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
from .io import FAMILIES

FAMILY_PAIRS = tuple(itertools.product(FAMILIES, FAMILIES))


@dataclass(frozen=True)
class GeneratorSpec:
    family1: str
    family2: str
    n: int
    seed: int
    weights: str = "int:4"  # "int:<W>" or "loguniform:<R>"

    def __post_init__(self):
        for family in (self.family1, self.family2):
            if family not in FAMILIES:
                raise InputError(f"unknown family {family!r}")
        if self.n < 0:
            raise InputError("n must be non-negative")
        parse_weight_spec(self.weights)


def parse_weight_spec(spec: str) -> tuple[str, Fraction]:
    kind, _, value = spec.partition(":")
    if kind not in ("int", "loguniform") or not value:
        raise InputError(f"weight spec must be int:<W> or loguniform:<R>, got {spec!r}")
    try:
        bound = Fraction(value)
    except ValueError:
        raise InputError(f"bad weight bound in {spec!r}") from None
    if bound < 1 or (kind == "int" and bound.denominator != 1):
        raise InputError(f"weight bound must be >= 1 (an integer for int:), got {value}")
    return kind, bound


def random_matroid(family: str, n: int, rng: random.Random) -> Matroid:
    if family == "uniform":
        return UniformMatroid(n, rng.randint(1, max(1, n)))
    if family == "partition":
        count = rng.randint(1, max(1, n))
        blocks = [rng.randrange(count) for _ in range(n)]
        caps = [rng.randint(1, 2) for _ in range(count)]
        return PartitionMatroid(blocks, caps)
    if family == "graphic":
        vertices = rng.randint(2, max(2, n))
        edges = []
        for _ in range(n):
            u, v = rng.sample(range(vertices), 2)
            edges.append((min(u, v), max(u, v)))
        return GraphicMatroid(vertices, edges)
    if family == "linear_gf2":
        rows = rng.randint(1, 4)
        return LinearMatroidGF2(rows, [rng.randint(1, (1 << rows) - 1) for _ in range(n)])
    raise InputError(f"unknown family {family!r}")


def random_weights(spec: str, n: int, rng: random.Random) -> list[Fraction]:
    kind, bound = parse_weight_spec(spec)
    if kind == "int":
        return [Fraction(rng.randint(1, int(bound))) for _ in range(n)]
    # log-uniform on [1, R], kept to three decimals and clamped into range
    out = []
    for _ in range(n):
        x = Fraction(round(float(bound) ** rng.random() * 1000), 1000)
        out.append(min(max(x, Fraction(1)), bound))
    return out


def generate(spec: GeneratorSpec) -> WeightedInstance:
    rng = random.Random(f"{spec.family1}|{spec.family2}|{spec.n}|{spec.seed}|{spec.weights}")
    m1 = random_matroid(spec.family1, spec.n, rng)
    m2 = random_matroid(spec.family2, spec.n, rng)
    return WeightedInstance(m1, m2, dict(enumerate(random_weights(spec.weights, spec.n, rng))))


def corpus(count: int, n_range: tuple[int, int], weights: str, seed: int = 0,
           max_total_weight=None) -> list[tuple[GeneratorSpec, WeightedInstance]]:
    """``count`` instances cycling through all ordered family pairs.

    With ``max_total_weight`` set, draws whose total weight exceeds it are
    replaced by the next seed.
    """
    out = []
    rng = random.Random(seed)
    k = 0
    while len(out) < count:
        f1, f2 = FAMILY_PAIRS[len(out) % len(FAMILY_PAIRS)]
        spec = GeneratorSpec(f1, f2, rng.randint(*n_range), seed * 1_000_003 + k, weights)
        k += 1
        inst = generate(spec)
        if max_total_weight is not None and sum(inst.weights.values()) > max_total_weight:
            continue
        out.append((spec, inst))
    return out


def small_example() -> WeightedInstance:
    """Partition {0,1} cap 1, {2} cap 1 against uniform rank 2; weights 3, 2, 1."""
    m1 = PartitionMatroid([0, 0, 1], [1, 1])
    m2 = UniformMatroid(3, 2)
    return WeightedInstance(m1, m2, {0: 3, 1: 2, 2: 1})


def two_graph_example() -> WeightedInstance:
    """Elements a, b, c, d = 0..3 as edges of two small multigraphs.

    First graph on vertices A, C, D: b = AC, c = CD, d = AD, and a parallel
    to d.  Second graph: a parallel to c, b parallel to d.  Weights 3, 1, 2, 2;
    the best common forest weighs 4.
    """
    m1 = GraphicMatroid(3, [(0, 2), (0, 1), (1, 2), (0, 2)])
    m2 = GraphicMatroid(4, [(0, 1), (2, 3), (0, 1), (2, 3)])
    return WeightedInstance(m1, m2, {0: 3, 1: 1, 2: 2, 3: 2})


def empty_instance() -> WeightedInstance:
    return WeightedInstance(UniformMatroid(0, 0), UniformMatroid(0, 0), {})
