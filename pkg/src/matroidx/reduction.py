"""Weight transforms that turn weighted matroid intersection into unweighted pieces.

Covers geometric rounding, spread (well-separated) weight classes, unfolding
an integer-weighted pair into copies, refolding copies back, greedy merging
of per-class solutions, chain-supported dual certificates, and exhaustive
oracles for small instances.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .core import (
    BudgetError,
    InputError,
    Matroid,
    MatroidError,
    PreconditionError,
    ResourceLedger,
    WeightedInstance,
    as_element_set,
)

DEFAULT_COPIES_PER_ELEMENT = 10_000


def as_fraction(x) -> Fraction:
    """Exact rational from int, Fraction, decimal string or float (via its repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def check_epsilon(eps, upper=Fraction(1, 2)) -> Fraction:
    eps = as_fraction(eps)
    if not 0 < eps <= upper:
        raise InputError(f"epsilon must lie in (0, {upper}], got {eps}")
    return eps


def floor_log(x: Fraction, base: Fraction) -> int:
    """Largest k with base**k <= x, for x > 0 and base > 1, computed exactly."""
    if x <= 0 or base <= 1:
        raise InputError("floor_log needs x > 0 and base > 1")
    k = int(math.floor((math.log(x.numerator) - math.log(x.denominator)) / math.log(base)))
    while base ** k > x:
        k -= 1
    while base ** (k + 1) <= x:
        k += 1
    return k


# ---------------------------------------------------------------- rounding


@dataclass(frozen=True)
class RoundingParams:
    epsilon: Fraction
    w_min: Fraction
    scale: Fraction  # 2 / (epsilon * w_min)

    @property
    def bucket_base(self) -> Fraction:
        return 1 + self.epsilon


@dataclass
class RoundedWeights:
    params: RoundingParams
    scaled: dict  # e -> w_s(e)
    rounded: dict  # e -> w_r(e), positive integers

    @property
    def W(self) -> int:
        return max(self.rounded.values(), default=1)


def round_weight(w: Fraction, params: RoundingParams) -> tuple[Fraction, int]:
    """(w_s, w_r) for a single weight: scale, then floor the bucket's lower edge."""
    ws = w * params.scale
    base = params.bucket_base
    return ws, math.floor(base ** floor_log(ws, base))


def rescale_round(inst: WeightedInstance, eps, w_min=None) -> tuple[WeightedInstance, RoundedWeights]:
    """Scale weights so the minimum becomes 2/eps, then round down to powers of (1+eps).

    ``w_min`` overrides the observed minimum (streams use a declared range);
    it must not exceed any actual weight.
    """
    eps = check_epsilon(eps)
    if not inst.weights:
        params = RoundingParams(eps, Fraction(1), 2 / eps)
        return inst, RoundedWeights(params, {}, {})
    observed = min(inst.weights.values())
    w_min = observed if w_min is None else as_fraction(w_min)
    if w_min <= 0 or w_min > observed:
        raise InputError(f"declared minimum weight {w_min} is above an actual weight {observed}")
    params = RoundingParams(eps, w_min, 2 / (eps * w_min))
    scaled, rounded = {}, {}
    for e, w in inst.weights.items():
        scaled[e], rounded[e] = round_weight(w, params)
    return inst.reweighted(rounded), RoundedWeights(params, scaled, rounded)


# ------------------------------------------------------ spread decomposition


@dataclass(frozen=True)
class SpreadClass:
    index: int  # i in [1, beta]
    level: int  # l >= 0
    lower: Fraction  # inclusive, in input weight units
    upper: Fraction  # exclusive
    elements: frozenset


@dataclass
class SpreadDecomposition:
    epsilon: Fraction
    beta: int
    base: Fraction  # weights were divided by this before classifying
    classes: dict  # i -> list[SpreadClass], ascending level

    def index_elements(self, i: int) -> frozenset:
        return frozenset().union(*(c.elements for c in self.classes.get(i, [])))

    def all_classes(self) -> list[SpreadClass]:
        return [c for i in sorted(self.classes) for c in self.classes[i]]

    def class_count(self, i: int) -> int:
        return len(self.classes.get(i, []))


def spread_position(x: Fraction, q: Fraction, beta: int, i: int) -> Optional[int]:
    """Level l of normalized weight x >= 1 under index i, or None when i drops it."""
    d = floor_log(x, q) - i
    if d % beta == 0:
        return None
    return d // beta + 1


def spread_interval(q: Fraction, beta: int, i: int, level: int) -> tuple[Fraction, Fraction]:
    return q ** (i + (level - 1) * beta + 1), q ** (i + level * beta)


def spread_decompose(weights: dict, eps, base=None) -> SpreadDecomposition:
    """Split elements into per-index lists of classes whose ranges sit 1/eps apart.

    Weights are divided by ``base`` (default: the minimum weight) so that all
    normalized weights are at least 1.  For index ``i`` the class ``l`` holds
    weights in ``[q**(i+(l-1)*beta+1), q**(i+l*beta))`` with ``q = 1/eps``;
    each element is skipped by exactly one index.
    """
    eps = check_epsilon(eps)
    q = 1 / eps
    beta = math.ceil(q)
    if base is None:
        base = min(weights.values(), default=Fraction(1))
    base = as_fraction(base)
    if any(w < base for w in weights.values()):
        raise InputError("spread normalization base exceeds a weight")
    levels = {e: floor_log(as_fraction(w) / base, q) for e, w in weights.items()}
    classes: dict[int, list[SpreadClass]] = {}
    for i in range(1, beta + 1):
        grouped: dict[int, list[int]] = {}
        for e in sorted(weights):
            d = levels[e] - i
            if d % beta:
                grouped.setdefault(d // beta + 1, []).append(e)
        row = []
        for level in sorted(grouped):
            lo, hi = spread_interval(q, beta, i, level)
            row.append(SpreadClass(i, level, lo * base, hi * base, frozenset(grouped[level])))
        classes[i] = row
    return SpreadDecomposition(eps, beta, base, classes)


# ---------------------------------------------------------------- unfolding


def copy_budget(n: int) -> int:
    raw = os.environ.get("MATROIDX_BUDGET_COPIES")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise InputError(f"MATROIDX_BUDGET_COPIES is not an integer: {raw!r}") from None
    return DEFAULT_COPIES_PER_ELEMENT * max(n, 1)


def integer_weight(w) -> int:
    w = as_fraction(w)
    if w.denominator != 1 or w < 1:
        raise InputError(f"unfolding needs integer weights >= 1, got {w}")
    return int(w)


@dataclass
class QueryAudit:
    """Largest number of base-oracle calls spent on a single unfolded query."""

    independence_queries: int = 0
    rank_queries: int = 0
    max_independence_cost: int = 0
    max_rank_cost: int = 0

    def record(self, kind: str, cost: int) -> None:
        if kind == "independence":
            self.independence_queries += 1
            self.max_independence_cost = max(self.max_independence_cost, cost)
        else:
            self.rank_queries += 1
            self.max_rank_cost = max(self.max_rank_cost, cost)


class Unfolding:
    """Copy bookkeeping: element e with weight w owns copies (e, 1) .. (e, w).

    Copy ids are dense and assigned in insertion order, so an unfolding can
    grow while a stream delivers elements.
    """

    def __init__(self, m1: Matroid, m2: Matroid, budget: Optional[int] = None):
        self.base1 = m1
        self.base2 = m2
        self.budget = copy_budget(m1.ground_size) if budget is None else budget
        self.owner: list[tuple[int, int]] = []  # copy id -> (element, index)
        self.copies: dict[int, list[int]] = {}  # element -> copy ids, index order
        self.weights: dict[int, int] = {}
        self.ledger = ResourceLedger()
        self.audit = QueryAudit()
        self.m1 = UnfoldedMatroid(self, 1)
        self.m2 = UnfoldedMatroid(self, 2)

    @property
    def size(self) -> int:
        return len(self.owner)

    @property
    def W(self) -> int:
        return max(self.weights.values(), default=0)

    def add(self, e: int, w) -> list[int]:
        w = integer_weight(w)
        if e in self.weights:
            raise InputError(f"element {e} already unfolded")
        if not 0 <= e < self.base1.ground_size:
            raise InputError(f"element {e} outside the ground set")
        if self.size + w > self.budget:
            raise BudgetError(f"unfolding would need {self.size + w} copies, budget {self.budget}")
        start = self.size
        ids = list(range(start, start + w))
        self.owner.extend((e, j) for j in range(1, w + 1))
        self.copies[e] = ids
        self.weights[e] = w
        return ids

    def copy_id(self, e: int, j: int) -> int:
        return self.copies[e][j - 1]

    def slice_of(self, c: int, side: int) -> int:
        e, j = self.owner[c]
        return j if side == 1 else self.weights[e] - j + 1

    def copy_in_slice(self, e: int, s: int, side: int) -> int:
        j = s if side == 1 else self.weights[e] - s + 1
        return self.copies[e][j - 1]

    def slices(self, S: Iterable[int], side: int) -> dict[int, set]:
        out: dict[int, set] = {}
        owner, weights = self.owner, self.weights
        for c in S:
            e, j = owner[c]
            s = j if side == 1 else weights[e] - j + 1
            out.setdefault(s, set()).add(e)
        return out

    def refold(self, S: Iterable[int]) -> frozenset:
        return frozenset(self.owner[c][0] for c in S)

    def lift(self, S: Iterable[int]) -> frozenset:
        """All copies of the given originals."""
        return frozenset(c for e in S for c in self.copies[e])


class UnfoldedMatroid(Matroid):
    """Slice-wise oracle over copies; side 1 slices by index, side 2 by reversed index."""

    kind = "unfolded"
    memoize = False

    def __init__(self, unfolding: Unfolding, side: int):
        self.unfolding = unfolding
        self.side = side
        self.base = unfolding.base1 if side == 1 else unfolding.base2
        super().__init__(0, unfolding.ledger)

    @property
    def ground_size(self):
        return self.unfolding.size

    @ground_size.setter
    def ground_size(self, value):
        pass

    def _independent(self, S):
        base = self.base
        before = base.ledger.independence_calls
        answer = True
        for members in self.unfolding.slices(S, self.side).values():
            if not base.is_independent(frozenset(members)):
                answer = False
                break
        self.unfolding.audit.record("independence", base.ledger.independence_calls - before)
        return answer

    def _rank(self, S):
        base = self.base
        before = base.ledger.rank_calls
        total = sum(base.rank(frozenset(m)) for m in self.unfolding.slices(S, self.side).values())
        self.unfolding.audit.record("rank", base.ledger.rank_calls - before)
        return total

    def extends(self, I, c):
        # slices form a direct sum, so only the slice receiving c can become dependent
        I = self._check(I)
        self._check((c,))
        self.ledger.independence_calls += 1
        u = self.unfolding
        s = u.slice_of(c, self.side)
        members = {u.owner[x][0] for x in I if u.slice_of(x, self.side) == s}
        members.add(u.owner[c][0])
        before = self.base.ledger.independence_calls
        answer = self.base.is_independent(frozenset(members))
        u.audit.record("independence", self.base.ledger.independence_calls - before)
        return answer

    def find_circuit(self, I, c):
        # I + c differs from I only in the slice of c and slices form a direct sum,
        # so probing is needed only inside that slice (one base call per probe)
        u = self.unfolding
        s = u.slice_of(c, self.side)
        e = u.owner[c][0]
        members = frozenset(
            u.owner[x][0] for x in I if u.slice_of(x, self.side) == s
        )
        before = self.base.ledger.independence_calls
        circuit = self.base.find_circuit(members, e)
        self.ledger.independence_calls += self.base.ledger.independence_calls - before
        if circuit is None:
            return None
        return frozenset(u.copy_in_slice(x, s, self.side) for x in circuit)


def unfold(inst: WeightedInstance, budget: Optional[int] = None) -> Unfolding:
    """Unfold an integer-weighted instance; copies are laid out by ascending element id."""
    u = Unfolding(inst.m1, inst.m2, budget)
    total = 0
    for e in inst.elements:
        total += integer_weight(inst.weights[e])
    if total > u.budget:
        raise BudgetError(f"unfolding needs {total} copies, budget {u.budget}")
    for e in inst.elements:
        u.add(e, inst.weights[e])
    return u


def refold(u: Unfolding, S: Iterable[int]) -> frozenset:
    S = as_element_set(S)
    if S and (min(S) < 0 or max(S) >= u.size):
        raise InputError("copy id outside the unfolded ground set")
    return u.refold(S)


# ---------------------------------------------------------------- merging


def merge_order(elements: Iterable[int], weights: dict) -> list[int]:
    return sorted(elements, key=lambda e: (-weights[e], e))


def greedy_merge(parts: Sequence[Iterable[int]], inst: WeightedInstance) -> frozenset:
    """Combine per-class common independent sets, heaviest class first.

    ``parts`` is ordered by descending weight class.  Within a class elements
    are tried by descending weight, then ascending id.
    """
    merged: set = set()
    for part in parts:
        part = as_element_set(part)
        if not inst.is_common_independent(part):
            raise PreconditionError(f"class set {sorted(part)} is not common independent")
        for e in merge_order(part, inst.weights):
            trial = frozenset(merged | {e})
            if inst.m1.is_independent(trial) and inst.m2.is_independent(trial):
                merged.add(e)
    return frozenset(merged)


# ---------------------------------------------------------------- duals


@dataclass(frozen=True)
class ChainDual:
    """Positive integer values on a strictly decreasing chain of sets."""

    entries: tuple = ()

    def __post_init__(self):
        entries = tuple((frozenset(S), int(v)) for S, v in self.entries)
        object.__setattr__(self, "entries", entries)

    def validate(self) -> None:
        for S, v in self.entries:
            if v < 1:
                raise PreconditionError(f"dual value {v} is not a positive integer")
        for (big, _), (small, _) in zip(self.entries, self.entries[1:]):
            if not small < big:
                raise PreconditionError("dual support is not a strictly decreasing chain")

    def coverage(self, e) -> int:
        return sum(v for S, v in self.entries if e in S)

    def value(self, m: Matroid) -> int:
        return sum(v * m.rank(S) for S, v in self.entries)

    @classmethod
    def from_levels(cls, level: dict) -> "ChainDual":
        """Chain whose t-th superlevel set {e : level[e] >= t} gets value 1, merged."""
        top = max(level.values(), default=0)
        entries: list = []
        for t in range(1, top + 1):
            S = frozenset(e for e, a in level.items() if a >= t)
            if entries and entries[-1][0] == S:
                entries[-1] = (S, entries[-1][1] + 1)
            else:
                entries.append((S, 1))
        return cls(tuple(entries))


@dataclass
class DualPair:
    """Dual assignments as (set, value) lists; a set may carry several unit values."""

    y: list = field(default_factory=list)
    z: list = field(default_factory=list)

    def value(self, m1: Matroid, m2: Matroid) -> int:
        return sum(v * m1.rank(S) for S, v in self.y) + sum(v * m2.rank(S) for S, v in self.z)

    def coverage(self) -> dict:
        cover: dict = {}
        for S, v in itertools.chain(self.y, self.z):
            for e in S:
                cover[e] = cover.get(e, 0) + v
        return cover

    def is_feasible(self, requirement: dict) -> bool:
        cover = self.coverage()
        return all(cover.get(e, 0) >= need for e, need in requirement.items())


def weighted_dual_value(yp: ChainDual, zp: ChainDual, inst: WeightedInstance) -> int:
    return yp.value(inst.m1) + zp.value(inst.m2)


def unweighted_dual(yp: ChainDual, zp: ChainDual, inst: WeightedInstance,
                    u: Optional[Unfolding] = None) -> tuple[DualPair, Unfolding]:
    """Split a chain dual of the weighted pair into unit duals on the unfolded pair.

    The f-th unit of the y-chain covers copy index f of every element in its
    set (heavy enough to have one); the f-th unit of the z-chain covers copy
    ``w(e) + 1 - f``.
    """
    yp.validate()
    zp.validate()
    weights = {e: integer_weight(w) for e, w in inst.weights.items()}
    for e, w in weights.items():
        if yp.coverage(e) + zp.coverage(e) < w:
            raise PreconditionError(f"input duals do not cover element {e} {w} times")
    if u is None:
        u = unfold(inst)
    out = DualPair()
    f = 1
    for S, v in yp.entries:
        for _ in range(v):
            copies = frozenset(u.copy_id(e, f) for e in S if weights.get(e, 0) >= f)
            out.y.append((copies, 1))
            f += 1
    f = 1
    for T, v in zp.entries:
        for _ in range(v):
            copies = frozenset(u.copy_id(e, weights[e] + 1 - f) for e in T if weights.get(e, 0) >= f)
            out.z.append((copies, 1))
            f += 1
    return out, u


# ---------------------------------------------------------------- brute force


def brute_force_opt(inst: WeightedInstance, limit: int = 20) -> tuple[Fraction, frozenset]:
    """Heaviest common independent set by depth-first enumeration.

    Among maximizers the lexicographically smallest sorted tuple wins; the
    include-first traversal visits sets in that order, so the first maximum
    found is kept.
    """
    elements = inst.elements
    if len(elements) > limit:
        raise BudgetError(f"exhaustive search refuses {len(elements)} > {limit} elements")
    weights = inst.weights
    suffix = [Fraction(0)] * (len(elements) + 1)
    for k in range(len(elements) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + weights[elements[k]]
    best = [Fraction(-1), frozenset()]
    m1, m2 = inst.m1, inst.m2

    def visit(k: int, current: frozenset, weight: Fraction):
        if weight > best[0]:
            best[0], best[1] = weight, current
        if k == len(elements) or weight + suffix[k] <= best[0]:
            return
        e = elements[k]
        trial = current | {e}
        if m1.is_independent(trial) and m2.is_independent(trial):
            visit(k + 1, trial, weight + weights[e])
        visit(k + 1, current, weight)

    visit(0, frozenset(), Fraction(0))
    return best[0], best[1]


def brute_force_max_cardinality(m1: Matroid, m2: Matroid, elements: Optional[Iterable[int]] = None,
                                limit: int = 32) -> tuple[int, frozenset]:
    """Largest common independent set by branch and bound with rank upper bounds."""
    elements = sorted(m1.elements & m2.elements if elements is None else elements)
    if len(elements) > limit:
        raise BudgetError(f"exhaustive search refuses {len(elements)} > {limit} elements")
    everything = frozenset(elements)
    cap = min(m1.rank(everything), m2.rank(everything))
    best = [-1, frozenset()]

    def visit(k: int, current: frozenset):
        if len(current) > best[0]:
            best[0], best[1] = len(current), current
        if best[0] >= cap or k == len(elements):
            return
        if len(current) + len(elements) - k <= best[0]:
            return
        pool = current | frozenset(elements[k:])
        bound = min(m1.rank(pool), m2.rank(pool))
        if bound <= best[0]:
            return
        e = elements[k]
        trial = current | {e}
        if m1.is_independent(trial) and m2.is_independent(trial):
            visit(k + 1, trial)
        visit(k + 1, current)

    visit(0, frozenset())
    return best[0], best[1]


def brute_force_chain_duals(inst: WeightedInstance, max_n: int = 5, max_w: int = 4
                            ) -> tuple[ChainDual, ChainDual]:
    """Optimal integral chain duals for a small integer-weighted instance.

    A chain dual is determined by how often it covers each element, so the
    search runs over the y-coverage ``a(e)`` in ``0..w(e)``; z covers the
    rest.  The minimum is checked against the primal optimum.
    """
    elements = inst.elements
    weights = {e: integer_weight(inst.weights[e]) for e in elements}
    if len(elements) > max_n or any(w > max_w for w in weights.values()):
        raise BudgetError(f"chain dual search limited to n <= {max_n}, W <= {max_w}")
    best_value, best_levels = None, None
    for levels in itertools.product(*(range(weights[e] + 1) for e in elements)):
        a = dict(zip(elements, levels))
        b = {e: weights[e] - a[e] for e in elements}
        value = _level_cost(inst.m1, a) + _level_cost(inst.m2, b)
        if best_value is None or value < best_value:
            best_value, best_levels = value, a
    if best_levels is None:
        best_value, best_levels = 0, {}
    yp = ChainDual.from_levels(best_levels)
    zp = ChainDual.from_levels({e: weights[e] - best_levels[e] for e in best_levels})
    primal, _ = brute_force_opt(inst)
    if primal != best_value:
        raise MatroidError(f"dual search found {best_value} but the primal optimum is {primal}")
    return yp, zp


def _level_cost(m: Matroid, level: dict) -> int:
    top = max(level.values(), default=0)
    return sum(m.rank(frozenset(e for e, a in level.items() if a >= t)) for t in range(1, top + 1))
