"""Unweighted intersection solvers, the price-based additive solver, and the full
weighted-to-unweighted pipeline."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .core import (
    ContractViolation,
    InputError,
    Matroid,
    ResourceLedger,
    WeightedInstance,
    as_element_set,
)
from .io import format_fraction
from .reduction import (
    RoundedWeights,
    as_fraction,
    brute_force_opt,
    check_epsilon,
    greedy_merge,
    rescale_round,
    spread_decompose,
    unfold,
)

DEFAULT_CLASS_RESOLUTION = 4


def _ground(m1: Matroid, m2: Matroid, elements) -> list[int]:
    if elements is None:
        return sorted(m1.elements & m2.elements)
    return sorted(elements)


# ------------------------------------------------------------ bases & greedy


def max_weight_base(m: Matroid, weights: dict, previous: Iterable[int] = (),
                    elements: Optional[Iterable[int]] = None) -> frozenset:
    """Greedy heaviest base over the positive-weight elements.

    Ties go to members of ``previous``, then to the smaller id.  Elements
    of weight zero are never selected.
    """
    previous = as_element_set(previous)
    pool = weights if elements is None else elements
    order = sorted(
        (e for e in pool if weights[e] > 0),
        key=lambda e: (-weights[e], e not in previous, e),
    )
    base: frozenset = frozenset()
    for e in order:
        trial = base | {e}
        if m.is_independent(trial):
            base = trial
    return base


def greedy_mi(m1: Matroid, m2: Matroid, order: Optional[Iterable[int]] = None) -> frozenset:
    """Scan ``order`` once, keeping each element that leaves the set independent in both."""
    order = _ground(m1, m2, None) if order is None else list(order)
    current: frozenset = frozenset()
    for e in order:
        if m1.extends(current, e) and m2.extends(current, e):
            current = current | {e}
    return current


def exact_mi(m1: Matroid, m2: Matroid, elements: Optional[Iterable[int]] = None) -> frozenset:
    """Maximum-cardinality common independent set via shortest augmenting paths.

    Starts from the greedy solution.  In the exchange graph an outside
    element x is a source when I + x is independent in m1 and a sink when it
    is independent in m2; arcs run y -> x for y in the m1-circuit of x and
    x -> y for y in the m2-circuit of x.
    """
    ground = _ground(m1, m2, elements)
    current = greedy_mi(m1, m2, ground)
    while True:
        path = _shortest_augmenting_path(m1, m2, ground, current)
        if path is None:
            return current
        current = current.symmetric_difference(path)


def _shortest_augmenting_path(m1, m2, ground, I: frozenset) -> Optional[list]:
    outside = [x for x in ground if x not in I]
    sources = []
    feeds: dict = {}  # y in I -> outside elements x with y in the m1-circuit of x
    for x in outside:
        circuit = m1.find_circuit(I, x)
        if circuit is None:
            sources.append(x)
        else:
            for y in circuit:
                if y != x:
                    feeds.setdefault(y, []).append(x)
    if not sources:
        return None
    parent = {x: None for x in sources}
    queue = deque(sources)
    while queue:
        v = queue.popleft()
        if v in I:
            for x in feeds.get(v, ()):
                if x not in parent:
                    parent[x] = v
                    queue.append(x)
            continue
        circuit = m2.find_circuit(I, v)
        if circuit is None:
            path = []
            while v is not None:
                path.append(v)
                v = parent[v]
            return path
        for y in sorted(circuit):
            if y != v and y not in parent:
                parent[y] = v
                queue.append(y)
    return None


class UnweightedSolver:
    """Cardinality solver with a declared approximation factor ``alpha``."""

    name = "abstract"
    alpha = Fraction(1)

    def solve(self, m1: Matroid, m2: Matroid, elements=None) -> frozenset:
        raise NotImplementedError


class ExactSolver(UnweightedSolver):
    name = "exact"
    alpha = Fraction(1)

    def solve(self, m1, m2, elements=None):
        return exact_mi(m1, m2, elements)


class GreedySolver(UnweightedSolver):
    name = "greedy"
    alpha = Fraction(1, 2)

    def solve(self, m1, m2, elements=None):
        return greedy_mi(m1, m2, _ground(m1, m2, elements))


SOLVERS = {"exact": ExactSolver(), "greedy": GreedySolver()}


def get_solver(solver) -> UnweightedSolver:
    if isinstance(solver, UnweightedSolver):
        return solver
    try:
        return SOLVERS[solver]
    except KeyError:
        raise InputError(f"unknown solver {solver!r}; choose from {sorted(SOLVERS)}") from None


# ------------------------------------------------------------------ auction


@dataclass
class AuctionResult:
    selected: frozenset
    iterations: int
    prices: dict
    w_a: dict
    w_b: dict
    S_a: frozenset
    S_b: frozenset
    epsilon: Fraction
    independence_calls: int
    violations: list = field(default_factory=list)


def auction_price_cap(eps: Fraction) -> int:
    return 2 * math.ceil(1 / eps)


def auction_call_budget(n: int, eps: Fraction) -> int:
    """Upper bound on independence calls: two greedy bases per round plus the initial pair."""
    cap = auction_price_cap(eps)
    rounds = cap * n // (math.floor(eps * n) + 1)
    return 2 * n * (rounds + 1)


def run_auction(inst: WeightedInstance, eps, debug: bool = False) -> AuctionResult:
    """Price-based additive approximation for weighted intersection.

    Every element starts with its full weight on the first side and nothing
    on the second.  Each round, the elements chosen only by the first side
    (and not yet at the price cap) raise their second-side weight, or, if
    already raised, lower their first-side weight.  Stops once at most
    ``eps * n`` such elements remain and returns the common part.
    """
    eps = as_fraction_open(eps)
    m_a, m_b = inst.m1, inst.m2
    weights = inst.weights
    elements = inst.elements
    n = len(elements)
    cap = auction_price_cap(eps)
    step = {e: eps * (1 - eps) * weights[e] for e in elements}
    price = {e: 0 for e in elements}
    w_a = dict(weights)
    w_b = {e: Fraction(0) for e in elements}
    calls_before = m_a.ledger.independence_calls + (
        m_b.ledger.independence_calls if m_b.ledger is not m_a.ledger else 0
    )
    S_a = max_weight_base(m_a, w_a)
    S_b = max_weight_base(m_b, w_b)
    violations: list = []
    rounds = 0
    while True:
        if debug:
            violations.extend(_auction_violations(rounds, elements, weights, price, w_a, w_b,
                                                  S_a, S_b, step, cap))
        X = [e for e in sorted(S_a - S_b) if price[e] < cap]
        if len(X) <= eps * n:
            break
        rounds += 1
        for e in X:
            price[e] += 1
            if w_a[e] + w_b[e] == weights[e]:
                w_b[e] += step[e]
            else:
                w_a[e] -= step[e]
        S_a = max_weight_base(m_a, w_a, S_a)
        S_b = max_weight_base(m_b, w_b, S_b)
    calls = m_a.ledger.independence_calls + (
        m_b.ledger.independence_calls if m_b.ledger is not m_a.ledger else 0
    ) - calls_before
    return AuctionResult(S_a & S_b, rounds, price, w_a, w_b, S_a, S_b, eps, calls, violations)


def as_fraction_open(eps) -> Fraction:
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise InputError(f"auction precision must lie in (0, 1), got {eps}")
    return eps


def _auction_violations(rounds, elements, weights, price, w_a, w_b, S_a, S_b, step, cap):
    found = []
    for e in elements:
        if price[e] > cap:
            found.append((rounds, "price cap", e))
        if w_a[e] + w_b[e] not in (weights[e], weights[e] + step[e]):
            found.append((rounds, "weight sum", e))
        if w_a[e] < 0 or w_b[e] < 0:
            found.append((rounds, "negative weight", e))
    for e in S_b - S_a:
        if w_b[e] != 0:
            found.append((rounds, "b-only element with b-weight", e))
    return found


def auction_additive(inst: WeightedInstance, eps) -> frozenset:
    return run_auction(inst, eps).selected


def splitting_upper_bound(inst: WeightedInstance, result: AuctionResult) -> Fraction:
    """Weight-splitting upper bound on the optimum built from the final auction state.

    Undo the pending second-side raise where the two sides overshoot, so the
    split sums to w exactly, then add the heaviest bases of both sides.
    """
    w_b_split = {}
    for e in inst.elements:
        extra = result.w_a[e] + result.w_b[e] - inst.weights[e]
        w_b_split[e] = result.w_b[e] - extra
    S_b_split = max_weight_base(inst.m2, w_b_split)
    return (sum((result.w_a[e] for e in result.S_a), Fraction(0))
            + sum((w_b_split[e] for e in S_b_split), Fraction(0)))


# ------------------------------------------------------------------ pipeline


def composed_bound(alpha: Fraction, eps: Fraction, class_resolution: int) -> Fraction:
    """Guaranteed fraction of the optimum, as the product of every stage's loss.

    rounding (1+eps)^-2, best spread index (1-eps), class merge (1-4eps),
    extraction (1-eps), per-class integer weights q/(q+1).
    """
    q = class_resolution
    return (alpha / (1 + eps) ** 2 * (1 - eps) * (1 - 4 * eps) * (1 - eps)
            * Fraction(q, q + 1))


@dataclass
class ClassResult:
    index: int
    level: int
    elements: frozenset
    class_weights: dict
    unfolded_size: int
    W_class: int
    solver_output_size: int
    refolded: frozenset
    extracted: frozenset
    unfolded_calls: int
    solve_base_calls: int
    extraction_calls: int
    extraction_budget: int
    reused: bool = False


@dataclass
class PipelineReport:
    selected: frozenset
    weight: Fraction
    epsilon: Fraction
    solver: str
    alpha: Fraction
    class_resolution: int
    bound: Fraction
    constant: Fraction
    chosen_index: Optional[int]
    index_weights: dict
    classes: list
    rounding: Optional[RoundedWeights]
    ledgers: dict

    def to_json(self) -> dict:
        return {
            "selected": sorted(self.selected),
            "weight": format_fraction(self.weight),
            "epsilon": format_fraction(self.epsilon),
            "solver": self.solver,
            "alpha": format_fraction(self.alpha),
            "class_resolution": self.class_resolution,
            "bound": format_fraction(self.bound),
            "bound_float": float(self.bound),
            "constant": format_fraction(self.constant),
            "chosen_index": self.chosen_index,
            "index_weights": {str(i): format_fraction(w) for i, w in sorted(self.index_weights.items())},
            "classes": [
                {
                    "index": c.index,
                    "level": c.level,
                    "elements": sorted(c.elements),
                    "unfolded_size": c.unfolded_size,
                    "W_class": c.W_class,
                    "solver_output_size": c.solver_output_size,
                    "refolded": sorted(c.refolded),
                    "extracted": sorted(c.extracted),
                    "unfolded_calls": c.unfolded_calls,
                    "solve_base_calls": c.solve_base_calls,
                    "extraction_calls": c.extraction_calls,
                    "reused": c.reused,
                }
                for c in self.classes
            ],
            "ledgers": self.ledgers,
        }


def _distinct_ledgers(*oracles: Matroid) -> list[ResourceLedger]:
    seen = {}
    for m in oracles:
        seen[id(m.ledger)] = m.ledger
    return list(seen.values())


def _independence_total(ledgers) -> int:
    return sum(ledger.independence_calls for ledger in ledgers)


def class_integer_weights(weights: dict, elements: Iterable[int], resolution: int,
                          floor_value: Optional[Fraction] = None) -> dict:
    """Integer weights with the class minimum (or ``floor_value``) mapped to ``resolution``."""
    elements = list(elements)
    low = min(weights[e] for e in elements) if floor_value is None else floor_value
    return {e: math.floor(weights[e] * resolution / low) for e in elements}


def extract(inst: WeightedInstance, support: Iterable[int], eps: Fraction,
            method: str = "auction") -> tuple[frozenset, int, int]:
    """Heavy common independent subset of ``support``; returns (set, calls, call budget).

    Loops are dropped first so the heaviest remaining element alone is a
    feasible solution; the auction precision eps/(3k) then keeps the additive
    loss below eps times that element's weight.
    """
    ledgers = _distinct_ledgers(inst.m1, inst.m2)
    before = _independence_total(ledgers)
    kept = [e for e in sorted(support)
            if inst.m1.is_independent({e}) and inst.m2.is_independent({e})]
    if not kept:
        return frozenset(), _independence_total(ledgers) - before, 2 * len(list(support))
    sub = inst.restrict(kept)
    if method == "exact":
        chosen = brute_force_opt(sub)[1]
        budget = None
    elif method == "auction":
        delta = eps / (3 * len(kept))
        chosen = run_auction(sub, delta).selected
        budget = auction_call_budget(len(kept), delta)
    else:
        raise InputError(f"unknown extraction method {method!r}")
    calls = _independence_total(ledgers) - before
    budget = 2 * len(kept) + (budget if budget is not None else calls)
    return chosen, calls, budget


def solve_class(rounded: WeightedInstance, elements: frozenset, solver: UnweightedSolver,
                eps: Fraction, resolution: int, extraction: str = "auction",
                budget: Optional[int] = None, floor_value=None, index=0, level=0) -> ClassResult:
    """Integer-weight one class, unfold, solve cardinality, refold, extract."""
    class_weights = class_integer_weights(rounded.weights, elements, resolution, floor_value)
    sub = rounded.restrict(elements).reweighted(class_weights)
    u = unfold(sub, budget)
    ledgers = _distinct_ledgers(rounded.m1, rounded.m2)
    base_before = _independence_total(ledgers)
    chosen = solver.solve(u.m1, u.m2, range(u.size))
    solve_base = _independence_total(ledgers) - base_before
    unfolded_calls = u.ledger.independence_calls
    if not isinstance(chosen, frozenset) or (chosen and (min(chosen) < 0 or max(chosen) >= u.size)):
        raise ContractViolation(f"solver {solver.name} returned ids outside the unfolded ground set")
    if not (u.m1.is_independent(chosen) and u.m2.is_independent(chosen)):
        raise ContractViolation(f"solver {solver.name} returned a set that is not common independent")
    refolded = u.refold(chosen)
    extracted, calls, call_budget = extract(rounded, refolded, eps, extraction)
    return ClassResult(index, level, frozenset(elements), class_weights, u.size, u.W, len(chosen),
                       refolded, extracted, unfolded_calls, solve_base, calls, call_budget)


def weighted_mi_reduce(inst: WeightedInstance, eps, solver="exact", *,
                       class_resolution: int = DEFAULT_CLASS_RESOLUTION,
                       extraction: str = "auction", budget: Optional[int] = None) -> PipelineReport:
    """Approximate maximum-weight common independent set through unweighted solves.

    Rounds weights to powers of (1+eps), splits them into well-separated
    classes for each of ceil(1/eps) offsets, solves every class as an
    unfolded cardinality problem, extracts a weighted set from the refolded
    support, merges classes per offset and keeps the heaviest offset.
    """
    eps = check_epsilon(eps)
    solver = get_solver(solver)
    if class_resolution < 1:
        raise InputError("class resolution must be a positive integer")
    bound = composed_bound(solver.alpha, eps, class_resolution)
    constant = (1 - bound / solver.alpha) / eps
    ledgers = _distinct_ledgers(inst.m1, inst.m2)
    before = [ledger.copy() for ledger in ledgers]
    if not inst.weights:
        return PipelineReport(frozenset(), Fraction(0), eps, solver.name, solver.alpha,
                              class_resolution, bound, constant, None, {}, [], None,
                              {"original": ResourceLedger().as_dict()})
    rounded, rw = rescale_round(inst, eps)
    spread = spread_decompose(rw.rounded, eps)
    solved: dict = {}
    classes: list[ClassResult] = []
    index_sets: dict = {}
    merge_calls = 0
    for i in range(1, spread.beta + 1):
        parts = []
        for cls in reversed(spread.classes[i]):
            if cls.elements in solved:
                prior = solved[cls.elements]
                result = ClassResult(**{**prior.__dict__, "index": i, "level": cls.level, "reused": True})
            else:
                result = solve_class(rounded, cls.elements, solver, eps, class_resolution,
                                     extraction, budget, index=i, level=cls.level)
                solved[cls.elements] = result
            classes.append(result)
            parts.append(result.extracted)
        merge_before = _independence_total(ledgers)
        index_sets[i] = greedy_merge(parts, rounded)
        merge_calls += _independence_total(ledgers) - merge_before
    index_weights = {i: inst.weight(S) for i, S in index_sets.items()}
    chosen = max(index_sets, key=lambda i: (index_weights[i], -i))
    selected = index_sets[chosen]
    if not inst.is_common_independent(selected):
        raise ContractViolation("pipeline produced a set that is not common independent")
    total = ResourceLedger()
    for ledger, start in zip(ledgers, before):
        total = total.merged(ledger.since(start))
    fresh = [c for c in classes if not c.reused]
    report_ledgers = {
        "original": total.as_dict(),
        "unfolded_independence_calls": sum(c.unfolded_calls for c in fresh),
        "solve_base_calls": sum(c.solve_base_calls for c in fresh),
        "solve_call_allowance": sum(c.W_class * c.unfolded_calls for c in fresh),
        "extraction_calls": sum(c.extraction_calls for c in fresh),
        "extraction_budget": sum(c.extraction_budget for c in fresh),
        "merge_calls": merge_calls,
        "distinct_classes": len(fresh),
    }
    return PipelineReport(selected, inst.weight(selected), eps, solver.name, solver.alpha,
                          class_resolution, bound, constant, chosen, index_weights, classes, rw,
                          report_ledgers)
