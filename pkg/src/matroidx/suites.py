"""Seeded property suites shared by ``matroidx verify`` and the test-suite.

Every suite returns a :class:`SuiteReport`.  Failures on weighted instances
are shrunk by deleting elements one at a time for as long as the failure
persists, and the shrunken instance is dumped as JSON.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .core import (
    Matroid,
    MatroidError,
    WeightedInstance,
    fundamental_circuit,
    verify_matroid_axioms,
)
from .generate import FAMILY_PAIRS, corpus, random_matroid
from .io import FAMILIES, format_fraction, instance_from_json, instance_to_json
from .models import (
    GreedyProtocol,
    StreamingGreedy,
    comm_weighted_wrapper,
    one_pass_greedy_weighted,
    run_protocol,
    run_stream,
    streaming_weighted_wrapper,
)
from .reduction import (
    brute_force_chain_duals,
    brute_force_max_cardinality,
    brute_force_opt,
    greedy_merge,
    rescale_round,
    unfold,
    unweighted_dual,
    weighted_dual_value,
)
from .solvers import (
    auction_call_budget,
    run_auction,
    splitting_upper_bound,
    weighted_mi_reduce,
)

AUCTION_CALL_CONSTANT = 4  # calls <= C * n / eps**2 on the desk-scale corpus


@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"suite": self.name, "ok": self.ok, "cases": self.cases,
                "failures": self.failures, "stats": self.stats,
                "seconds": round(self.seconds, 3)}


# ------------------------------------------------------------- minimization


def without_element(inst: WeightedInstance, e: int) -> WeightedInstance:
    """The instance with element ``e`` deleted and later ids shifted down."""
    data = instance_to_json(inst)
    data["n"] -= 1
    del data["weights"][e]
    for key in ("matroid1", "matroid2"):
        params = data[key]
        for field_name in ("blocks", "edges", "columns"):
            if field_name in params:
                del params[field_name][e]
        if params["family"] == "uniform":
            params["k"] = min(params["k"], data["n"])
    return instance_from_json(data)


def minimize(inst: WeightedInstance, fails: Callable[[WeightedInstance], bool]) -> WeightedInstance:
    """Greedily delete elements while ``fails`` keeps returning True."""
    changed = True
    while changed and inst.n > 0:
        changed = False
        for e in reversed(range(inst.n)):
            smaller = without_element(inst, e)
            try:
                still = fails(smaller)
            except MatroidError:
                still = False
            if still:
                inst, changed = smaller, True
                break
    return inst


def _failure(report: SuiteReport, label: str, inst: Optional[WeightedInstance],
             fails: Optional[Callable] = None, **info) -> None:
    entry = {"case": label, **info}
    if inst is not None:
        shrunk = minimize(inst, fails) if fails is not None else inst
        entry["counterexample"] = instance_to_json(shrunk)
    report.failures.append(entry)


def _timed(fn):
    def run(*args, **kwargs) -> SuiteReport:
        start = time.perf_counter()
        report = fn(*args, **kwargs)
        report.seconds = time.perf_counter() - start
        return report
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# ------------------------------------------------------------------- suites


class CorruptedMatroid(Matroid):
    """Negative control: a set is independent unless it has exactly two elements."""

    kind = "corrupted"

    def _independent(self, S):
        return len(S) != 2


@_timed
def suite_axioms(count: int = 200, seed: int = 0, corrupt: bool = False) -> SuiteReport:
    """Axiom check on random family oracles and on unfolded oracles of small instances."""
    report = SuiteReport("axioms")
    rng = random.Random(seed)
    if corrupt:
        result = verify_matroid_axioms(CorruptedMatroid(4))
        report.cases += 1
        if not result.ok:
            report.failures.append({"case": "corrupted oracle", "violation": result.violation,
                                    "witness": [sorted(x) if isinstance(x, frozenset) else x
                                                for x in result.witness]})
        return report
    for k in range(count // 2):
        family = FAMILIES[k % len(FAMILIES)]
        m = random_matroid(family, rng.randint(0, 10), rng)
        result = verify_matroid_axioms(m)
        report.cases += 1
        if not result.ok:
            report.failures.append({"case": f"{family} #{k}", "params": m.params(),
                                    "violation": result.violation})
    for spec, inst in corpus(count - count // 2, (1, 6), "int:4", seed, max_total_weight=12):
        u = unfold(inst)
        for side in (u.m1, u.m2):
            result = verify_matroid_axioms(side)
            report.cases += 1
            if not result.ok:
                _failure(report, f"unfolded side {side.side} of {spec}", inst,
                         violation=result.violation)
    return report


@_timed
def suite_unfold_equivalence(count: int = 200, seed: int = 0, max_n: int = 6, max_w: int = 4,
                             max_total_weight=None, check_axioms: bool = False) -> SuiteReport:
    """Unfolded maximum cardinality equals the weighted optimum; per-query cost at most W."""
    report = SuiteReport("unfold-equivalence")
    worst_ind = worst_rank = 0
    queries = 0

    def mismatch(inst):
        u = unfold(inst)
        return brute_force_max_cardinality(u.m1, u.m2)[0] != brute_force_opt(inst)[0]

    for spec, inst in corpus(count, (1, max_n), f"int:{max_w}", seed, max_total_weight):
        report.cases += 1
        u = unfold(inst)
        unfolded = brute_force_max_cardinality(u.m1, u.m2)[0]
        opt, best = brute_force_opt(inst)
        if unfolded != opt:
            _failure(report, str(spec), inst, mismatch, unfolded=unfolded,
                     weighted=format_fraction(opt))
        lifted = frozenset(c for e in best for c in u.copies[e])
        if not (u.m1.is_independent(lifted) and u.m2.is_independent(lifted)):
            _failure(report, f"lift of optimum {spec}", inst)
        # rank queries on a few copy subsets, for the per-query cost audit
        rng = random.Random(str(spec))
        for _ in range(4):
            S = [c for c in range(u.size) if rng.random() < 0.5]
            u.m1.rank(S)
            u.m2.rank(S)
        W = u.W
        a = u.audit
        queries += a.independence_queries + a.rank_queries
        worst_ind = max(worst_ind, a.max_independence_cost)
        worst_rank = max(worst_rank, a.max_rank_cost)
        if a.max_independence_cost > W or a.max_rank_cost > W:
            _failure(report, f"query cost {spec}", inst, W=W,
                     independence=a.max_independence_cost, rank=a.max_rank_cost)
        if check_axioms:
            for side in (u.m1, u.m2):
                result = verify_matroid_axioms(side)
                if not result.ok:
                    _failure(report, f"axioms side {side.side} {spec}", inst,
                             violation=result.violation)
    report.stats = {"unfolded_queries": queries, "max_independence_cost": worst_ind,
                    "max_rank_cost": worst_rank}
    return report


@_timed
def suite_duals(count: int = 50, seed: int = 0, max_n: int = 4, max_w: int = 4) -> SuiteReport:
    """Split optimal chain duals onto the unfolded pair: feasible and value-preserving."""
    report = SuiteReport("duals")
    for spec, inst in corpus(count, (1, max_n), f"int:{max_w}", seed):
        report.cases += 1
        yp, zp = brute_force_chain_duals(inst, max_n=max_n, max_w=max_w)
        g = weighted_dual_value(yp, zp, inst)
        pair, u = unweighted_dual(yp, zp, inst)
        f = pair.value(u.m1, u.m2)
        feasible = pair.is_feasible({c: 1 for c in range(u.size)})
        opt = brute_force_opt(inst)[0]
        if not feasible or f != g or g != opt:
            _failure(report, str(spec), inst, feasible=feasible, f=f, g=g,
                     opt=format_fraction(opt))
    return report


def random_independent(m: Matroid, pool, rng: random.Random) -> frozenset:
    return extend_independent(m, frozenset(), pool, rng)


def extend_independent(m: Matroid, chosen: frozenset, pool, rng: random.Random) -> frozenset:
    pool = list(pool)
    rng.shuffle(pool)
    for e in pool:
        if m.is_independent(chosen | {e}):
            chosen |= {e}
    return chosen


@_timed
def suite_charging(count: int = 500, seed: int = 0, max_n: int = 8) -> SuiteReport:
    """Circuits of spanned level-j elements hit at least l elements of I' outside S'_j.

    Draws configurations until ``count`` of them have at least one spanned
    element; draws with none are skipped.
    """
    report = SuiteReport("charging")
    rng = random.Random(seed)
    draws = 0
    for k in itertools.count():
        if report.cases >= count:
            break
        family = FAMILIES[k % len(FAMILIES)]
        n = rng.randint(2, max_n)
        m = random_matroid(family, n, rng)
        levels = rng.randint(2, 4)
        label = [rng.randrange(levels) for _ in range(n)]
        S = [random_independent(m, [e for e in range(n) if label[e] == t], rng)
             for t in range(levels)]
        j = rng.randrange(levels)
        # fill I from the higher levels first so level-j elements end up spanned more often
        I = random_independent(m, [e for t in range(j + 1, levels) for e in S[t]], rng)
        I = extend_independent(m, I, S[j], rng)
        spanned = [e for e in sorted(S[j] - I) if not m.is_independent(I | {e})]
        draws += 1
        if not spanned:
            continue
        report.cases += 1
        union = frozenset().union(*(fundamental_circuit(m, I, e) for e in spanned))
        hit = union & (I - S[j])
        if len(hit) < len(spanned):
            report.failures.append({"case": f"{family} #{k}", "params": m.params(),
                                    "levels": [sorted(s) for s in S], "j": j,
                                    "I": sorted(I), "spanned": sorted(spanned)})
    report.stats = {"draws": draws}
    return report


def spread_instance(rng: random.Random, eps: Fraction, n: int, pair) -> tuple[WeightedInstance, list]:
    """Instance whose weights fall into classes spaced more than 1/eps apart.

    Returns the instance and its classes as element lists, heaviest first.
    """
    q = 1 / eps
    classes = rng.randint(1, min(4, n))
    label = [rng.randrange(classes) for _ in range(n)]
    weights = {}
    for e in range(n):
        low = (q * 4) ** label[e]
        weights[e] = low * Fraction(rng.randint(100, 399), 100)
    m1 = random_matroid(pair[0], n, rng)
    m2 = random_matroid(pair[1], n, rng)
    inst = WeightedInstance(m1, m2, weights)
    groups = [[e for e in range(n) if label[e] == t] for t in reversed(range(classes))]
    return inst, [g for g in groups if g]


@_timed
def suite_merge(count: int = 100, seed: int = 0, epsilons=(Fraction(1, 20), Fraction(1, 10),
                Fraction(1, 5)), max_n: int = 8) -> SuiteReport:
    """Greedy merge of per-class optima keeps a (1 - 4 eps) share of their total."""
    report = SuiteReport("merge")
    rng = random.Random(seed)
    worst = None
    for eps in epsilons:
        for k in range(count):
            pair = FAMILY_PAIRS[k % len(FAMILY_PAIRS)]
            inst, groups = spread_instance(rng, eps, rng.randint(1, max_n), pair)
            parts = [brute_force_opt(inst.restrict(g))[1] if rng.random() < 0.5
                     else random_common(inst, g, rng) for g in groups]
            total = sum((inst.weight(p) for p in parts), Fraction(0))
            merged = greedy_merge(parts, inst)
            report.cases += 1
            if not inst.is_common_independent(merged) or inst.weight(merged) < (1 - 4 * eps) * total:
                report.failures.append({"case": f"eps={eps} #{k}", "instance": instance_to_json(inst),
                                        "parts": [sorted(p) for p in parts]})
            if total:
                ratio = inst.weight(merged) / total
                worst = ratio if worst is None else min(worst, ratio)
    report.stats = {"worst_merge_ratio": float(worst) if worst is not None else None}
    return report


def random_common(inst: WeightedInstance, pool, rng: random.Random) -> frozenset:
    chosen: frozenset = frozenset()
    pool = list(pool)
    rng.shuffle(pool)
    for e in pool:
        if inst.is_common_independent(chosen | {e}):
            chosen |= {e}
    return chosen


@_timed
def suite_auction(count: int = 100, seed: int = 0, epsilons=(Fraction(1, 20), Fraction(1, 10)),
                  max_n: int = 8, max_w: int = 5) -> SuiteReport:
    """Additive guarantee, state invariants, splitting certificate and call count."""
    report = SuiteReport("auction")
    worst_c = Fraction(0)
    for eps in epsilons:
        for spec, inst in corpus(count, (1, max_n), f"int:{max_w}", seed):
            report.cases += 1
            result = run_auction(inst, eps, debug=True)
            opt = brute_force_opt(inst)[0]
            n = inst.n
            W = max(inst.weights.values())
            got = inst.weight(result.selected)
            measured = Fraction(result.independence_calls) * eps ** 2 / n
            worst_c = max(worst_c, measured)

            def additive_fails(x, eps=eps):
                r = run_auction(x, eps)
                return x.weight(r.selected) < brute_force_opt(x)[0] - 3 * max(x.weights.values()) * eps * x.n

            problems = []
            if not inst.is_common_independent(result.selected):
                problems.append("not common independent")
            if got < opt - 3 * W * eps * n:
                problems.append("additive bound")
            if result.violations:
                problems.append(f"invariants {result.violations[:3]}")
            if splitting_upper_bound(inst, result) < opt:
                problems.append("splitting bound below optimum")
            if measured > AUCTION_CALL_CONSTANT:
                problems.append("call count")
            if result.independence_calls > auction_call_budget(n, eps):
                problems.append("call budget")
            if problems:
                fails = additive_fails if problems == ["additive bound"] else None
                _failure(report, f"eps={eps} {spec}", inst, fails, problems=problems)
    report.stats = {"call_constant": AUCTION_CALL_CONSTANT, "measured_constant": float(worst_c)}
    return report


@_timed
def suite_pipeline(count: int = 200, seed: int = 0, eps=Fraction(1, 10), solvers=("exact", "greedy"),
                   max_n: int = 8, aspect: int = 50) -> SuiteReport:
    """End-to-end ratio against the composed bound, plus the call-count inequality."""
    report = SuiteReport("pipeline")
    instances = corpus(count, (1, max_n), f"loguniform:{aspect}", seed)
    optima = [brute_force_opt(inst)[0] for _, inst in instances]
    stats = {}
    for solver in solvers:
        worst = None
        for (spec, inst), opt in zip(instances, optima):
            report.cases += 1
            rep = weighted_mi_reduce(inst, eps, solver)
            ratio = rep.weight / opt
            worst = ratio if worst is None else min(worst, ratio)
            L = rep.ledgers
            allowance = L["solve_call_allowance"] + L["extraction_budget"] + L["merge_calls"]

            def below(x, solver=solver):
                r = weighted_mi_reduce(x, eps, solver)
                return r.weight < r.bound * brute_force_opt(x)[0]

            if ratio < rep.bound:
                _failure(report, f"{solver} {spec}", inst, below, ratio=float(ratio),
                         bound=float(rep.bound))
            if not inst.is_common_independent(rep.selected):
                _failure(report, f"{solver} {spec} dependent output", inst)
            if L["original"]["independence_calls"] > allowance:
                _failure(report, f"{solver} {spec} call count", inst,
                         calls=L["original"]["independence_calls"], allowance=allowance)
        stats[solver] = {"worst_ratio": float(worst), "bound": float(rep.bound)}
    report.stats = stats
    return report


@_timed
def suite_models(count: int = 100, seed: int = 0, eps=Fraction(1, 10), max_n: int = 8,
                 aspect: int = 50) -> SuiteReport:
    """Streaming and one-way wrappers: ratios, passes, space inequality, one-way flow."""
    report = SuiteReport("models")
    stream_worst = comm_worst = None
    for k, (spec, inst) in enumerate(corpus(count, (1, max_n), f"loguniform:{aspect}", seed)):
        report.cases += 1
        opt = brute_force_opt(inst)[0]
        order = f"random:{seed + k}"
        alg = one_pass_greedy_weighted(eps)
        one = run_stream(alg, inst, order)
        wrapped_alg = streaming_weighted_wrapper(StreamingGreedy, eps)
        wrapped = run_stream(wrapped_alg, inst, order)
        problems = []
        if one.passes != 1:
            problems.append("one-pass greedy used more than one pass")
        if wrapped.passes != StreamingGreedy.passes:
            problems.append("wrapper changed the pass count")
        if one.selected != wrapped.selected:
            problems.append("one-pass greedy differs from wrapped greedy")
        if one.weight < (Fraction(1, 2) - eps) * opt:
            problems.append("stream ratio")
        details = wrapped.details
        space = details["class_count"] * details["max_class_peak"] + details["merge_buffer"]
        if wrapped.peak_stored > space:
            problems.append("space inequality")
        comm = run_protocol(comm_weighted_wrapper(GreedyProtocol(), eps), inst,
                            f"random:{seed + k}:1/2")
        bound = Fraction(comm.details["bound"])
        if comm.weight < bound * opt:
            problems.append("comm ratio")
        if comm.details["guard_violations"]:
            problems.append("one-way flow")
        if problems:
            _failure(report, str(spec), inst, None, problems=problems)
        if opt:
            r_stream, r_comm = one.weight / opt, comm.weight / opt
            stream_worst = r_stream if stream_worst is None else min(stream_worst, r_stream)
            comm_worst = r_comm if comm_worst is None else min(comm_worst, r_comm)
    report.stats = {"stream_worst_ratio": float(stream_worst or 0),
                    "comm_worst_ratio": float(comm_worst or 0)}
    return report


SUITES = {
    "axioms": suite_axioms,
    "unfold-equivalence": suite_unfold_equivalence,
    "duals": suite_duals,
    "charging": suite_charging,
    "merge": suite_merge,
    "auction": suite_auction,
    "pipeline": suite_pipeline,
    "models": suite_models,
}

