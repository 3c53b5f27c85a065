import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matroidx.core import (
    ContractViolation,
    GraphicMatroid,
    InputError,
    PartitionMatroid,
    UniformMatroid,
    WeightedInstance,
)
from matroidx.generate import FAMILY_PAIRS, GeneratorSpec, corpus, empty_instance, generate
from matroidx.reduction import brute_force_max_cardinality, brute_force_opt, unfold
from matroidx.solvers import (
    UnweightedSolver,
    auction_additive,
    auction_price_cap,
    composed_bound,
    exact_mi,
    get_solver,
    greedy_mi,
    max_weight_base,
    run_auction,
    splitting_upper_bound,
    weighted_mi_reduce,
)


def best_base_weight(m, weights):
    # reference: heaviest independent set by enumeration
    n = m.ground_size
    best = Fraction(0)
    for mask in range(1 << n):
        S = frozenset(e for e in range(n) if mask >> e & 1)
        if m.is_independent(S):
            best = max(best, sum((weights[e] for e in S), Fraction(0)))
    return best


# ------------------------------------------------------------------- bases


def test_max_weight_base_examples(triangle):
    assert max_weight_base(UniformMatroid(3, 2), {0: 5, 1: 3, 2: 1}) == {0, 1}
    assert max_weight_base(UniformMatroid(3, 2), {0: 0, 1: 0, 2: 0}) == frozenset()
    assert max_weight_base(triangle, {0: 3, 1: 2, 2: 1}) == {0, 1}


def test_max_weight_base_tie_rule():
    m = UniformMatroid(3, 1)
    weights = {0: 1, 1: 1, 2: 1}
    assert max_weight_base(m, weights) == {0}
    assert max_weight_base(m, weights, previous={2}) == {2}


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["uniform", "partition", "graphic", "linear_gf2"]), st.integers(0, 7),
       st.integers(0, 10**6))
def test_max_weight_base_is_optimal(family, n, seed):
    rng = random.Random(seed)
    m = generate(GeneratorSpec(family, "uniform", n, seed)).m1
    weights = {e: Fraction(rng.randint(0, 6)) for e in range(n)}
    base = max_weight_base(m, weights)
    assert m.is_independent(base)
    assert all(weights[e] > 0 for e in base)
    assert sum((weights[e] for e in base), Fraction(0)) == best_base_weight(m, weights)


# ------------------------------------------------------ unweighted solvers


def test_exact_examples(e1):
    assert len(exact_mi(e1.m1, e1.m2)) == 2
    g = GraphicMatroid(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
    assert len(exact_mi(g, g)) == g.rank(range(5))
    blocks = PartitionMatroid([0, 1, 2], [1, 1, 1])
    assert exact_mi(blocks, UniformMatroid(3, 0)) == frozenset()


def test_greedy_examples(e1):
    for order in ([0, 1, 2], [2, 1, 0], [1, 0, 2], [1, 2, 0]):
        assert len(greedy_mi(e1.m1, e1.m2, order)) >= 1
    u = UniformMatroid(0, 0)
    assert greedy_mi(u, u) == frozenset()


def test_greedy_can_be_exactly_half():
    # found by searching two-block partition pairs on three elements
    m1 = PartitionMatroid([0, 0, 1], [1, 1])
    m2 = PartitionMatroid([0, 1, 0], [1, 1])
    assert greedy_mi(m1, m2, [0, 1, 2]) == {0}
    assert brute_force_max_cardinality(m1, m2)[0] == 2


def test_greedy_half_search_finds_tight_instances():
    found = 0
    for spec, inst in corpus(40, (2, 5), "int:1", seed=9):
        best = brute_force_max_cardinality(inst.m1, inst.m2)[0]
        for order in itertools.permutations(range(inst.n)):
            got = len(greedy_mi(inst.m1, inst.m2, order))
            assert 2 * got >= best
            found += best > 0 and 2 * got == best
    assert found > 0


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FAMILY_PAIRS), st.integers(0, 12), st.integers(0, 10**6))
def test_exact_matches_brute_force(pair, n, seed):
    inst = generate(GeneratorSpec(pair[0], pair[1], n, seed))
    best = exact_mi(inst.m1, inst.m2)
    assert inst.is_common_independent(best)
    assert len(best) == brute_force_max_cardinality(inst.m1, inst.m2)[0]
    greedy = greedy_mi(inst.m1, inst.m2)
    assert inst.is_common_independent(greedy) and 2 * len(greedy) >= len(best)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FAMILY_PAIRS), st.integers(1, 5), st.integers(0, 10**6))
def test_exact_matches_brute_force_on_unfolded_pairs(pair, n, seed):
    inst = generate(GeneratorSpec(pair[0], pair[1], n, seed, "int:3"))
    u = unfold(inst)
    best = exact_mi(u.m1, u.m2)
    assert len(best) == brute_force_opt(inst)[0]


def test_exact_on_larger_instances():
    for spec, inst in corpus(16, (13, 16), "int:1", seed=2):
        assert len(exact_mi(inst.m1, inst.m2)) == brute_force_max_cardinality(inst.m1, inst.m2)[0]


def test_solver_registry():
    assert get_solver("exact").alpha == 1
    assert get_solver("greedy").alpha == Fraction(1, 2)
    with pytest.raises(InputError):
        get_solver("simplex")


# ------------------------------------------------------------------ auction


def test_auction_on_e1(e1):
    result = run_auction(e1, Fraction(1, 10), debug=True)
    assert e1.is_common_independent(result.selected)
    assert e1.weight(result.selected) >= 4 - 3 * 3 * Fraction(1, 10) * 3
    assert not result.violations
    assert splitting_upper_bound(e1, result) >= 4


def test_auction_single_free_element():
    m = UniformMatroid(1, 1)
    inst = WeightedInstance(m, m, {0: 5})
    assert auction_additive(inst, Fraction(1, 10)) == {0}


def test_auction_large_epsilon_returns_first_intersection(e1):
    result = run_auction(e1, Fraction(9, 10))
    assert result.iterations == 0
    assert e1.weight(result.selected) >= 4 - 3 * 3 * Fraction(9, 10) * 3


@pytest.mark.parametrize("eps", [0, 1, Fraction(3, 2)])
def test_auction_precision_window(e1, eps):
    with pytest.raises(InputError):
        run_auction(e1, eps)


def test_price_cap():
    assert auction_price_cap(Fraction(1, 10)) == 20
    assert auction_price_cap(Fraction(1, 3)) == 6


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FAMILY_PAIRS), st.integers(1, 7), st.integers(0, 10**6),
       st.sampled_from([Fraction(1, 20), Fraction(1, 10), Fraction(1, 4)]))
def test_auction_guarantees(pair, n, seed, eps):
    inst = generate(GeneratorSpec(pair[0], pair[1], n, seed, "int:5"))
    result = run_auction(inst, eps, debug=True)
    opt = brute_force_opt(inst)[0]
    W = max(inst.weights.values())
    assert inst.is_common_independent(result.selected)
    assert inst.weight(result.selected) >= opt - 3 * W * eps * n
    assert not result.violations
    assert all(p <= auction_price_cap(eps) for p in result.prices.values())
    assert splitting_upper_bound(inst, result) >= opt


# ----------------------------------------------------------------- pipeline


def test_composed_bound_value():
    eps = Fraction(1, 10)
    expected = Fraction(100, 121) * Fraction(9, 10) * Fraction(6, 10) * Fraction(9, 10) * Fraction(4, 5)
    assert composed_bound(Fraction(1), eps, 4) == expected


def test_pipeline_on_e1(e1):
    report = weighted_mi_reduce(e1, Fraction(1, 10), "exact")
    assert report.weight == 4 and report.selected == {0, 2}
    greedy = weighted_mi_reduce(e1, Fraction(1, 10), "greedy")
    assert greedy.weight >= greedy.bound * 4
    assert greedy.constant == (1 - greedy.bound / greedy.alpha) / Fraction(1, 10)


def test_pipeline_single_element():
    m = UniformMatroid(1, 1)
    inst = WeightedInstance(m, m, {0: Fraction(7, 3)})
    for solver in ("exact", "greedy"):
        assert weighted_mi_reduce(inst, Fraction(1, 10), solver).selected == {0}


def test_pipeline_empty_instance():
    report = weighted_mi_reduce(empty_instance(), Fraction(1, 10), "greedy")
    assert report.weight == 0 and report.selected == frozenset()


def test_pipeline_exact_extraction(figure):
    report = weighted_mi_reduce(figure, Fraction(1, 4), "exact", extraction="exact")
    assert report.weight == 4


class EverythingSolver(UnweightedSolver):
    name = "everything"

    def solve(self, m1, m2, elements=None):
        return frozenset(elements)


def test_pipeline_rejects_dependent_solver_output(e1):
    with pytest.raises(ContractViolation):
        weighted_mi_reduce(e1, Fraction(1, 10), EverythingSolver())


def test_pipeline_report_json(e1):
    data = weighted_mi_reduce(e1, Fraction(1, 10), "exact").to_json()
    assert data["weight"] == "4/1" and data["selected"] == [0, 2]
    assert set(data["ledgers"]) >= {"original", "solve_call_allowance", "extraction_budget"}


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FAMILY_PAIRS), st.integers(1, 7), st.integers(0, 10**6),
       st.sampled_from(["exact", "greedy"]))
def test_pipeline_ratio_and_metering(pair, n, seed, solver):
    inst = generate(GeneratorSpec(pair[0], pair[1], n, seed, "loguniform:50"))
    report = weighted_mi_reduce(inst, Fraction(1, 10), solver)
    opt = brute_force_opt(inst)[0]
    assert inst.is_common_independent(report.selected)
    assert report.weight >= report.bound * opt
    L = report.ledgers
    assert L["original"]["independence_calls"] <= (
        L["solve_call_allowance"] + L["extraction_budget"] + L["merge_calls"])
    for c in report.classes:
        assert c.extraction_calls <= c.extraction_budget
