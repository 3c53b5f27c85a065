import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matroidx.core import (
    BudgetError,
    GraphicMatroid,
    InputError,
    LinearMatroidGF2,
    Matroid,
    PartitionMatroid,
    PreconditionError,
    ResourceLedger,
    UniformMatroid,
    WeightedInstance,
    contract,
    fundamental_circuit,
    is_independent,
    rank,
    restrict,
    verify_matroid_axioms,
)
from matroidx.generate import random_matroid
from matroidx.io import FAMILIES


def subsets(n):
    return [frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)]


# independent reference oracles: components by search, span size by enumeration

def graph_rank(vertices, edges, S):
    adj = {v: [] for v in range(vertices)}
    for e in S:
        u, v = edges[e]
        adj[u].append(v)
        adj[v].append(u)
    seen, components = set(), 0
    for start in range(vertices):
        if start in seen:
            continue
        components += 1
        stack = [start]
        while stack:
            v = stack.pop()
            if v not in seen:
                seen.add(v)
                stack.extend(adj[v])
    return vertices - components


def gf2_rank(columns, S):
    span = {0}
    for e in S:
        span |= {x ^ columns[e] for x in span}
    return len(span).bit_length() - 1


matroids = st.builds(
    lambda family, n, seed: random_matroid(family, n, random.Random(seed)),
    st.sampled_from(FAMILIES), st.integers(0, 7), st.integers(0, 10**6),
)


# ------------------------------------------------------------------ examples


def test_uniform_rejects_oversized_set():
    assert not is_independent(UniformMatroid(3, 2), {0, 1, 2})


def test_triangle_is_a_cycle(triangle):
    assert not is_independent(triangle, {0, 1, 2})
    assert rank(triangle, {0, 1, 2}) == 2


def test_partition_capacities():
    m = PartitionMatroid([0, 0, 1], [1, 1])
    assert is_independent(m, {0, 2})
    assert not is_independent(m, {0, 1})


def test_rank_of_empty_set_is_zero():
    for m in (UniformMatroid(4, 2), GraphicMatroid(2, [(0, 1)]), LinearMatroidGF2(2, [1, 2, 3])):
        assert rank(m, set()) == 0


def test_gf2_rank_of_dependent_triple():
    # columns (1,0), (0,1), (1,1)
    m = LinearMatroidGF2(2, [0b10, 0b01, 0b11])
    assert rank(m, {0, 1, 2}) == 2
    assert gf2_rank(m.columns, {0, 1, 2}) == 2


def test_out_of_range_ids_are_input_errors():
    m = UniformMatroid(3, 2)
    with pytest.raises(InputError):
        m.is_independent({3})
    with pytest.raises(InputError):
        m.rank({-1})


def test_restriction_examples(triangle):
    assert restrict(UniformMatroid(4, 2), {0, 1}).is_independent({0, 1})
    assert restrict(triangle, {0, 1}).rank({0, 1}) == 2
    r = restrict(UniformMatroid(3, 1), set())
    assert r.rank(set()) == 0
    with pytest.raises(InputError):
        restrict(UniformMatroid(4, 2), {0, 1}).is_independent({2})


def test_restriction_keeps_ids_and_shares_ledger():
    base = UniformMatroid(5, 3)
    r = restrict(base, {1, 3, 4})
    assert r.elements == {1, 3, 4}
    before = base.ledger.independence_calls
    r.is_independent({1, 4})
    assert base.ledger.independence_calls == before + 1


def test_contraction_examples(triangle):
    assert not contract(triangle, {0}).is_independent({1, 2})
    assert not contract(UniformMatroid(3, 2), {0}).is_independent({1, 2})
    m = GraphicMatroid(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    c = contract(m, set())
    for S in subsets(4):
        assert c.is_independent(S) == m.is_independent(S)
        assert c.rank(S) == m.rank(S)


def test_contraction_rejects_contracted_ids(triangle):
    with pytest.raises(InputError):
        contract(triangle, {0}).is_independent({0})


def test_fundamental_circuit_examples(triangle):
    assert fundamental_circuit(triangle, {0, 1}, 2) == {0, 1, 2}
    assert fundamental_circuit(UniformMatroid(3, 1), {0}, 1) == {0, 1}
    assert fundamental_circuit(PartitionMatroid([0, 0, 1], [1, 1]), {0}, 1) == {0, 1}


def test_fundamental_circuit_preconditions(triangle):
    with pytest.raises(PreconditionError):
        fundamental_circuit(triangle, {0}, 1)  # I + e independent
    with pytest.raises(PreconditionError):
        fundamental_circuit(UniformMatroid(3, 1), {0, 1}, 2)  # I dependent


def test_axiom_check_accepts_uniform():
    assert verify_matroid_axioms(UniformMatroid(4, 2)).ok


class NotTwo(Matroid):
    def _independent(self, S):
        return len(S) != 2


def test_axiom_check_rejects_corrupted_oracle():
    report = verify_matroid_axioms(NotTwo(4))
    assert not report.ok
    assert report.violation in ("downward closure", "exchange")
    assert report.witness


class BadExchange(Matroid):
    # independent: subsets of {0,1} or of {2}; violates exchange between {2} and {0,1}
    def _independent(self, S):
        return S <= {0, 1} or S <= {2}


def test_axiom_check_finds_exchange_violation():
    report = verify_matroid_axioms(BadExchange(3))
    assert report.violation == "exchange"


def test_axiom_check_refuses_large_ground_set():
    with pytest.raises(BudgetError):
        verify_matroid_axioms(UniformMatroid(13, 2))


def test_memoized_queries_are_still_counted():
    m = UniformMatroid(4, 2)
    m.is_independent({0, 1})
    m.is_independent({0, 1})
    assert m.ledger.independence_calls == 2


def test_ledger_merge_and_since():
    a = ResourceLedger(independence_calls=3, stored_elements_peak=5)
    b = ResourceLedger(independence_calls=4, rank_calls=1, stored_elements_peak=2)
    merged = a.merged(b)
    assert merged.independence_calls == 7 and merged.rank_calls == 1
    assert merged.stored_elements_peak == 5
    later = merged.copy()
    later.independence_calls += 10
    assert later.since(merged).independence_calls == 10


def test_weighted_instance_validation():
    m = UniformMatroid(2, 1)
    with pytest.raises(InputError):
        WeightedInstance(m, m, {0: 0})
    inst = WeightedInstance(m, m, {0: 2, 1: Fraction(1, 2)})
    assert inst.aspect_ratio() == 4
    assert inst.weight({0, 1}) == Fraction(5, 2)


# ---------------------------------------------------------------- properties


@settings(max_examples=60, deadline=None)
@given(matroids)
def test_families_satisfy_rank_axioms(m):
    n = m.ground_size
    sets = subsets(n)
    ranks = {S: m.rank(S) for S in sets}
    for S in sets:
        assert ranks[S] <= len(S)
        assert m.is_independent(S) == (ranks[S] == len(S))
    for A, B in itertools.product(sets, repeat=2):
        if A <= B:
            assert ranks[A] <= ranks[B] <= ranks[A] + len(B - A)
            if m.is_independent(B):
                assert m.is_independent(A)
        assert ranks[A] + ranks[B] >= ranks[A | B] + ranks[A & B]


@settings(max_examples=40, deadline=None)
@given(matroids)
def test_families_pass_exhaustive_axiom_check(m):
    assert verify_matroid_axioms(m).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_graphic_and_gf2_match_reference_rank(n, seed):
    rng = random.Random(seed)
    g = random_matroid("graphic", n, rng)
    lin = random_matroid("linear_gf2", n, rng)
    for S in subsets(n):
        assert g.rank(S) == graph_rank(g.vertices, g.edges, S)
        assert lin.rank(S) == gf2_rank(lin.columns, S)


@settings(max_examples=60, deadline=None)
@given(matroids, st.integers(0, 10**6))
def test_fundamental_circuit_is_minimal_dependent(m, seed):
    rng = random.Random(seed)
    order = list(range(m.ground_size))
    rng.shuffle(order)
    I = frozenset()
    for e in order:
        if m.is_independent(I | {e}):
            I |= {e}
    for e in sorted(set(range(m.ground_size)) - I):
        C = fundamental_circuit(m, I, e)
        assert e in C and C <= I | {e}
        assert not m.is_independent(C)
        for x in C:
            assert m.is_independent(C - {x})


@settings(max_examples=40, deadline=None)
@given(matroids)
def test_circuit_elimination(m):
    sets = subsets(m.ground_size)
    dependent = {S for S in sets if not m.is_independent(S)}
    circuits = [S for S in dependent if all(S - {x} not in dependent for x in S)]
    for C1, C2 in itertools.combinations(circuits, 2):
        for x in C1 & C2:
            rest = (C1 | C2) - {x}
            assert any(C <= rest for C in circuits)


@settings(max_examples=40, deadline=None)
@given(matroids, st.integers(0, 10**6))
def test_views_delegate_one_call_per_query(m, seed):
    rng = random.Random(seed)
    S = frozenset(e for e in range(m.ground_size) if rng.random() < 0.5)
    r = restrict(m, S)
    c = contract(m, S)
    for view in (r, c):
        for T in subsets(m.ground_size):
            if not T <= view.elements:
                continue
            before = m.ledger.independence_calls, m.ledger.rank_calls
            view.is_independent(T)
            view.rank(T)
            assert (m.ledger.independence_calls, m.ledger.rank_calls) == (before[0] + 1, before[1] + 1)


@settings(max_examples=40, deadline=None)
@given(matroids, st.integers(0, 10**6))
def test_restriction_and_contraction_semantics(m, seed):
    rng = random.Random(seed)
    S = frozenset(e for e in range(m.ground_size) if rng.random() < 0.5)
    r = restrict(m, S)
    c = contract(m, S)
    rank_S = m.rank(S)
    for T in subsets(m.ground_size):
        if T <= S:
            assert r.is_independent(T) == m.is_independent(T)
        if not T & S:
            # independence in M / S: T + (any base of S) independent in M
            assert c.is_independent(T) == (m.rank(T | S) - rank_S == len(T))
            assert c.rank(T) == m.rank(T | S) - rank_S
