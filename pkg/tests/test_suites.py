import pytest

from matroidx.core import PartitionMatroid, UniformMatroid, WeightedInstance
from matroidx.generate import small_example
from matroidx.reduction import brute_force_opt
from matroidx.suites import SUITES, minimize, suite_axioms, without_element

SMALL = {
    "axioms": 10,
    "unfold-equivalence": 10,
    "duals": 5,
    "charging": 20,
    "merge": 10,
    "auction": 10,
    "pipeline": 10,
    "models": 5,
}


def test_without_element_shifts_ids():
    inst = small_example()
    smaller = without_element(inst, 0)
    assert smaller.n == 2
    assert smaller.weights == {0: 2, 1: 1}
    assert smaller.m1.is_independent({0, 1})  # blocks [0, 1] after deleting element 0


def test_without_element_does_not_touch_the_original():
    inst = small_example()
    without_element(inst, 1)
    assert inst.n == 3 and inst.m1.params()["blocks"] == [0, 0, 1]


def test_without_element_clamps_uniform_rank():
    m = UniformMatroid(2, 2)
    inst = WeightedInstance(m, m, {0: 1, 1: 1})
    assert without_element(inst, 0).m1.params()["k"] == 1


def test_minimize_finds_small_witness():
    m1 = PartitionMatroid([0, 0, 1, 1, 2], [1, 1, 1])
    m2 = UniformMatroid(5, 5)
    inst = WeightedInstance(m1, m2, {e: 1 for e in range(5)})
    # property "optimum is at least 2" needs only two elements from different blocks
    shrunk = minimize(inst, lambda x: brute_force_opt(x)[0] >= 2)
    assert shrunk.n == 2
    assert brute_force_opt(shrunk)[0] == 2


@pytest.mark.parametrize("name", sorted(SUITES))
def test_suites_pass_at_small_count(name):
    report = SUITES[name](count=SMALL[name], seed=1)
    assert report.ok, report.failures[:1]
    assert report.cases >= SMALL[name]
    data = report.to_json()
    assert data["suite"] == name and data["ok"]


def test_corrupt_axioms_fail_with_witness():
    report = suite_axioms(count=3, corrupt=True)
    assert not report.ok
    assert all(f["witness"] for f in report.failures)
