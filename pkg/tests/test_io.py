import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from matroidx.core import InputError
from matroidx.generate import FAMILY_PAIRS, GeneratorSpec, generate
from matroidx.io import dumps_instance, format_fraction, loads_instance, parse_fraction


def test_fraction_format_round_trip():
    assert format_fraction(Fraction(3, 4)) == "3/4"
    assert format_fraction(2) == "2/1"
    assert parse_fraction("3/4") == Fraction(3, 4)
    assert parse_fraction("2") == 2
    assert parse_fraction(5) == 5


@pytest.mark.parametrize("bad", ["x", "1/0", True, 1.5, None])
def test_bad_rationals(bad):
    with pytest.raises(InputError):
        parse_fraction(bad)


def test_schema_shape(e1):
    data = json.loads(dumps_instance(e1))
    assert data == {
        "n": 3,
        "matroid1": {"family": "partition", "blocks": [0, 0, 1], "caps": [1, 1]},
        "matroid2": {"family": "uniform", "k": 2},
        "weights": ["3/1", "2/1", "1/1"],
    }


def test_gf2_columns_are_bitstrings():
    inst = generate(GeneratorSpec("linear_gf2", "uniform", 4, 1))
    data = json.loads(dumps_instance(inst))
    rows = data["matroid1"]["rows"]
    assert all(len(c) == rows and set(c) <= {"0", "1"} for c in data["matroid1"]["columns"])


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    '{"n": 1, "weights": ["1"], "matroid1": {"family": "uniform", "k": 1}}',
    '{"n": 1, "weights": ["1"], "matroid1": {"family": "nope"}, "matroid2": {"family": "uniform", "k": 1}}',
    '{"n": 2, "weights": ["1"], "matroid1": {"family": "uniform", "k": 1}, "matroid2": {"family": "uniform", "k": 1}}',
    '{"n": 1, "weights": ["0"], "matroid1": {"family": "uniform", "k": 1}, "matroid2": {"family": "uniform", "k": 1}}',
    '{"n": 1, "weights": ["1"], "matroid1": {"family": "linear_gf2", "rows": 2, "columns": ["102"]}, "matroid2": {"family": "uniform", "k": 1}}',
    '{"n": 1, "weights": ["1"], "matroid1": {"family": "graphic", "vertices": 2, "edges": [[0, 5]]}, "matroid2": {"family": "uniform", "k": 1}}',
])
def test_malformed_instances_are_input_errors(text):
    with pytest.raises(InputError):
        loads_instance(text)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(FAMILY_PAIRS), st.integers(0, 10), st.integers(0, 10**6))
def test_round_trip_preserves_every_answer(pair, n, seed):
    inst = generate(GeneratorSpec(pair[0], pair[1], n, seed, "loguniform:30"))
    again = loads_instance(dumps_instance(inst))
    assert again.weights == inst.weights
    for k in range(n + 1):
        for S in itertools.combinations(range(n), k):
            assert again.m1.is_independent(S) == inst.m1.is_independent(S)
            assert again.m2.is_independent(S) == inst.m2.is_independent(S)
            assert again.m1.rank(S) == inst.m1.rank(S)
            assert again.m2.rank(S) == inst.m2.rank(S)
    assert dumps_instance(again) == dumps_instance(inst)
