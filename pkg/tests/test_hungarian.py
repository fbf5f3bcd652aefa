from __future__ import annotations

import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sted.errors import NonFinite, NonSquare
from sted.hungarian import BACKENDS, hungarian_solve


def brute_force(m) -> float:
    n = len(m)
    if n == 0:
        return 0.0
    return min(sum(m[i][p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


@pytest.mark.parametrize("backend", BACKENDS)
def test_examples(backend):
    assert hungarian_solve([[0]], backend) == ([(0, 0)], 0.0)
    assert hungarian_solve([[1, 2], [2, 1]], backend) == ([(0, 0), (1, 1)], 2.0)
    pairs, cost = hungarian_solve([[4, 1, 3], [2, 0, 5], [3, 2, 2]], backend)
    assert cost == 5.0 and pairs == [(0, 1), (1, 0), (2, 2)]
    assert hungarian_solve([], backend) == ([], 0.0)


@pytest.mark.parametrize("backend", BACKENDS)
def test_errors(backend):
    with pytest.raises(NonSquare):
        hungarian_solve([[1, 2]], backend)
    with pytest.raises(NonFinite):
        hungarian_solve([[1, float("nan")], [0, 1]], backend)
    with pytest.raises(NonFinite):
        hungarian_solve([[float("inf")]], backend)
    with pytest.raises(ValueError):
        hungarian_solve([[1]], "lapjv")


@pytest.mark.parametrize("backend", BACKENDS)
def test_matches_brute_force_on_integer_ties(backend):
    # small integer ranges produce many tied optima
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(1, 6)
        m = [[rng.randint(0, 3) for _ in range(n)] for _ in range(n)]
        pairs, cost = hungarian_solve(m, backend)
        assert cost == brute_force(m)
        assert sorted(j for _, j in pairs) == list(range(n))
        assert [i for i, _ in pairs] == list(range(n))


@pytest.mark.parametrize("backend", BACKENDS)
def test_deterministic(backend):
    m = np.ones((7, 7))
    assert hungarian_solve(m, backend) == hungarian_solve(m.copy(), backend)


def test_backends_agree_on_larger_matrices():
    rng = np.random.default_rng(3)
    for n in (10, 15, 25, 40):
        m = rng.uniform(0, 10, size=(n, n))
        _, a = hungarian_solve(m, "scipy")
        _, b = hungarian_solve(m, "python")
        assert a == pytest.approx(b, abs=1e-9)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.floats(0, 10, allow_nan=False), min_size=n, max_size=n), min_size=n, max_size=n)
))
def test_total_is_sum_of_selected_entries(m):
    for backend in BACKENDS:
        pairs, cost = hungarian_solve(m, backend)
        assert cost == sum(m[i][j] for i, j in pairs)
        assert cost == pytest.approx(brute_force(m), abs=1e-9)
