from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sted.consistency import (
    SimilaritySet,
    consistency_score,
    evaluate_consistency,
    mean_consistency,
    pairwise_similarities,
    score_from_sigma_hat,
    sigma_max,
    summary_stats,
)
from sted.errors import EmptySet, InputError, PairComparisonError, TooFew
from sted.tree import tree_from_value


def doc(v):
    return tree_from_value(v)


def test_pair_counts():
    assert len(pairwise_similarities([doc(1), doc(2)]).values) == 1
    assert len(pairwise_similarities([doc(i) for i in range(10)]).values) == 45
    same = pairwise_similarities([doc({"a": 1})] * 5)
    assert same.values == (1.0,) * 10
    assert pairwise_similarities([]).values == ()


def test_pair_order_is_lexicographic():
    outs = [doc({"a": 1}), doc({"a": 1}), doc({"a": 2})]
    v = pairwise_similarities(outs).values
    assert v[0] == 1.0 and v[1] < 1.0 and v[2] < 1.0


def test_parallel_equals_sequential():
    outs = [doc({"a": i, "b": [i, i + 1], "name": f"n{i}"}) for i in range(6)]
    assert pairwise_similarities(outs, jobs=3).values == pairwise_similarities(outs).values


def test_pair_error_is_annotated():
    class Boom:
        def text_similarity(self, *a, **k):
            raise InputError("provider exploded")

        def __getattr__(self, name):
            raise InputError("provider exploded")

    with pytest.raises(PairComparisonError) as err:
        pairwise_similarities([doc({"a": "x"}), doc({"b": "y"})], embedder=Boom())
    assert (err.value.i, err.value.j) == (0, 1)


def test_mean_examples():
    assert mean_consistency([0.8]) == 0.8
    assert mean_consistency([1.0, 0.5, 0.75]) == 0.75
    assert mean_consistency([1.0] * 7) == 1.0
    with pytest.raises(EmptySet):
        mean_consistency([])


def test_sigma_max():
    assert sigma_max(2) == 0.5
    assert sigma_max(4) == 0.5
    # three values: one zero, two ones
    assert sigma_max(3) == pytest.approx(math.sqrt(2) / 3)
    with pytest.raises(TooFew):
        sigma_max(1)


def test_score_examples():
    assert consistency_score([0.9, 0.9, 0.9]).consistency_score == 1.0
    assert consistency_score([]).consistency_score == 1.0
    assert consistency_score([0.4]).consistency_score == 1.0
    r = consistency_score([0.0, 1.0])
    assert r.sigma_hat == 1.0
    assert abs(r.consistency_score - (1 / 3) ** 20) <= 1e-15


def test_report_dict_field_order():
    d = consistency_score(SimilaritySet((0.5, 1.0, 0.75), 3)).to_dict()
    assert list(d) == [
        "mean_consistency", "sigma", "sigma_max", "sigma_hat", "consistency_score", "alpha", "mode", "n_outputs", "summary",
    ]
    assert d["n_outputs"] == 3 and d["summary"]["median"] == 0.75


def test_summary_stats():
    s = summary_stats([1.0, 0.0, 0.5, 0.5])
    assert (s.mean, s.min, s.max, s.median) == (0.5, 0.0, 1.0, 0.5)
    assert s.std == pytest.approx(math.sqrt(0.125))
    with pytest.raises(EmptySet):
        summary_stats([])


def test_strictly_decreasing_on_grid():
    grid = [k / 99 for k in range(100)]
    scores = [score_from_sigma_hat(g) for g in grid]
    assert all(a > b for a, b in zip(scores, scores[1:]))


def test_set_rejects_out_of_range():
    with pytest.raises(InputError):
        SimilaritySet((1.2,), 2)


unit = st.floats(0.0, 1.0, allow_nan=False)


@settings(max_examples=300)
@given(st.lists(unit, min_size=2, max_size=30))
def test_score_range_and_constant(vals):
    r = consistency_score(vals)
    assert 0.0 <= r.sigma_hat <= 1.0
    assert 0.0 < r.consistency_score <= 1.0
    assert consistency_score([vals[0]] * len(vals)).consistency_score == 1.0


@settings(max_examples=300)
@given(st.lists(unit, min_size=1, max_size=15))
def test_duplicating_values_keeps_sigma_and_even_score(vals):
    # for an even count the extreme construction is scale-free, so doubling
    # every value leaves sigma and sigma_max (hence the score) unchanged
    a = consistency_score(vals)
    assert consistency_score(vals + vals).sigma == pytest.approx(a.sigma, abs=1e-12)
    if len(vals) % 2:
        vals = vals + vals[:1]
        a = consistency_score(vals)
    b = consistency_score(vals + vals)
    assert b.consistency_score == pytest.approx(a.consistency_score, rel=1e-9, abs=1e-300)
    assert b.mean_consistency == pytest.approx(a.mean_consistency)


def test_evaluate_identical_outputs_all_modes():
    outs = [doc({"a": [1, 2], "b": "x"})] * 3
    for mode in ("structural", "semantic", "hybrid"):
        r = evaluate_consistency(outs, mode)
        assert (r.consistency_score, r.mean_consistency, r.mode) == (1.0, 1.0, mode)


def test_evaluate_value_only_changes():
    outs = [doc({"id": i, "name": n, "ok": b}) for i, n, b in [(1, "ann", True), (7, "bob", False), (9, "cy", True)]]
    assert evaluate_consistency(outs, "structural").consistency_score == 1.0
    assert evaluate_consistency(outs, "semantic").consistency_score < 1.0


def test_evaluate_restructured_member():
    base = {"user": {"name": "ann", "email": "a@x"}, "id": 3}
    flat = {"user_name": "ann", "user_email": "a@x", "id": 3}
    outs = [doc(base), doc(base), doc(flat)]
    structural = evaluate_consistency(outs, "structural").mean_consistency
    equal = evaluate_consistency([doc(base)] * 3, "semantic").mean_consistency
    assert structural < equal


def test_evaluate_errors():
    with pytest.raises(InputError):
        evaluate_consistency([doc(1)], "fuzzy")
    with pytest.raises(EmptySet):
        evaluate_consistency([], "hybrid")
    assert evaluate_consistency([doc(1)], "hybrid").consistency_score == 1.0
