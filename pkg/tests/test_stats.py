"""Correlations against scipy as the independent oracle."""

from __future__ import annotations

import math
import random

import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from hauser.stats import (
    inter_rater_agreement,
    pearson,
    rank_with_ties,
    spearman,
)


def test_pearson_matches_scipy():
    rng = random.Random(7)
    for _ in range(50):
        x = [rng.uniform(-5, 5) for _ in range(30)]
        y = [rng.uniform(-5, 5) for _ in range(30)]
        ours = pearson(x, y)
        ref_r, ref_p = scipy.stats.pearsonr(x, y)
        assert ours.coefficient == pytest.approx(ref_r, abs=1e-10)
        assert ours.p_value == pytest.approx(ref_p, abs=1e-10)


def test_spearman_matches_scipy():
    rng = random.Random(13)
    for _ in range(50):
        # integer-valued samples force ties through the average-rank path
        x = [rng.randint(0, 8) for _ in range(30)]
        y = [rng.uniform(-5, 5) for _ in range(30)]
        ours = spearman(x, y)
        ref_r, ref_p = scipy.stats.spearmanr(x, y)
        assert ours.coefficient == pytest.approx(ref_r, abs=1e-10)
        assert ours.p_value == pytest.approx(ref_p, abs=1e-10)


def test_perfect_correlation():
    x = [1.0, 2.0, 3.0, 4.0]
    result = pearson(x, [2 * v + 1 for v in x])
    assert result.coefficient == pytest.approx(1.0)
    assert result.p_value == 0.0
    inverse = pearson(x, [-v for v in x])
    assert inverse.coefficient == pytest.approx(-1.0)


def test_zero_variance_raises():
    with pytest.raises(ValueError):
        pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        spearman([1.0, 2.0, 3.0], [5.0, 5.0, 5.0])


def test_input_validation():
    with pytest.raises(ValueError):
        pearson([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        pearson([1.0, 2.0, 3.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        pearson([1.0, 2.0, math.nan], [1.0, 2.0, 3.0])


def test_rank_with_ties():
    assert rank_with_ties([10.0, 20.0, 30.0]) == [1.0, 2.0, 3.0]
    assert rank_with_ties([1.0, 1.0, 2.0]) == [1.5, 1.5, 3.0]
    assert rank_with_ties([5.0, 5.0, 5.0]) == [2.0, 2.0, 2.0]
    assert rank_with_ties([3.0, 1.0, 2.0, 1.0]) == [4.0, 1.5, 3.0, 1.5]


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.integers(min_value=-50, max_value=50), min_size=4, max_size=25),
)
def test_spearman_invariant_under_monotone_transform(x):
    # integer values keep the monotone transforms injective in float space
    x = [float(v) for v in x]
    rng = random.Random(42)
    y = [rng.uniform(0, 1) for _ in x]
    try:
        base = spearman(x, y)
    except ValueError:
        return  # constant sample, nothing to compare
    stretched = spearman([3.0 * v + 7.0 for v in x], y)
    assert stretched.coefficient == pytest.approx(base.coefficient, abs=1e-12)
    cubed = spearman([v ** 3 for v in x], y)
    assert cubed.coefficient == pytest.approx(base.coefficient, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.floats(min_value=-10, max_value=10),
            st.floats(min_value=-10, max_value=10),
        ),
        min_size=3,
        max_size=40,
    )
)
def test_pearson_bounded(pairs):
    x = [p[0] for p in pairs]
    y = [p[1] for p in pairs]
    try:
        result = pearson(x, y)
    except ValueError:
        return
    assert -1.0 <= result.coefficient <= 1.0
    assert 0.0 <= result.p_value <= 1.0


# ---------------------------------------------------------------------------
# Agreement


def test_identical_raters_agree_perfectly():
    scores = [3.0, 1.0, 4.0, 1.0, 5.0, 2.0]
    result = inter_rater_agreement({"a": scores, "b": scores, "c": scores})
    assert result.mean_pearson == pytest.approx(1.0)
    assert result.max_pearson == pytest.approx(1.0)
    assert result.mean_spearman == pytest.approx(1.0)
    assert result.max_spearman == pytest.approx(1.0)
    assert result.excluded == ()


def test_constant_rater_is_excluded():
    result = inter_rater_agreement(
        {
            "steady": [3.0, 3.0, 3.0, 3.0],
            "a": [1.0, 2.0, 3.0, 4.0],
            "b": [1.0, 2.0, 3.0, 5.0],
        }
    )
    assert "steady" in result.excluded
    assert set(result.per_rater) == {"a", "b"}


def test_agreement_mean_and_max_differ():
    result = inter_rater_agreement(
        {
            "good": [1.0, 2.0, 3.0, 4.0, 5.0],
            "close": [1.0, 2.0, 3.0, 5.0, 4.0],
            "noisy": [3.0, 1.0, 4.0, 2.0, 5.0],
        }
    )
    assert result.max_pearson > result.mean_pearson
    assert all(-1.0 <= v <= 1.0 for pair in result.per_rater.values() for v in pair)


def test_agreement_validation():
    with pytest.raises(ValueError):
        inter_rater_agreement({"only": [1.0, 2.0, 3.0]})
    with pytest.raises(ValueError):
        inter_rater_agreement({"a": [1.0, 2.0, 3.0], "b": [1.0, 2.0]})
    with pytest.raises(ValueError):
        inter_rater_agreement({"a": [1.0, 2.0], "b": [1.0, 2.0]})
    with pytest.raises(ValueError):
        inter_rater_agreement({"a": [1.0, 1.0, 1.0], "b": [2.0, 2.0, 2.0]})
