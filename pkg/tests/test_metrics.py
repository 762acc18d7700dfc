import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from hidden_action.metrics import (
    average_excess,
    confidence_interval,
    distance_series,
    excess_probability,
    first_crossing,
    mean_normalized_action,
    squared_distance,
    summarize,
)

A = 2.0
panels = arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(2, 8)),
                elements=st.floats(0, 5))


def test_mean_normalized_action():
    assert mean_normalized_action(np.full((3, 4), A), 2, A) == 1
    assert mean_normalized_action(np.array([[0.5 * A], [1.5 * A]]), 1, A) == 1


def test_nonpositive_benchmark_is_rejected():
    with pytest.raises(ValueError):
        mean_normalized_action(np.ones((2, 2)), 1, 0)
    with pytest.raises(ValueError):
        squared_distance(np.ones((2, 2)), 1, -1)


def test_squared_distance():
    assert squared_distance(np.full((3, 4), A), 4, A) == 0
    assert squared_distance(np.array([[0.0]]), 1, A) == 1


def test_excess_probability():
    assert excess_probability(np.full((3, 5), A), A) == 0
    panel = np.array([[3 * A, A, A], [A, 1.2 * A, A]])
    # the first period is excluded, one of four later observations exceeds a*
    assert excess_probability(panel, A) == 0.25


def test_average_excess():
    panel = np.array([[A, 1.2 * A, A]])
    assert average_excess(panel, A) == pytest.approx(0.2)
    assert average_excess(np.full((2, 3), A), A) is None


def test_confidence_interval():
    assert confidence_interval([0.7] * 10) == 0
    values = np.random.default_rng(1).normal(0.8, 0.1, 700)
    expected = 2.5758293035489004 * values.std(ddof=1) / math.sqrt(700)
    assert confidence_interval(values) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        confidence_interval([1.0])


def test_confidence_interval_worked_value():
    # values with sample std exactly 0.1 give 2.5758 * 0.1 / sqrt(700)
    z = np.random.default_rng(0).normal(size=700)
    values = 0.1 * (z - z.mean()) / z.std(ddof=1)
    assert confidence_interval(values) == pytest.approx(0.00974, abs=1e-5)


def test_first_crossing():
    assert first_crossing([90, 60, 49, 70], 50) == 3
    assert first_crossing([90, 60], 50) is None


@given(panels)
def test_excess_null_iff_zero_probability(panel):
    p = excess_probability(panel, A)
    avg = average_excess(panel, A)
    assert 0 <= p <= 1
    assert (p == 0) == (avg is None)
    if avg is not None:
        assert avg > 0


@given(panels)
def test_jensen_bound(panel):
    runs = panel.shape[0]
    d = distance_series(panel, A)
    for t in range(1, panel.shape[1] + 1):
        assert d[t - 1] / runs >= (1 - mean_normalized_action(panel, t, A)) ** 2 - 1e-12


@given(panels, st.randoms(use_true_random=False))
def test_invariant_under_run_reordering(panel, rnd):
    order = list(range(panel.shape[0]))
    rnd.shuffle(order)
    shuffled = panel[order]
    t = panel.shape[1]
    assert mean_normalized_action(shuffled, t, A) == pytest.approx(mean_normalized_action(panel, t, A))
    assert squared_distance(shuffled, t, A) == pytest.approx(squared_distance(panel, t, A))


def test_summary_fields():
    panel = np.array([[1.0, 2.4, 2.0], [1.5, 1.0, 1.0]])
    s = summarize(panel, A, "x")
    assert s.runs == 2 and s.periods == 3
    assert len(s.distance_series) == 3
    assert s.mean_normalized_action_T == pytest.approx(0.75)
    assert s.excess_probability == 0.25
    assert s.average_excess == pytest.approx(0.2)
