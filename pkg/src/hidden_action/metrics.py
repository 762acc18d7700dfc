"""Outcome measures computed from a panel of runs.

A panel is either a list of :class:`~hidden_action.engine.RunRecord` or an
``(R, T)`` array of the actions taken by the agent. Periods are 1-based.
Rejected contracts enter with action 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np


def action_matrix(panel) -> np.ndarray:
    if isinstance(panel, np.ndarray):
        actions = panel
    else:
        actions = np.array([[p.action for p in run.periods] for run in panel], dtype=float)
    if actions.ndim != 2 or actions.shape[0] < 1:
        raise ValueError("panel must contain at least one run")
    return actions


def _normalized(panel, a_star: float) -> np.ndarray:
    if not a_star > 0:
        raise ValueError(f"a_star must be positive, got {a_star}")
    return action_matrix(panel) / a_star


def mean_normalized_action(panel, t: int, a_star: float) -> float:
    return float(_normalized(panel, a_star)[:, t - 1].mean())


def squared_distance(panel, t: int, a_star: float) -> float:
    """Sum over runs of the squared relative shortfall from ``a_star`` in period ``t``."""
    return float(((1.0 - _normalized(panel, a_star)[:, t - 1]) ** 2).sum())


def distance_series(panel, a_star: float) -> np.ndarray:
    return ((1.0 - _normalized(panel, a_star)) ** 2).sum(axis=0)


def _excess_mask(panel, a_star):
    norm = _normalized(panel, a_star)
    if norm.shape[1] < 2:
        raise ValueError("excess-effort measures need T >= 2")
    # the first period cannot overshoot and is left out
    later = norm[:, 1:]
    return later, later > 1.0


def excess_probability(panel, a_star: float) -> float:
    """Share of (run, period) pairs, periods 2..T, with effort above ``a_star``."""
    _, mask = _excess_mask(panel, a_star)
    return float(mask.mean())


def average_excess(panel, a_star: float) -> float | None:
    """Mean relative overshoot among excess observations; ``None`` if there are none."""
    later, mask = _excess_mask(panel, a_star)
    if not mask.any():
        return None
    return float((later[mask] - 1.0).mean())


def confidence_interval(values, alpha: float = 0.01) -> float:
    """Half-width of the normal-approximation confidence interval of the mean."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        raise ValueError("a confidence interval needs at least two values")
    z = NormalDist().inv_cdf(1.0 - alpha / 2.0)
    return float(z * values.std(ddof=1) / math.sqrt(values.size))


def first_crossing(series, threshold: float) -> int | None:
    """First period (1-based) at which ``series`` is strictly below ``threshold``."""
    below = np.nonzero(np.asarray(series) < threshold)[0]
    return int(below[0]) + 1 if below.size else None


@dataclass(frozen=True)
class ScenarioSummary:
    scenario_id: str
    runs: int
    periods: int
    mean_normalized_action_T: float
    ci99_halfwidth: float
    distance_series: tuple[float, ...]
    excess_probability: float
    average_excess: float | None


def summarize(panel, a_star: float, scenario_id: str = "") -> ScenarioSummary:
    actions = action_matrix(panel)
    runs, periods = actions.shape
    final = actions[:, -1] / a_star
    ci = confidence_interval(final) if runs >= 2 else math.nan
    return ScenarioSummary(
        scenario_id,
        runs,
        periods,
        float(final.mean()),
        ci,
        tuple(float(v) for v in distance_series(actions, a_star)),
        excess_probability(actions, a_star) if periods >= 2 else math.nan,
        average_excess(actions, a_star) if periods >= 2 else None,
    )
