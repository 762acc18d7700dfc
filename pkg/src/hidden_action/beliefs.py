"""Bounded-memory beliefs about the environment and predicted action spaces."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .model import ActorParams, best_response, predicted_utility

PRINCIPAL = "principal"
AGENT = "agent"

BOUNDARY_TOL = 1e-6


@dataclass(frozen=True)
class BeliefState:
    """An actor's memory of environment values, most recent first.

    ``capacity`` is the number of values kept (``math.inf`` for unbounded).
    The principal stores her estimates of theta, the agent his observations.
    """

    capacity: float
    role: str = PRINCIPAL
    memory: tuple[float, ...] = ()

    def __post_init__(self):
        if not (self.capacity >= 1):
            raise ValueError(f"memory capacity must be >= 1, got {self.capacity}")
        if len(self.memory) > self.capacity:
            raise ValueError("memory holds more entries than its capacity")


@dataclass(frozen=True)
class PredictedActionSpace:
    """Interval of actions an actor deems feasible.

    ``empty`` is set when no action meets the participation constraint; the
    bounds are then meaningless and a contract built on them is unacceptable.
    """

    lower: float
    upper: float
    owner: str = PRINCIPAL
    empty: bool = False

    @property
    def width(self) -> float:
        return 0.0 if self.empty else self.upper - self.lower

    def __contains__(self, action: float) -> bool:
        return not self.empty and self.lower <= action <= self.upper


def estimate_theta(x: float, target_action: float, rho: float) -> float:
    """Principal's estimate of the environment, assuming the target action was taken."""
    return x - target_action * rho


def record(state: BeliefState, value: float) -> BeliefState:
    memory = (value,) + state.memory
    if len(memory) > state.capacity:
        memory = memory[: int(state.capacity)]
    return BeliefState(state.capacity, state.role, memory)


def _mean(values) -> float:
    # centred on the first entry so that identical values give that value exactly
    ref = values[0]
    return ref + math.fsum(v - ref for v in values) / len(values)


def predict(state: BeliefState, prior: float = 0.0) -> float:
    """Mean of the remembered values; ``prior`` when nothing is remembered yet."""
    if not state.memory:
        return prior
    return _mean(state.memory)


def memory_std(state: BeliefState) -> float:
    """Sample standard deviation (n - 1 denominator); 0 for fewer than two entries."""
    n = len(state.memory)
    if n < 2:
        return 0.0
    mean = _mean(state.memory)
    return math.sqrt(math.fsum((v - mean) ** 2 for v in state.memory) / (n - 1))


def predicted_action_space(prediction: float, contract_premium: float, params: ActorParams,
                           owner: str = PRINCIPAL) -> PredictedActionSpace:
    """Feasible actions under ``prediction`` and a premium of ``contract_premium``.

    The upper bound is the agent's best response (incentive compatibility), the
    lower bound the smallest action meeting the reservation utility.
    """
    if not 0.0 <= contract_premium <= 1.0:
        raise ValueError(f"premium must lie in [0, 1], got {contract_premium}")
    ubar = params.reservation_utility
    upper = best_response(contract_premium, prediction, params)
    if predicted_utility(upper, contract_premium, prediction, params) < ubar:
        return PredictedActionSpace(math.nan, math.nan, owner, empty=True)

    def slack(a):
        return predicted_utility(a, contract_premium, prediction, params) - ubar

    if slack(0.0) >= 0.0:
        lower = 0.0
    else:
        # utility is increasing on [0, upper]; the root is unique
        lower = brentq(slack, 0.0, upper, xtol=BOUNDARY_TOL * 1e-3)
    return PredictedActionSpace(min(lower, upper), upper, owner)
