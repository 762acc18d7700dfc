"""Contract design, the agent's response and the principal's hill-climbing search."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import NamedTuple

from .beliefs import (
    AGENT,
    BeliefState,
    PredictedActionSpace,
    memory_std,
    predict,
    predicted_action_space,
)
from .model import ActorParams, Contract, best_response, inducing_premium, predicted_utility

PREMIUM_STEP = 0.001
REOPTIMIZE = "reoptimize"
FIXED = "fixed"


class SearchMode(str, enum.Enum):
    LOCAL = "local"
    GLOBAL = "global"
    RESET = "reset"
    NONE = "none"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SearchParams:
    """Principal's search behaviour.

    ``delta`` is the tendency for a global search and ``local_fraction`` the
    share of the predicted action space reachable by a local search.
    """

    delta: float = 0.5
    local_fraction: float = 0.2
    n_candidates: int = 2
    literal_threshold: bool = False
    candidate_premium: str = REOPTIMIZE

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0.0 < self.local_fraction < 1.0:
            raise ValueError(f"local_fraction must lie in (0, 1), got {self.local_fraction}")
        if self.n_candidates < 1:
            raise ValueError("at least one candidate is required")
        if self.candidate_premium not in (REOPTIMIZE, FIXED):
            raise ValueError(f"unknown candidate_premium {self.candidate_premium!r}")


@dataclass(frozen=True)
class SearchOutcome:
    next_target: float
    mode: SearchMode
    candidates_evaluated: list[float] = field(default_factory=list)


class Response(NamedTuple):
    accepted: bool
    action: float


def peak_premium(prediction: float, params: ActorParams) -> float:
    """Premium in ``[0, 1]`` that induces the largest action under ``prediction``.

    At the peak ``eta * phi * (a*rho + E) = 1``; substituting into the
    first-order condition leaves a quadratic in ``a``.
    """
    rho, eta, c = params.rho, params.eta, params.disutility_coeff
    a = (-prediction + math.sqrt(prediction**2 + 4.0 * rho**2 / (2.0 * c * eta * math.e))) / (2.0 * rho)
    return min(1.0, 1.0 / (eta * (a * rho + prediction)))


def _participates(premium: float, prediction: float, params: ActorParams) -> bool:
    a = best_response(premium, prediction, params)
    return predicted_utility(a, premium, prediction, params) >= params.reservation_utility


def design_contract(target_action: float, principal_prediction: float,
                    params: ActorParams) -> Contract:
    """Cheapest premium that makes ``target_action`` the agent's best response.

    The principal's utility falls in the premium, so the smallest premium
    that induces at least the target and satisfies participation (both under
    her prediction) is optimal for her.
    """
    if target_action < 0:
        raise ValueError(f"target action must be >= 0, got {target_action}")
    e = principal_prediction
    phi = inducing_premium(target_action, e, params)
    if phi is None or phi > 1.0:
        return Contract(target_action, peak_premium(e, params), capped=True)
    if _participates(phi, e, params):
        return Contract(target_action, phi)

    def adequate(p):
        return best_response(p, e, params) >= target_action and _participates(p, e, params)

    # scan grid-aligned cells so the bracket (and the root) does not depend on the target
    k = math.floor(phi / PREMIUM_STEP)
    prev = k * PREMIUM_STEP
    while prev < 1.0:
        p = min(1.0, prev + PREMIUM_STEP)
        if adequate(p):
            lo, hi = prev, p
            while hi - lo > 1e-10:
                mid = 0.5 * (lo + hi)
                if adequate(mid):
                    hi = mid
                else:
                    lo = mid
            return Contract(target_action, hi)
        prev = p
    return Contract(target_action, peak_premium(e, params), capped=True)


def agent_respond(contract: Contract, agent_prediction: float, params: ActorParams) -> Response:
    """Agent picks the best action in his predicted space and accepts if it meets his outside option."""
    space = predicted_action_space(agent_prediction, contract.premium, params, owner=AGENT)
    if space.empty:
        return Response(False, math.nan)
    return Response(True, space.upper)


def exploration_threshold(principal_memory: BeliefState, delta: float,
                          literal_threshold: bool = False) -> float | None:
    """Threshold on last period's estimate above which the principal explores.

    The threshold is the ``1 - delta`` quantile of a normal fitted to her
    memory, so that ``delta`` is the probability of a global search. Returns
    ``None`` when the memory has no spread.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    sd = memory_std(principal_memory)
    if sd <= 0.0:
        return None
    q = delta if literal_threshold else 1.0 - delta
    return NormalDist(predict(principal_memory), sd).inv_cdf(q)


def choose_mode(last_estimate: float, kappa: float | None, delta: float, rng) -> SearchMode:
    if kappa is None:
        return SearchMode.GLOBAL if rng.random() < delta else SearchMode.LOCAL
    return SearchMode.GLOBAL if last_estimate >= kappa else SearchMode.LOCAL


Interval = tuple[float, float]


def search_spaces(space: PredictedActionSpace, incumbent: float,
                  local_fraction: float) -> tuple[Interval | None, list[Interval]]:
    """Split ``space`` into the local interval around ``incumbent`` and the global remainder.

    The local interval has width ``local_fraction * space.width`` centred on
    the incumbent and clipped to the space; the global region is whatever the
    unclipped local interval leaves uncovered.
    """
    if space.width <= 0.0:
        return None, []
    half = 0.5 * local_fraction * space.width
    lo, hi = incumbent - half, incumbent + half
    local = (max(space.lower, lo), min(space.upper, hi))
    if local[1] <= local[0]:
        local = None
    global_region = []
    if lo > space.lower:
        global_region.append((space.lower, lo))
    if hi < space.upper:
        global_region.append((hi, space.upper))
    return local, global_region


def _draw_from(region: list[Interval], u: float) -> float:
    total = sum(b - a for a, b in region)
    pos = u * total
    for a, b in region:
        if pos <= b - a:
            return a + pos
        pos -= b - a
    return region[-1][1]


def principal_value(candidate: float, principal_prediction: float, params: ActorParams,
                    premium: float | None = None) -> float:
    """Principal's expected utility if the agent takes ``candidate``.

    ``premium`` defaults to the premium she would design for the candidate.
    """
    if premium is None:
        premium = design_contract(candidate, principal_prediction, params).premium
    x = candidate * params.rho + principal_prediction
    return x * (1.0 - premium)


def search_step(space: PredictedActionSpace, incumbent: float, mode: SearchMode,
                principal_prediction: float, params: ActorParams,
                search_params: SearchParams, rng,
                incumbent_premium: float | None = None) -> SearchOutcome:
    """One hill-climbing step: pick next period's target action.

    An incumbent outside the predicted space forces a restart at a uniformly
    drawn point of the space. Otherwise ``n_candidates`` alternatives are
    drawn uniformly from the region selected by ``mode`` and the best of
    incumbent and alternatives is kept (ties go to the smaller action).
    """
    if space.empty:
        return SearchOutcome(incumbent, SearchMode.NONE, [])
    if incumbent not in space:
        return SearchOutcome(space.lower + rng.random() * space.width, SearchMode.RESET, [])

    local, global_region = search_spaces(space, incumbent, search_params.local_fraction)
    local_region = [local] if local is not None else []
    if mode is SearchMode.GLOBAL:
        region, fallback = global_region, local_region
    else:
        region, fallback = local_region, global_region
    if not region:
        if not fallback:
            return SearchOutcome(space.lower + rng.random() * space.width, SearchMode.RESET, [])
        region = fallback
        mode = SearchMode.LOCAL if mode is SearchMode.GLOBAL else SearchMode.GLOBAL

    draws = [_draw_from(region, rng.random()) for _ in range(search_params.n_candidates)]
    candidates = [incumbent] + draws
    fixed = None
    if search_params.candidate_premium == FIXED:
        fixed = (incumbent_premium if incumbent_premium is not None
                 else design_contract(incumbent, principal_prediction, params).premium)
    best, best_value = None, -math.inf
    for c in candidates:
        v = principal_value(c, principal_prediction, params, fixed)
        if v > best_value or (v == best_value and c < best):
            best, best_value = c, v
    return SearchOutcome(best, mode, candidates)
