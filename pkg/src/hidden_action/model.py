"""Economic primitives of the hidden-action model.

Production is additive-normal (``x = a * rho + theta``), the sharing rule is
linear (``s(x) = phi * x``), the principal is risk neutral and the agent has
CARA utility over his share minus a quadratic effort cost.

The agent's best response and the premium that induces a given action both
have closed forms in terms of the Lambert W function; they are evaluated via
``scipy.special.wrightomega`` (``omega(z) = W(exp(z))``) so that very
negative environment predictions cannot overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import lambertw, wrightomega


class DomainError(ValueError):
    """An argument lies outside the domain of a model primitive."""


@dataclass(frozen=True)
class ActorParams:
    """Agent characteristics shared by both actors.

    ``reservation_utility`` is the agent's outside option. The effort cost is
    fixed at ``0.1 * a**2``.
    """

    rho: float = 50.0
    eta: float = 0.5
    reservation_utility: float = 0.0
    disutility_coeff: float = 0.1
    disutility_exponent: float = 2.0

    def __post_init__(self):
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho}")
        if not self.eta > 0:
            raise DomainError(f"eta must be positive, got {self.eta}")
        if self.disutility_coeff != 0.1 or self.disutility_exponent != 2.0:
            raise DomainError("effort cost is fixed at 0.1 * a**2")


@dataclass(frozen=True)
class EnvironmentParams:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class Contract:
    """Per-period offer: the action the principal wants and the premium.

    ``capped`` marks contracts whose target could not be induced (the premium
    then induces the largest inducible action instead).
    """

    target_action: float
    premium: float
    capped: bool = False

    def __post_init__(self):
        if not 0.0 <= self.premium <= 1.0:
            raise DomainError(f"premium must lie in [0, 1], got {self.premium}")
        if self.target_action < 0:
            raise DomainError(f"target action must be >= 0, got {self.target_action}")


def outcome(action: float, rho: float, theta: float) -> float:
    if action < 0:
        raise DomainError(f"action must be >= 0, got {action}")
    return action * rho + theta


def sharing(x: float, premium: float) -> float:
    """Agent's share of outcome ``x`` under the linear rule."""
    if not 0.0 <= premium <= 1.0:
        raise DomainError(f"premium must lie in [0, 1], got {premium}")
    return x * premium


def principal_utility(x: float, share: float) -> float:
    return x - share


def effort_cost(action: float, params: ActorParams) -> float:
    return params.disutility_coeff * action**params.disutility_exponent


def agent_utility(share: float, action: float, params: ActorParams) -> float:
    """CARA utility of ``share`` minus the effort cost of ``action``."""
    if action < 0:
        raise DomainError(f"action must be >= 0, got {action}")
    eta = params.eta
    return -math.expm1(-eta * share) / eta - effort_cost(action, params)


def predicted_utility(action: float, premium: float, prediction: float,
                      params: ActorParams) -> float:
    """Agent utility of ``action`` when the environment is predicted to be ``prediction``."""
    x = action * params.rho + prediction
    return agent_utility(premium * x, action, params)


def best_response(premium: float, prediction: float, params: ActorParams) -> float:
    """Action maximizing :func:`predicted_utility` over ``a >= 0``.

    The objective is strictly concave in ``a``; the first-order condition
    ``phi*rho*exp(-eta*phi*(a*rho + E)) = 2*c*a`` is solved in closed form.
    """
    if premium <= 0.0:
        return 0.0
    rho, eta, c = params.rho, params.eta, params.disutility_coeff
    k = eta * premium * rho
    # a * exp(k*a) = A  ->  a = W(k*A) / k, with log(k*A) computed directly
    log_ka = math.log(k) + math.log(premium * rho / (2.0 * c)) - eta * premium * prediction
    return float(wrightomega(log_ka).real) / k


def inducing_premium(target: float, prediction: float, params: ActorParams) -> float | None:
    """Smallest premium whose best response (under ``prediction``) equals ``target``.

    Returns ``None`` when no premium in ``[0, inf)`` induces ``target``. The
    caller is responsible for checking the result against ``[0, 1]``.
    """
    if target <= 0.0:
        return 0.0
    rho, eta, c = params.rho, params.eta, params.disutility_coeff
    w = target * rho + prediction
    if w == 0.0:
        return 2.0 * c * target / rho
    # phi*rho*exp(-eta*w*phi) = 2*c*a  ->  u*exp(u) = -2*c*a*eta*w/rho with u = -eta*w*phi
    z = -2.0 * c * target * eta * w / rho
    if z < -math.exp(-1.0):
        return None
    u = lambertw(z, 0).real
    return float(-u / (eta * w))
