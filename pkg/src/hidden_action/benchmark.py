"""Full-information benchmark used to normalize every metric.

The second-best benchmark is found by brute force: every premium on a grid,
the agent's best response to it by golden-section search, and the premium
that pays the principal most. It deliberately avoids the closed forms used
by the simulation so the two can be checked against each other.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from .model import ActorParams, agent_utility, effort_cost

INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
FIXTURE_NAME = "benchmark_fixture.json"


class InconclusiveError(RuntimeError):
    """The numerical check could not be resolved at the requested accuracy."""


@dataclass(frozen=True)
class BenchmarkSolution:
    a_star: float
    phi_star: float
    x_star: float


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-6) -> float:
    """Maximizer of a unimodal ``f`` on ``[lo, hi]`` to absolute tolerance ``tol``."""
    if hi - lo <= tol:
        return 0.5 * (lo + hi)
    c = hi - INV_GOLDEN * (hi - lo)
    d = lo + INV_GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_GOLDEN * (hi - lo)
            fd = f(d)
    # endpoints are never evaluated by the loop
    best = 0.5 * (lo + hi)
    for x in (lo, hi):
        if f(x) > f(best):
            best = x
    return best


def numeric_best_response(premium: float, mu: float, params: ActorParams,
                          tol: float = 1e-6) -> float:
    if premium <= 0.0:
        return 0.0
    rho, eta, c = params.rho, params.eta, params.disutility_coeff
    # marginal benefit premium*rho*exp(-eta*premium*x) bounds 2*c*a at the optimum
    hi = premium * rho * math.exp(max(0.0, -eta * premium * mu)) / (2.0 * c) + tol

    def objective(a):
        return agent_utility(premium * (a * rho + mu), a, params)

    return golden_section_max(objective, 0.0, hi, tol)


@functools.lru_cache(maxsize=64)
def second_best_oracle(params: ActorParams, mu: float = 0.0, phi_step: float = 0.001,
                       a_tol: float = 1e-6) -> BenchmarkSolution:
    """Best linear contract when the environment is replaced by its mean.

    The environment's spread is not an input: turbulence levels are defined
    relative to this benchmark's outcome.
    """
    n = int(round(1.0 / phi_step))
    best = None
    for k in range(n + 1):
        phi = min(1.0, k * phi_step)
        a = numeric_best_response(phi, mu, params, a_tol)
        x = a * params.rho + mu
        if agent_utility(phi * x, a, params) < params.reservation_utility:
            continue
        value = x * (1.0 - phi)
        if best is None or value > best[0]:
            best = (value, a, phi, x)
    if best is None:
        raise ValueError("no premium satisfies the participation constraint")
    _, a, phi, x = best
    return BenchmarkSolution(a, phi, x)


def fixture_path() -> Path:
    return Path(str(resources.files("hidden_action") / "data" / FIXTURE_NAME))


def load_fixture(path: str | Path | None = None) -> dict:
    with open(path or fixture_path()) as fh:
        return json.load(fh)


def build_fixture(params: ActorParams = ActorParams(), mu: float = 0.0,
                  phi_step: float = 0.001, a_tol: float = 1e-6) -> dict:
    sol = second_best_oracle(params, mu, phi_step, a_tol)
    return {
        "params": asdict(params),
        "mu": mu,
        "phi_step": phi_step,
        "a_tol": a_tol,
        **asdict(sol),
    }


def fixture_drift(frozen: dict, fresh: dict) -> float:
    return max(abs(frozen[k] - fresh[k]) for k in ("a_star", "phi_star", "x_star"))


# -- first-best check -------------------------------------------------------

@dataclass(frozen=True)
class BenchmarkProblem:
    """Setup for comparing flat wages with linear sharing when effort is contractible.

    ``x_span`` is the half-width of the outcome grid in standard deviations;
    the grid is only used to cross-check the quadrature.
    """

    actor: ActorParams = ActorParams()
    mu: float = 0.0
    sigma: float = 1.0
    a_grid: tuple[float, ...] = tuple(np.round(np.arange(0.05, 3.0001, 0.05), 10))
    x_points: int = 4001
    x_span: float = 8.0
    phi_step: float = 0.001
    gh_nodes: int = 64
    tol: float = 1e-4

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if any(b <= a for a, b in zip(self.a_grid, self.a_grid[1:])):
            raise ValueError("a_grid must be strictly increasing")


@dataclass(frozen=True)
class FirstBestComparison:
    a_grid: np.ndarray
    flat: np.ndarray          # principal EU under the participation-binding flat wage
    linear: np.ndarray        # principal EU under the cheapest feasible linear share (nan if none)
    linear_premium: np.ndarray


def _expected_v(premium, means, sigma, eta, nodes, weights):
    """E[V(premium * X)] for X ~ N(means, sigma) by Gauss-Hermite quadrature."""
    x = means[..., None] + math.sqrt(2.0) * sigma * nodes
    v = -np.expm1(-eta * premium[..., None] * x) / eta
    return (v * weights).sum(axis=-1) / math.sqrt(math.pi)


def _expected_v_grid(premium, mean, sigma, eta, span, points):
    if sigma == 0.0:
        return -math.expm1(-eta * premium * mean) / eta
    x = np.linspace(mean - span * sigma, mean + span * sigma, points)
    dens = np.exp(-0.5 * ((x - mean) / sigma) ** 2) / (sigma * math.sqrt(2.0 * math.pi))
    v = -np.expm1(-eta * premium * x) / eta
    return float(trapezoid(v * dens, x))


def first_best_comparison(problem: BenchmarkProblem) -> FirstBestComparison:
    p = problem.actor
    eta = p.eta
    nodes, weights = np.polynomial.hermite.hermgauss(problem.gh_nodes)
    a = np.asarray(problem.a_grid, dtype=float)
    means = a * p.rho + problem.mu
    need = p.reservation_utility + np.array([effort_cost(v, p) for v in a])

    # flat wage w with V(w) = need
    with np.errstate(divide="ignore", invalid="ignore"):
        wage = -np.log1p(-eta * need) / eta
    flat = np.where(eta * need < 1.0, means - wage, np.nan)

    phis = np.linspace(0.0, 1.0, int(round(1.0 / problem.phi_step)) + 1)
    ev = _expected_v(phis[None, :], np.broadcast_to(means[:, None], (a.size, phis.size)),
                     problem.sigma, eta, nodes, weights)
    linear = np.full(a.size, np.nan)
    premium = np.full(a.size, np.nan)
    for i in range(a.size):
        ok = np.nonzero(ev[i] >= need[i])[0]
        if ok.size == 0:
            continue
        k = ok[0]
        lo, hi = (phis[k - 1], phis[k]) if k > 0 else (0.0, 0.0)
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            val = _expected_v(np.array(mid), np.array(means[i]), problem.sigma, eta, nodes, weights)
            if val >= need[i]:
                hi = mid
            else:
                lo = mid
        premium[i] = hi
        linear[i] = means[i] * (1.0 - hi)
    return FirstBestComparison(a, flat, linear, premium)


def verify_first_best_flat_wage(problem: BenchmarkProblem) -> bool:
    """Check that a flat wage beats every linear share when effort is contractible.

    For each action on the grid the participation-binding flat wage is
    compared with the cheapest linear share meeting participation, and the
    overall optimum must be a flat-wage contract. Raises
    :class:`InconclusiveError` when quadrature and the outcome grid disagree.
    """
    if problem.x_span < 6.0:
        raise ValueError("outcome grid must cover at least 6 standard deviations")
    cmp = first_best_comparison(problem)
    p = problem.actor
    nodes, weights = np.polynomial.hermite.hermgauss(problem.gh_nodes)

    # the quadrature must agree with brute-force integration where it matters
    for i in np.nonzero(np.isfinite(cmp.linear))[0]:
        mean = cmp.a_grid[i] * p.rho + problem.mu
        gh = float(_expected_v(np.array(cmp.linear_premium[i]), np.array(mean),
                               problem.sigma, p.eta, nodes, weights))
        grid = _expected_v_grid(cmp.linear_premium[i], mean, problem.sigma, p.eta,
                                problem.x_span, problem.x_points)
        if abs(gh - grid) > problem.tol:
            raise InconclusiveError(
                f"quadrature and outcome grid disagree by {abs(gh - grid):.2e} at a={cmp.a_grid[i]:g}")

    feasible = np.isfinite(cmp.linear)
    if not np.all(np.isfinite(cmp.flat) | ~feasible):
        return False
    if np.any(cmp.linear[feasible] > cmp.flat[feasible] + problem.tol):
        return False
    best_flat = np.nanmax(cmp.flat)
    best_linear = np.nanmax(cmp.linear) if feasible.any() else -math.inf
    return bool(best_flat >= best_linear - problem.tol)
