import math

import numpy as np
import pytest

from hidden_action.benchmark import (
    BenchmarkProblem,
    InconclusiveError,
    build_fixture,
    first_best_comparison,
    fixture_drift,
    golden_section_max,
    load_fixture,
    numeric_best_response,
    second_best_oracle,
    verify_first_best_flat_wage,
)
from hidden_action.model import ActorParams, agent_utility, best_response

P = ActorParams()

# independent finer oracle: premium step 1e-4, best response by argmax on an
# action grid of step 1e-4 -> phi = 0.0201, a = 1.9174
FINE_PHI, FINE_A = 0.0201, 1.9174


def test_golden_section_max():
    assert golden_section_max(lambda x: -(x - 1.3) ** 2, 0, 5, 1e-8) == pytest.approx(1.3, abs=1e-7)
    # maximum at an endpoint
    assert golden_section_max(lambda x: x, 0, 2, 1e-8) == pytest.approx(2, abs=1e-7)


@pytest.mark.parametrize("phi, mu", [(0.02, 0), (0.3, 0), (0.05, -20)])
def test_numeric_best_response_agrees_with_closed_form(phi, mu):
    assert numeric_best_response(phi, mu, P) == pytest.approx(best_response(phi, mu, P), abs=2e-6)


def test_oracle_matches_frozen_fixture():
    sol = second_best_oracle(P)
    frozen = load_fixture()
    assert fixture_drift(frozen, build_fixture()) <= 1e-6
    assert sol.a_star == pytest.approx(frozen["a_star"], abs=1e-6)
    assert sol.phi_star == frozen["phi_star"] == 0.02
    assert sol.x_star == pytest.approx(sol.a_star * P.rho)


def test_oracle_against_finer_grid():
    sol = second_best_oracle(P)
    assert abs(sol.a_star - FINE_A) < 1e-3
    assert abs(sol.phi_star - FINE_PHI) <= 0.001


def test_oracle_grid_refinement():
    coarse = second_best_oracle(P)
    fine = second_best_oracle(P, 0.0, 0.0005, 5e-7)
    assert abs(coarse.a_star - fine.a_star) < 1e-3


def test_phi_star_is_discrete_local_optimum():
    sol = second_best_oracle(P)

    def value(phi):
        return numeric_best_response(phi, 0, P) * P.rho * (1 - phi)

    best = value(sol.phi_star)
    assert value(sol.phi_star - 0.001) <= best
    assert value(sol.phi_star + 0.001) <= best


def test_participation_holds_at_optimum():
    sol = second_best_oracle(P)
    assert agent_utility(sol.phi_star * sol.x_star, sol.a_star, P) >= P.reservation_utility


def test_slack_participation_is_irrelevant():
    base = second_best_oracle(P)
    loose = second_best_oracle(ActorParams(reservation_utility=-1e9))
    assert (loose.a_star, loose.phi_star) == (base.a_star, base.phi_star)


def test_worthless_effort():
    sol = second_best_oracle(ActorParams(rho=1e-9), mu=3.0)
    assert sol.a_star == pytest.approx(0, abs=1e-5)
    assert sol.x_star == pytest.approx(3.0, abs=1e-9)


def test_infeasible_participation_is_an_error():
    with pytest.raises(ValueError):
        second_best_oracle(ActorParams(reservation_utility=10.0))


@pytest.mark.parametrize("fraction", [0.05, 0.25, 0.45, 0.65])
def test_flat_wage_is_optimal(fraction):
    sigma = fraction * second_best_oracle(P).x_star
    assert verify_first_best_flat_wage(BenchmarkProblem(P, sigma=sigma))


def test_flat_wage_beats_linear_at_equal_action():
    sigma = 0.25 * second_best_oracle(P).x_star
    cmp = first_best_comparison(BenchmarkProblem(P, sigma=sigma))
    ok = np.isfinite(cmp.linear)
    assert ok.any()
    assert np.all(cmp.flat[ok] > cmp.linear[ok])


def test_risk_premium_vanishes_without_noise():
    cmp = first_best_comparison(BenchmarkProblem(P, sigma=1e-9))
    ok = np.isfinite(cmp.linear)
    np.testing.assert_allclose(cmp.linear[ok], cmp.flat[ok], atol=1e-6)


def test_risk_neutral_limit():
    # eta -> 0: the gap between flat wage and linear share closes
    sigma = 0.25 * second_best_oracle(P).x_star
    gaps = []
    for eta in (0.5, 0.05, 0.005):
        cmp = first_best_comparison(BenchmarkProblem(ActorParams(eta=eta), sigma=sigma))
        ok = np.isfinite(cmp.linear)
        gaps.append(np.max(cmp.flat[ok] - cmp.linear[ok]))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 0.05 * gaps[0]


def test_coarse_outcome_grid_is_rejected():
    with pytest.raises(ValueError):
        verify_first_best_flat_wage(BenchmarkProblem(P, sigma=10, x_span=4))


def test_disagreeing_grid_is_inconclusive():
    with pytest.raises(InconclusiveError):
        verify_first_best_flat_wage(BenchmarkProblem(P, sigma=20, x_points=7))


def test_problem_validation():
    with pytest.raises(ValueError):
        BenchmarkProblem(P, a_grid=(1.0, 0.5))
    with pytest.raises(ValueError):
        BenchmarkProblem(P, sigma=-1)


def test_benchmark_ignores_sigma():
    # the signature has no spread parameter; repeated calls are identical
    assert second_best_oracle(P) == second_best_oracle(P)
    assert math.isclose(second_best_oracle(P).x_star, 95.85862819267665, rel_tol=1e-12)
