"""Model-level properties checked across many randomly drawn economies."""

import numpy as np
import pytest
from conftest import make_economy

from green_transition.dynamics import (
    classify,
    find_fixed_points,
    run_to_convergence,
    zero_stable_tax_bound,
)
from green_transition.levels import compare_sse, period_equilibrium
from green_transition.types import EconomyState, SolverParams, StabilityKind

COARSE = SolverParams(grid_points=1001)


def draw_technology(rng: np.random.Generator) -> tuple[float, float, float, float]:
    a_g = rng.uniform(0.5, 2.0)
    a_b = rng.uniform(0.5, 2.0)
    gamma_min = rng.uniform(0.2, 1.0)
    gamma_max = gamma_min + rng.uniform(0.2, 2.0)
    return a_g, a_b, gamma_max, gamma_min


class TestBrownStability:
    def test_zero_stable_below_bound(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            a_g, a_b, gamma_max, gamma_min = draw_technology(rng)
            lambda_0 = rng.uniform(0.2, 0.95) * (a_b / a_g) / gamma_max
            economy = make_economy(
                a_g=a_g,
                a_b=a_b,
                gamma=(gamma_max, gamma_min),
                norm=(lambda_0, lambda_0 + rng.uniform(0.5, 3.0)),
                damage=(0.0, 0.0),
            )
            bound = zero_stable_tax_bound(economy)

            assert bound is not None and bound > 0
            for tau in (0.0, bound / 2):
                assert classify(0.0, tau, economy) is StabilityKind.STABLE


class TestGreenGlobalStability:
    def test_everyone_converts_when_brown_norm_suffices(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            a_g, a_b, gamma_max, gamma_min = draw_technology(rng)
            lambda_0 = rng.uniform(0.2, 1.0)
            economy = make_economy(
                a_g=a_g,
                a_b=a_b,
                gamma=(gamma_max, gamma_min),
                norm=(lambda_0, lambda_0 + rng.uniform(0.5, 3.0)),
                damage=(0.0, 0.0),
            )
            # λ(0)γ(1)(1+τ)a_g/a_b = 1.02
            tau = max(0.0, 1.02 * a_b / (a_g * lambda_0 * gamma_min) - 1.0)

            points = find_fixed_points(tau, economy, COARSE)
            assert [fp.j for fp in points] == [1.0]
            for j0 in rng.uniform(0.0, 1.0, 20):
                trajectory = run_to_convergence(float(j0), tau, economy, COARSE)
                assert abs(trajectory.final - 1.0) < 1e-9


@pytest.fixture(scope="module")
def comparisons():
    rng = np.random.default_rng(3)
    results = []
    while len(results) < 100:
        a_g, a_b, gamma_max, gamma_min = draw_technology(rng)
        a_b = min(a_b, a_g)
        lambda_0 = rng.uniform(0.1, 1.0) * (a_b / a_g) / gamma_max
        lambda_inf = (a_b / a_g) / gamma_min * rng.uniform(1.05, 3.0)
        if lambda_inf <= lambda_0:
            continue
        economy = make_economy(
            a_g=a_g,
            a_b=a_b,
            gamma=(gamma_max, gamma_min),
            norm=(lambda_0, lambda_inf),
            damage=(rng.uniform(0.01, 0.5), 0.0),
        )
        results.append((economy, compare_sse(0.0, economy)))
    return results


class TestGreenDominance:
    def test_consumption(self, comparisons):
        for _, comparison in comparisons:
            assert comparison.bistable
            assert comparison.dominance_condition
            assert comparison.G_star > comparison.B_star

    def test_welfare(self, comparisons):
        for economy, comparison in comparisons:
            forms = economy.forms
            gamma_mean = 0.5 * (forms.gamma.gamma_max + forms.gamma.gamma_min)

            assert comparison.SW_G > comparison.SW_B
            assert comparison.SW_G == pytest.approx(
                forms.norm.lambda_inf * gamma_mean * comparison.G_star, abs=1e-10
            )


class TestConservation:
    def test_identities(self):
        rng = np.random.default_rng(4)
        economy = make_economy()
        for _ in range(10_000):
            j = rng.uniform(0.0, 1.0)
            tau = rng.uniform(0.0, 3.0)
            b_prev = rng.uniform(0.0, 1.0)
            state = EconomyState(B_prev=b_prev, H_prev=rng.uniform(0.0, 1.0) * b_prev)
            eq = period_equilibrium(j, state, tau, economy)

            assert abs(eq.l_g + eq.l_b + eq.l_h - 1.0) < 1e-12
            # household budgets: green buyers and brown buyers spend their wage
            assert abs(eq.p * eq.G - j * eq.w) < 1e-12
            assert abs((1.0 + tau) * eq.B - (1.0 - j) * eq.w) < 1e-12
            # zero profit in each sector
            assert abs(eq.p * eq.G - eq.w * eq.l_g) < 1e-12
            assert abs(eq.B - eq.w * eq.l_b) < 1e-12
            assert abs(eq.H - eq.w * eq.l_h) < 1e-12
