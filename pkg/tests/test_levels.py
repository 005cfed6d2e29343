import math

import pytest
from conftest import make_economy
from hypothesis import given
from hypothesis import strategies as st

from green_transition.errors import DomainError, PreconditionError
from green_transition.levels import (
    brown_steady_state,
    compare_sse,
    green_steady_state,
    household_demand,
    initial_state,
    period_equilibrium,
    period_welfare,
    welfare,
)
from green_transition.types import EconomyState, SteadyStateKind


class TestPeriodEquilibrium:
    def test_pristine_levels(self, ref_economy):
        eq = period_equilibrium(0.5, EconomyState(), 0.25, ref_economy)

        assert eq.mu == 1.0
        assert eq.p == 1.0
        assert eq.w == 1.0
        assert eq.G == pytest.approx(0.5)
        assert eq.B == pytest.approx(0.4)
        assert eq.H == pytest.approx(0.1)
        assert (eq.l_g, eq.l_b, eq.l_h) == pytest.approx((0.5, 0.4, 0.1))

    def test_damage_lowers_wage(self, ref_economy):
        eq = period_equilibrium(0.0, EconomyState(B_prev=1.0), 0.0, ref_economy)

        assert eq.mu == pytest.approx(math.exp(-0.2))
        assert eq.w == pytest.approx(math.exp(-0.2))
        assert eq.B == pytest.approx(math.exp(-0.2))

    def test_next_state_carries_levels(self, ref_economy):
        eq = period_equilibrium(0.25, EconomyState(), 0.5, ref_economy)
        state = eq.next_state()

        assert state.B_prev == eq.B
        assert state.H_prev == eq.H

    def test_rejects_bad_share(self, ref_economy):
        with pytest.raises(DomainError):
            period_equilibrium(-0.1, EconomyState(), 0.0, ref_economy)

    @given(
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        st.floats(min_value=0.0, max_value=3.0, allow_nan=False),
        st.floats(min_value=0.0, max_value=2.0, allow_nan=False),
    )
    def test_labor_clears(self, j, tau, b_prev):
        economy = make_economy()
        eq = period_equilibrium(j, EconomyState(B_prev=b_prev, H_prev=tau * b_prev), tau, economy)

        assert eq.l_g + eq.l_b + eq.l_h == pytest.approx(1.0)
        assert eq.H == pytest.approx(tau * eq.B)


class TestHouseholdDemand:
    def test_brown_household(self, ref_economy):
        eq = period_equilibrium(0.5, EconomyState(), 0.25, ref_economy)

        assert household_demand(0.9, 0.5, eq, 0.25) == pytest.approx((0.0, 0.8))

    def test_green_household(self, ref_economy):
        eq = period_equilibrium(0.5, EconomyState(), 0.25, ref_economy)

        assert household_demand(0.3, 0.5, eq, 0.25) == pytest.approx((1.0, 0.0))

    def test_marginal_household_buys_green(self, ref_economy):
        eq = period_equilibrium(0.5, EconomyState(), 0.0, ref_economy)

        assert household_demand(0.5, 0.5, eq, 0.0) == pytest.approx((1.0, 0.0))

    def test_rejects_bad_index(self, ref_economy):
        eq = period_equilibrium(0.5, EconomyState(), 0.0, ref_economy)
        with pytest.raises(DomainError):
            household_demand(1.5, 0.5, eq, 0.0)


class TestPeriodWelfare:
    def test_mixed_period(self, ref_economy):
        eq = period_equilibrium(0.5, EconomyState(), 0.0, ref_economy)

        # 1.5 · 0.625 on the green side, 0.5 on the brown side
        assert period_welfare(eq, 1.5, ref_economy) == pytest.approx(1.4375)

    def test_all_brown_period(self, ref_economy):
        eq = period_equilibrium(0.0, EconomyState(), 0.5, ref_economy)

        assert period_welfare(eq, 0.5, ref_economy) == pytest.approx(1.0 / 1.5)


class TestBrownSteadyState:
    def test_with_tax(self, ref_economy):
        ss = brown_steady_state(0.5, ref_economy)

        assert ss.kind is SteadyStateKind.BROWN
        assert ss.B == pytest.approx(0.6002, abs=1e-3)
        assert ss.H == pytest.approx(0.5 * ss.B)
        residual = ss.B - math.exp(-0.2 * ss.B + 0.05 * ss.H) / 1.5
        assert abs(residual) < 1e-10

    def test_without_tax(self, ref_economy):
        ss = brown_steady_state(0.0, ref_economy)

        assert ss.B == pytest.approx(0.8446, abs=1e-4)
        assert ss.welfare == ss.B

    def test_damage_free_economy(self, clean_economy):
        ss = brown_steady_state(0.5, clean_economy)

        assert ss.B == pytest.approx(1.0 / 1.5)
        assert ss.mu == 1.0

    def test_matches_fixed_point_iteration(self, ref_economy):
        B = 1.0
        for _ in range(200):
            B = math.exp(-0.175 * B) / 1.5

        assert brown_steady_state(0.5, ref_economy).B == pytest.approx(B, abs=1e-10)

    def test_unique_root_on_grid(self, ref_economy):
        ss = brown_steady_state(0.5, ref_economy)
        damage = ref_economy.forms.damage
        upper = 1.0 / 1.5
        grid = [upper * k / 1000 for k in range(1001)]
        signs = [b - damage(b, 0.5 * b) * upper > 0 for b in grid]

        assert sum(1 for a, b in zip(signs, signs[1:]) if a != b) == 1
        assert 0.0 < ss.B < upper

    def test_elasticity_violation(self, ref_economy):
        with pytest.raises(PreconditionError, match="elast"):
            brown_steady_state(5.0, ref_economy)

    def test_negative_tax(self, ref_economy):
        with pytest.raises(DomainError):
            brown_steady_state(-1.0, ref_economy)


class TestGreenSteadyState:
    def test_reference_values(self, ref_economy):
        ss = green_steady_state(ref_economy)

        assert ss.kind is SteadyStateKind.GREEN
        assert ss.G == 1.0
        assert ss.B == 0.0
        assert ss.welfare == pytest.approx(2.5)
        assert welfare(ss, ref_economy) == pytest.approx(2.5)

    def test_output_scales_with_technology(self):
        economy = make_economy(a_g=2.0)

        assert green_steady_state(economy).G == 2.0


class TestCompareSSE:
    def test_green_dominates_without_tax(self, ref_economy):
        comparison = compare_sse(0.0, ref_economy)

        assert comparison.G_star == 1.0
        assert comparison.B_star == pytest.approx(0.8446, abs=1e-4)
        assert comparison.SW_G == pytest.approx(2.5)
        assert comparison.bistable
        assert comparison.dominance_condition
        assert comparison.consumption_verdict
        assert comparison.welfare_verdict

    def test_not_bistable_under_high_tax(self, ref_economy):
        comparison = compare_sse(0.5, ref_economy)

        assert not comparison.bistable
        assert comparison.SW_B == pytest.approx(0.6002, abs=1e-3)

    def test_condition_fails_when_brown_more_productive(self):
        economy = make_economy(a_b=2.0, damage=(0.0, 0.0))
        comparison = compare_sse(0.0, economy)

        assert not comparison.dominance_condition
        assert not comparison.consumption_verdict


class TestInitialState:
    def test_pristine(self, ref_economy):
        assert initial_state("pristine", ref_economy) == EconomyState()

    def test_brown_seed_is_stationary(self, ref_economy):
        state = initial_state("brown-sse", ref_economy)
        eq = period_equilibrium(0.0, state, 0.0, ref_economy)

        assert eq.B == pytest.approx(state.B_prev, abs=1e-12)

    def test_brown_seed_with_previous_tax(self, ref_economy):
        state = initial_state("brown-sse", ref_economy, tau_prev=0.5)

        assert state.H_prev == pytest.approx(0.5 * state.B_prev)

    def test_unknown_seed(self, ref_economy):
        with pytest.raises(DomainError):
            initial_state("green", ref_economy)  # type: ignore[arg-type]
