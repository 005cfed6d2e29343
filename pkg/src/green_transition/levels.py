"""Per-period equilibrium levels, steady states and welfare.

The brown good is the numéraire; every monetary quantity is in brown units.
Households are a uniform continuum on [0, 1].
"""

from typing import Literal

from loguru import logger
from scipy import optimize

from .dynamics import bistability_conditions
from .errors import DomainError, PreconditionError, SolverError
from .forms import elasticity_check, mu_eval
from .types import (
    Economy,
    EconomyState,
    PeriodEquilibrium,
    SSEComparison,
    SteadyState,
    SteadyStateKind,
)

SeedName = Literal["brown-sse", "pristine"]

BROWN_SSE_MAXITER = 200
BROWN_SSE_XTOL = 1e-14


def period_equilibrium(
    j: float,
    state: EconomyState,
    tau: float,
    economy: Economy,
) -> PeriodEquilibrium:
    if not 0.0 <= j <= 1.0:
        raise DomainError(f"green share must lie in [0, 1], got {j}")
    if not tau >= 0.0:
        raise DomainError(f"tax rate must be nonnegative, got {tau}")

    mu = mu_eval(economy.forms.damage, state.B_prev, state.H_prev)
    p = economy.price_ratio
    w = mu * economy.a_b
    G = j * mu * economy.a_g
    # Labor clearing puts the 1/(1+τ) divisor on brown output.
    B = (1.0 - j) * w / (1.0 + tau)
    H = tau * B
    return PeriodEquilibrium(
        p=p,
        w=w,
        G=G,
        B=B,
        H=H,
        j=j,
        l_g=j,
        l_b=B / w,
        l_h=H / w,
        mu=mu,
        tau=tau,
    )


def household_demand(
    i: float,
    j: float,
    eq: PeriodEquilibrium,
    tau: float,
) -> tuple[float, float]:
    """(green, brown) purchases of household i; the marginal household buys green."""
    if not 0.0 <= i <= 1.0:
        raise DomainError(f"household index must lie in [0, 1], got {i}")
    if i <= j:
        return eq.w / eq.p, 0.0
    return 0.0, eq.w / (1.0 + tau)


def period_welfare(eq: PeriodEquilibrium, lam: float, economy: Economy) -> float:
    """Aggregate utility ∫ λγ(i)g(i) + b(i) di of one period."""
    green = lam * (eq.w / eq.p) * economy.forms.gamma.partial_integral(eq.j)
    brown = (1.0 - eq.j) * eq.w / (1.0 + eq.tau)
    return green + brown


def _brown_residual(B: float, tau: float, economy: Economy) -> float:
    return B - economy.forms.damage(B, tau * B) * economy.a_b / (1.0 + tau)


def brown_steady_state(tau: float, economy: Economy) -> SteadyState:
    """Solve B = μ(B, τB) a_b / (1+τ) by bisection on [0, a_b/(1+τ)]."""
    if not tau >= 0.0:
        raise DomainError(f"tax rate must be nonnegative, got {tau}")
    upper = economy.a_b / (1.0 + tau)
    damage = economy.forms.damage

    report = elasticity_check(damage, tau, (0.0, upper))
    if not report.holds:
        raise PreconditionError(
            "elasticity assumption eps_H < |eps_B| fails at "
            f"B={report.violating_B} for tau={tau}"
        )

    top = _brown_residual(upper, tau, economy)
    if top < 0.0:
        raise SolverError(f"brown steady state not bracketed on [0, {upper}] at tau={tau}")
    if top == 0.0:
        B_star = upper
    else:
        try:
            B_star = float(
                optimize.bisect(
                    _brown_residual,
                    0.0,
                    upper,
                    args=(tau, economy),
                    xtol=BROWN_SSE_XTOL * economy.a_b,
                    maxiter=BROWN_SSE_MAXITER,
                )
            )
        except RuntimeError as e:
            raise SolverError(f"brown steady state bisection failed at tau={tau}: {e}") from e

    H = tau * B_star
    logger.debug(f"brown steady state at tau={tau}: B*={B_star:.12g}")
    return SteadyState(
        kind=SteadyStateKind.BROWN,
        j=0.0,
        G=0.0,
        B=B_star,
        H=H,
        mu=damage(B_star, H),
        tau=tau,
        welfare=B_star,
    )


def green_steady_state(economy: Economy, tau: float = 0.0) -> SteadyState:
    G_star = economy.a_g
    return SteadyState(
        kind=SteadyStateKind.GREEN,
        j=1.0,
        G=G_star,
        B=0.0,
        H=0.0,
        mu=1.0,
        tau=tau,
        welfare=economy.forms.norm.lambda_inf * economy.forms.gamma.mean() * G_star,
    )


def welfare(ss: SteadyState, economy: Economy) -> float:
    """Aggregate utility in a steady state: B* (brown) or λ(∞)·γ̂·G* (green)."""
    if ss.kind is SteadyStateKind.BROWN:
        return ss.B
    return economy.forms.norm.lambda_inf * economy.forms.gamma.mean() * ss.G


def compare_sse(tau: float, economy: Economy) -> SSEComparison:
    zero_stable, one_stable = bistability_conditions(tau, economy)
    bistable = zero_stable and one_stable
    if not bistable:
        logger.warning(
            f"tau={tau}: both steady states are not locally stable "
            f"(brown condition {zero_stable}, green condition {one_stable})"
        )

    brown = brown_steady_state(tau, economy)
    green = green_steady_state(economy, tau)
    sw_b = welfare(brown, economy)
    sw_g = welfare(green, economy)
    return SSEComparison(
        tau=tau,
        G_star=green.G,
        B_star=brown.B,
        SW_G=sw_g,
        SW_B=sw_b,
        bistable=bistable,
        dominance_condition=economy.a_b <= economy.a_g,
        consumption_verdict=green.G > brown.B,
        welfare_verdict=sw_g > sw_b,
    )


def initial_state(seed: SeedName, economy: Economy, tau_prev: float = 0.0) -> EconomyState:
    """Seed (B_prev, H_prev) from the brown steady state or from zero output."""
    if seed == "pristine":
        return EconomyState()
    if seed == "brown-sse":
        brown = brown_steady_state(tau_prev, economy)
        return EconomyState(B_prev=brown.B, H_prev=tau_prev * brown.B)
    raise DomainError(f"unknown seed state {seed!r}")
