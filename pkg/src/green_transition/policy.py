"""Brown-good tax policies that move the economy to the green steady state.

Both searches rely on ψ being nondecreasing in j and in τ: a rate that drives
the share up from j0 also drives it up from any larger share.
"""

from collections.abc import Callable
from typing import Literal

from loguru import logger

from .dynamics import basins, find_fixed_points, green_ratio, iterate, psi
from .errors import DomainError, PolicyInfeasibleError, PreconditionError
from .forms import gamma_eval, lambda_eval
from .levels import (
    brown_steady_state,
    green_steady_state,
    period_equilibrium,
    period_welfare,
)
from .types import (
    Barrier,
    Economy,
    EconomyState,
    PeriodEquilibrium,
    PolicyReport,
    SolverParams,
    StabilityKind,
    SteadyState,
    TaxSchedule,
    Trajectory,
)

Strategy = Literal["threshold", "hold", "creep"]
STRATEGIES: tuple[str, ...] = ("threshold", "hold", "creep")

TERMINAL_TOL = 1e-9


def tau_hat(j_target: float, lambda_t: float, economy: Economy) -> float:
    """Tax that makes household j_target indifferent: a_b/(a_g λ_t γ(j)) − 1, floored at 0."""
    if not lambda_t > 0:
        raise DomainError(f"norm multiplier must be positive, got {lambda_t}")
    gamma = gamma_eval(economy.forms.gamma, j_target)
    return max(0.0, economy.a_b / (economy.a_g * lambda_t * gamma) - 1.0)


def initial_norm(j0: float, economy: Economy) -> float:
    """λ at the ratio implied by the initial share (λ(0) when j0 = 0)."""
    return lambda_eval(economy.forms.norm, green_ratio(j0, economy, 0.0))


def unstable_threshold(
    tau: float,
    economy: Economy,
    params: SolverParams | None = None,
) -> float | Barrier:
    """Highest interior non-stable fixed point ĵ, the tipping share at this tax."""
    points = find_fixed_points(tau, economy, params)
    interior = [fp for fp in points if 0.0 < fp.j < 1.0]
    barriers = [fp.j for fp in interior if fp.kind is not StabilityKind.STABLE]
    if barriers:
        return max(barriers)
    green = [fp for fp in points if fp.j == 1.0 and fp.kind is StabilityKind.STABLE]
    if green and not interior:
        return Barrier.NO_BARRIER
    return Barrier.NO_ESCAPE


def _escape_walk(
    j0: float, tau: float, margin: float, economy: Economy, params: SolverParams
) -> tuple[bool, float]:
    j = j0
    for _ in range(params.max_iterations):
        if j >= 1.0 - params.convergence_tol:
            return psi(1.0, tau, economy) >= 1.0 - params.convergence_tol, j
        nxt = psi(j, tau, economy)
        if nxt < j + margin * (1.0 - j):
            return False, j
        j = nxt
    return False, j


def escapes(
    j0: float,
    tau: float,
    margin: float,
    economy: Economy,
    params: SolverParams | None = None,
) -> bool:
    """True if holding τ from j0 reaches j=1 with every step advancing by margin·(1−j)."""
    params = params or SolverParams()
    ok, _ = _escape_walk(j0, tau, margin, economy, params)
    return ok


def _bisect_rate(holds: Callable[[float], bool], params: SolverParams) -> float:
    lo, hi = 0.0, params.tax_cap
    while hi - lo > params.tax_tol:
        mid = 0.5 * (lo + hi)
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _sustaining_rate(j: float, margin: float, economy: Economy, params: SolverParams) -> float:
    def holds(tau: float) -> bool:
        return escapes(j, tau, margin, economy, params)

    if holds(0.0):
        return 0.0
    if not holds(params.tax_cap):
        _, stalled = _escape_walk(j, params.tax_cap, margin, economy, params)
        raise PolicyInfeasibleError(
            f"no constant tax up to {params.tax_cap} reaches the green steady state from "
            f"j={j} (stalls at j={stalled})",
            stalled_at=stalled,
            last_rate=params.tax_cap,
        )
    return _bisect_rate(holds, params)


def min_constant_tax(
    j0: float,
    margin: float,
    economy: Economy,
    params: SolverParams | None = None,
) -> float:
    """Smallest constant rate (to tax_tol) under which the share escapes to 1 from j0."""
    params = params or SolverParams()
    if not 0.0 <= j0 < 1.0:
        raise DomainError(f"initial share must lie in [0, 1), got {j0}")
    if not margin > 0:
        raise DomainError(f"margin must be positive, got {margin}")
    rate = _sustaining_rate(j0, margin, economy, params)
    logger.debug(f"minimal constant tax from j0={j0}: {rate:.10g}")
    return rate


def _jump_rate(j: float, target: float, economy: Economy, params: SolverParams) -> float | None:
    def holds(tau: float) -> bool:
        return psi(j, tau, economy) >= target

    if holds(0.0):
        return 0.0
    if not holds(params.tax_cap):
        return None
    return _bisect_rate(holds, params)


def _green_by(j: float, tau: float, periods: int, economy: Economy, params: SolverParams) -> bool:
    if periods > 0:
        j = iterate(j, tau, periods, economy, params).final
    return j >= 1.0 - TERMINAL_TOL


def _catch_up_rate(j: float, periods: int, economy: Economy, params: SolverParams) -> float:
    def holds(tau: float) -> bool:
        return _green_by(j, tau, periods, economy, params)

    if not holds(params.tax_cap):
        raise PolicyInfeasibleError(
            f"no rate up to {params.tax_cap} reaches the green steady state from j={j} "
            f"within {periods} periods",
            stalled_at=j,
            last_rate=params.tax_cap,
        )
    return _bisect_rate(holds, params)


def synthesize_schedule(
    j0: float,
    margin: float,
    economy: Economy,
    T_max: int = 200,
    strategy: Strategy = "threshold",
    params: SolverParams | None = None,
) -> TaxSchedule:
    """Build a decreasing tax path that reaches the green steady state by period T_max − 1.

    ``threshold`` charges, each period, the smallest rate that lifts next
    period's share over the zero-tax tipping share, then removes the tax.
    ``hold`` charges the minimal constant tax from j0 and keeps it. ``creep``
    charges the smallest rate that advances the share by margin·(1−j); with a
    tiny margin it needs a great many periods. In every case the tax is removed
    at the first period from which zero tax escapes on its own in time. When
    zero tax escapes but too slowly, the smallest constant rate that still
    gets there in time is charged instead.
    """
    params = params or SolverParams()
    if not 0.0 <= j0 < 1.0:
        raise DomainError(f"initial share must lie in [0, 1), got {j0}")
    if not margin > 0:
        raise DomainError(f"margin must be positive, got {margin}")
    if strategy not in STRATEGIES:
        raise DomainError(f"unknown strategy {strategy!r}")
    if T_max < 1:
        raise DomainError(f"T_max must be at least 1, got {T_max}")

    barrier = unstable_threshold(0.0, economy, params)
    rates: list[float] = []
    held: float | None = None
    j = j0
    for t in range(T_max):
        remaining = T_max - 1 - t
        rate = None
        if escapes(j, 0.0, margin, economy, params):
            if _green_by(j, 0.0, remaining, economy, params):
                logger.debug(f"tax removed at t={t} with j={j:.10g}")
                return TaxSchedule(rates=tuple(rates) or (0.0,), removal_period=t)
            rate = _catch_up_rate(j, remaining, economy, params)
            logger.debug(f"zero tax too slow at t={t}; charging {rate:.10g}")
        elif strategy == "threshold" and isinstance(barrier, float):
            target = barrier + margin * (1.0 - barrier)
            if j < target:
                rate = _jump_rate(j, target, economy, params)
        elif strategy == "hold":
            if held is None:
                held = _sustaining_rate(j, margin, economy, params)
            rate = held
        elif strategy == "creep":
            rate = _jump_rate(j, j + margin * (1.0 - j), economy, params)
        if rate is None:
            rate = _sustaining_rate(j, margin, economy, params)
        rates.append(rate)

        if j >= 1.0 - params.convergence_tol:
            # Zero tax cannot hold the green state; keep the last rate forever.
            return TaxSchedule(rates=tuple(rates))
        j = psi(j, rate, economy)

    raise PolicyInfeasibleError(
        f"schedule did not reach the green steady state within {T_max} periods",
        stalled_at=j,
        last_rate=rates[-1] if rates else 0.0,
    )


def _terminal(
    trajectory: Trajectory,
    periods: list[PeriodEquilibrium],
    economy: Economy,
) -> SteadyState | None:
    shares = trajectory.shares
    if len(periods) < 2 or abs(shares[-1] - shares[-2]) > TERMINAL_TOL:
        return None
    tau = trajectory.taus[-1]
    # an all-green last period carries no brown stock forward
    if abs(shares[-1] - 1.0) <= TERMINAL_TOL:
        return green_steady_state(economy, tau)
    if abs(periods[-1].B - periods[-2].B) > TERMINAL_TOL * (1.0 + periods[-1].B):
        return None
    if shares[-1] <= TERMINAL_TOL:
        try:
            return brown_steady_state(tau, economy)
        except PreconditionError as e:
            logger.warning(f"brown terminal state not identified: {e}")
    return None


def simulate_policy(
    schedule: TaxSchedule,
    j0: float,
    initial_state: EconomyState,
    economy: Economy,
    T: int,
    params: SolverParams | None = None,
) -> PolicyReport:
    """Run the share dynamics and the levels recursion together for T periods.

    Period t uses the norm set by the previous period's share (the initial
    share at t = 0) to value green consumption.
    """
    params = params or SolverParams()
    rates = schedule.rates_for(T)
    trajectory = iterate(j0, rates, T, economy, params)

    periods: list[PeriodEquilibrium] = []
    welfare_path: list[float] = []
    state = initial_state
    prev_j, prev_tau = j0, rates[0]
    for t in range(T):
        j, tau = trajectory.shares[t], rates[t]
        eq = period_equilibrium(j, state, tau, economy)
        lam = lambda_eval(economy.forms.norm, green_ratio(prev_j, economy, prev_tau))
        periods.append(eq)
        welfare_path.append(period_welfare(eq, lam, economy))
        state = eq.next_state()
        prev_j, prev_tau = j, tau

    terminal = _terminal(trajectory, periods, economy)
    if terminal is None:
        logger.warning(f"no steady state identified after {T} periods (j={trajectory.final})")
    return PolicyReport(
        schedule=schedule,
        trajectory=trajectory,
        periods=tuple(periods),
        welfare_path=tuple(welfare_path),
        terminal=terminal,
    )


def tax_hat_path(
    report: PolicyReport,
    economy: Economy,
    params: SolverParams | None = None,
) -> list[tuple[float, float | None]]:
    """(τ̂_t(1), τ̂_t(ĵ)) along a simulated path, ĵ being the zero-tax tipping share."""
    barrier = unstable_threshold(0.0, economy, params)
    shares = report.trajectory.shares
    taus = report.trajectory.taus
    path = []
    for t in range(len(report.periods)):
        prev = max(t - 1, 0)
        lam = lambda_eval(economy.forms.norm, green_ratio(shares[prev], economy, taus[prev]))
        at_barrier = tau_hat(barrier, lam, economy) if isinstance(barrier, float) else None
        path.append((tau_hat(1.0, lam, economy), at_barrier))
    return path


def green_basin_entry(
    economy: Economy,
    params: SolverParams | None = None,
) -> float | None:
    """Lowest share from which zero tax converges to the green steady state."""
    for interval in basins(0.0, economy, params):
        if interval.attractor == 1.0:
            return interval.lower
    return None
