"""The preference-share map ψ(j; τ) and its fixed points.

ψ is continuous and nondecreasing in j but only piecewise smooth, so fixed
points are found by a sign-change scan plus bisection and classified with
one-sided probes instead of derivatives.
"""

import math
from collections.abc import Sequence

import numpy as np
from loguru import logger
from scipy import optimize

from .errors import DomainError, PreconditionError
from .forms import gamma_inverse, lambda_eval
from .types import (
    BasinInterval,
    Economy,
    FixedPoint,
    RatioConvention,
    SolverParams,
    StabilityKind,
    TaxSchedule,
    Trajectory,
)

ROOT_XTOL = 1e-14
LIMIT_MATCH_TOL = 1e-9

TaxPath = float | Sequence[float] | TaxSchedule


def _check_share(j: float) -> None:
    if not 0.0 <= j <= 1.0:
        raise DomainError(f"green share must lie in [0, 1], got {j}")


def _check_tax(tau: float) -> None:
    if not tau >= 0.0:
        raise DomainError(f"tax rate must be nonnegative, got {tau}")


def indifference_price(tau: float, economy: Economy) -> float:
    """a_b / ((1+τ) a_g): the norm-weighted preference of the marginal household."""
    return economy.a_b / ((1.0 + tau) * economy.a_g)


def green_ratio(j: float, economy: Economy, tau: float) -> float:
    _check_share(j)
    _check_tax(tau)
    if j == 0.0:
        return 0.0
    if j == 1.0:
        return math.inf
    ratio = j / (1.0 - j) * (economy.a_g / economy.a_b)
    if economy.ratio_convention is RatioConvention.MARKET:
        ratio *= 1.0 + tau
    return ratio


def psi(j: float, tau: float, economy: Economy) -> float:
    """Next-period green share given this period's share and tax."""
    lam = lambda_eval(economy.forms.norm, green_ratio(j, economy, tau))
    threshold = indifference_price(tau, economy)
    gamma = economy.forms.gamma
    if lam * gamma.gamma_max <= threshold:
        return 0.0
    if lam * gamma.gamma_min >= threshold:
        return 1.0
    return gamma_inverse(gamma, threshold / lam)


def bistability_conditions(tau: float, economy: Economy) -> tuple[bool, bool]:
    """(λ(0)γ(0) < a_b/((1+τ)a_g), λ(∞)γ(1) > a_b/((1+τ)a_g))."""
    threshold = indifference_price(tau, economy)
    forms = economy.forms
    return (
        forms.norm.lambda_0 * forms.gamma.gamma_max < threshold,
        forms.norm.lambda_inf * forms.gamma.gamma_min > threshold,
    )


def zero_stable_tax_bound(economy: Economy) -> float | None:
    """Largest τ̄ keeping j=0 locally stable for every τ < τ̄, or None if there is none."""
    forms = economy.forms
    top = forms.norm.lambda_0 * forms.gamma.gamma_max
    if top >= economy.price_ratio:
        return None
    return economy.price_ratio / top - 1.0


def _schedule_rates(tau_schedule: TaxPath, T: int) -> tuple[float, ...]:
    if isinstance(tau_schedule, TaxSchedule):
        return tau_schedule.rates_for(T)
    if isinstance(tau_schedule, (int, float)):
        return (float(tau_schedule),) * T
    rates = tuple(float(r) for r in tau_schedule)
    if len(rates) < T:
        raise DomainError(f"schedule covers {len(rates)} periods, horizon is {T}")
    return rates[:T]


def _settled(shares: Sequence[float], params: SolverParams) -> bool:
    steps = params.convergence_steps
    if len(shares) <= steps:
        return False
    tail = shares[-steps - 1 :]
    return all(abs(b - a) < params.convergence_tol for a, b in zip(tail, tail[1:]))


def _match_limit(
    limit: float, tau: float, economy: Economy, params: SolverParams
) -> FixedPoint | None:
    for fp in find_fixed_points(tau, economy, params):
        if abs(fp.j - limit) <= LIMIT_MATCH_TOL:
            return fp
    return None


def iterate(
    j0: float,
    tau_schedule: TaxPath,
    T: int,
    economy: Economy,
    params: SolverParams | None = None,
) -> Trajectory:
    """Cobweb iteration j_{t+1} = ψ(j_t; τ_t) for T periods."""
    params = params or SolverParams()
    _check_share(j0)
    if T < 1:
        raise DomainError(f"horizon must be at least 1, got {T}")
    rates = _schedule_rates(tau_schedule, T)

    shares = [j0]
    for tau in rates:
        shares.append(psi(shares[-1], tau, economy))

    converged_to = None
    if _settled(shares, params):
        converged_to = _match_limit(shares[-1], rates[-1], economy, params)
    return Trajectory(shares=tuple(shares), taus=rates, converged_to=converged_to)


def run_to_convergence(
    j0: float,
    tau: float,
    economy: Economy,
    params: SolverParams | None = None,
) -> Trajectory:
    """Iterate a constant tax until the share settles or the iteration cap is hit."""
    params = params or SolverParams()
    _check_share(j0)
    shares = [j0]
    for _ in range(params.max_iterations):
        shares.append(psi(shares[-1], tau, economy))
        if _settled(shares, params):
            break
    else:
        logger.warning(f"share did not settle within {params.max_iterations} steps at tau={tau}")
        return Trajectory(shares=tuple(shares), taus=(tau,) * (len(shares) - 1))

    converged_to = _match_limit(shares[-1], tau, economy, params)
    return Trajectory(
        shares=tuple(shares), taus=(tau,) * (len(shares) - 1), converged_to=converged_to
    )


def _gap(j: float, tau: float, economy: Economy) -> float:
    return psi(j, tau, economy) - j


def find_fixed_points(
    tau: float,
    economy: Economy,
    params: SolverParams | None = None,
) -> list[FixedPoint]:
    """All solutions of ψ(j; τ) = j on [0, 1], ascending.

    Intervals of fixed points are reported by their two endpoints, both
    semi-stable.
    """
    params = params or SolverParams()
    _check_tax(tau)
    tol = params.fixed_point_tol
    grid = np.linspace(0.0, 1.0, params.grid_points)
    gaps = np.array([_gap(float(j), tau, economy) for j in grid])
    flat = np.abs(gaps) <= tol
    last = len(grid) - 1

    roots: list[float] = []
    plateau_ends: set[float] = set()

    k = 0
    while k <= last:
        if flat[k]:
            start = k
            while k + 1 <= last and flat[k + 1]:
                k += 1
            roots.append(float(grid[start]))
            if k > start:
                roots.append(float(grid[k]))
                plateau_ends.update((float(grid[start]), float(grid[k])))
            k += 1
            continue
        if k < last and not flat[k + 1] and gaps[k] * gaps[k + 1] < 0:
            root = optimize.bisect(
                _gap, float(grid[k]), float(grid[k + 1]), args=(tau, economy), xtol=ROOT_XTOL
            )
            roots.append(float(root))
        k += 1

    points = []
    for j in sorted(roots):
        residual = abs(_gap(j, tau, economy))
        if j in plateau_ends:
            kind = StabilityKind.SEMI_STABLE
        else:
            kind = classify(j, tau, economy, params)
        points.append(FixedPoint(j=j, kind=kind, residual=residual))

    logger.debug(
        f"tau={tau}: fixed points "
        + ", ".join(f"{fp.j:.6g} ({fp.kind.value})" for fp in points)
    )
    return points


def classify(
    fp_j: float,
    tau: float,
    economy: Economy,
    params: SolverParams | None = None,
) -> StabilityKind:
    """Stability of a fixed point from one-sided probes at j ± ε."""
    params = params or SolverParams()
    _check_share(fp_j)
    residual = abs(_gap(fp_j, tau, economy))
    if residual > params.fixed_point_tol:
        raise PreconditionError(
            f"j={fp_j} is not a fixed point at tau={tau} (residual {residual:.3e})"
        )

    eps = params.probe_eps
    sides: list[int] = []
    if fp_j - eps >= 0.0:
        below = fp_j - eps
        sides.append(int(np.sign(_gap(below, tau, economy))))
    if fp_j + eps <= 1.0:
        above = fp_j + eps
        sides.append(-int(np.sign(_gap(above, tau, economy))))

    if all(s > 0 for s in sides):
        return StabilityKind.STABLE
    if all(s < 0 for s in sides):
        return StabilityKind.UNSTABLE
    return StabilityKind.SEMI_STABLE


def basins(
    tau: float,
    economy: Economy,
    params: SolverParams | None = None,
) -> list[BasinInterval]:
    """Partition [0, 1] by the fixed point each initial share converges to.

    Repelling fixed points act as open boundaries and are not listed as basins
    of their own. An interval of fixed points carries attractor None.
    """
    params = params or SolverParams()
    fixed = {fp.j: fp for fp in find_fixed_points(tau, economy, params)}
    nodes = sorted(set(fixed) | {0.0, 1.0})

    # (lower, upper, lower_closed, upper_closed, attractor)
    pieces: list[tuple[float, float, bool, bool, float | None]] = []
    gap_targets: list[float | None] = []
    for a, b in zip(nodes, nodes[1:]):
        mid = 0.5 * (a + b)
        g = _gap(mid, tau, economy)
        gap_targets.append(b if g > 0 else a if g < 0 else None)

    for idx, node in enumerate(nodes):
        if node in fixed:
            own: float | None = node
        elif idx == 0:
            own = gap_targets[0]
        else:
            own = gap_targets[idx - 1]
        pieces.append((node, node, True, True, own))
        if idx < len(gap_targets):
            pieces.append((node, nodes[idx + 1], False, False, gap_targets[idx]))

    merged: list[tuple[float, float, bool, bool, float | None]] = []
    for piece in pieces:
        if merged and merged[-1][4] == piece[4] and piece[4] is not None:
            lo, _, lo_closed, _, attractor = merged[-1]
            merged[-1] = (lo, piece[1], lo_closed, piece[3], attractor)
        else:
            merged.append(piece)

    repelling = {j for j, fp in fixed.items() if fp.kind is StabilityKind.UNSTABLE}
    return [
        BasinInterval(lower=lo, upper=hi, attractor=attractor, lower_closed=lc, upper_closed=uc)
        for lo, hi, lc, uc, attractor in merged
        if not (lo == hi and lo in repelling)
    ]
