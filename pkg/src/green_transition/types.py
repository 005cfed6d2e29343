from dataclasses import dataclass
from enum import Enum

from .errors import DomainError
from .forms import FunctionalForms


class RatioConvention(str, Enum):
    QUANTITY = "quantity"
    MARKET = "market"

    @classmethod
    def _missing_(cls, value: object) -> "RatioConvention | None":
        if isinstance(value, str) and value in RATIO_CONVENTION_ALIASES:
            return cls(RATIO_CONVENTION_ALIASES[value])
        return None


# other accepted spellings, mapped to the canonical value
RATIO_CONVENTION_ALIASES = {"paper": "quantity"}


class StabilityKind(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    SEMI_STABLE = "semi_stable"


class Barrier(str, Enum):
    """Outcomes of the tipping-threshold search that are not an interior share."""

    NO_BARRIER = "no_barrier"
    NO_ESCAPE = "no_escape"


class SteadyStateKind(str, Enum):
    BROWN = "brown"
    GREEN = "green"


@dataclass(frozen=True)
class SolverParams:
    fixed_point_tol: float = 1e-10
    grid_points: int = 10_001
    probe_eps: float = 1e-6
    convergence_tol: float = 1e-12
    convergence_steps: int = 3
    max_iterations: int = 1_000_000
    tax_cap: float = 100.0
    tax_tol: float = 1e-8
    margin: float = 1e-6

    def __post_init__(self) -> None:
        if self.grid_points < 3:
            raise DomainError(f"grid_points must be at least 3, got {self.grid_points}")
        for name in ("fixed_point_tol", "probe_eps", "convergence_tol", "tax_cap", "tax_tol"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if not 0 < self.margin < 1:
            raise DomainError(f"margin must lie in (0, 1), got {self.margin}")
        if self.convergence_steps < 1 or self.max_iterations < 1:
            raise DomainError("convergence_steps and max_iterations must be positive")


@dataclass(frozen=True)
class Economy:
    a_g: float
    a_b: float
    forms: FunctionalForms
    ratio_convention: RatioConvention = RatioConvention.QUANTITY

    def __post_init__(self) -> None:
        if not (self.a_g > 0 and self.a_b > 0):
            raise DomainError(
                f"technology scales must be positive, got a_g={self.a_g}, a_b={self.a_b}"
            )

    @property
    def a_h(self) -> float:
        return self.a_b

    @property
    def price_ratio(self) -> float:
        """a_b / a_g, the green price in brown units."""
        return self.a_b / self.a_g


@dataclass(frozen=True)
class FixedPoint:
    j: float
    kind: StabilityKind
    residual: float


@dataclass(frozen=True)
class BasinInterval:
    lower: float
    upper: float
    attractor: float | None
    lower_closed: bool = True
    upper_closed: bool = True

    def __contains__(self, j: object) -> bool:
        if not isinstance(j, (int, float)):
            return False
        above = j >= self.lower if self.lower_closed else j > self.lower
        below = j <= self.upper if self.upper_closed else j < self.upper
        return above and below


@dataclass(frozen=True)
class Trajectory:
    shares: tuple[float, ...]
    taus: tuple[float, ...]
    converged_to: FixedPoint | None = None

    @property
    def final(self) -> float:
        return self.shares[-1]


@dataclass(frozen=True)
class EconomyState:
    B_prev: float = 0.0
    H_prev: float = 0.0

    def __post_init__(self) -> None:
        if self.B_prev < 0 or self.H_prev < 0:
            raise DomainError(
                f"state levels must be nonnegative, got B={self.B_prev}, H={self.H_prev}"
            )


@dataclass(frozen=True)
class PeriodEquilibrium:
    p: float
    w: float
    G: float
    B: float
    H: float
    j: float
    l_g: float
    l_b: float
    l_h: float
    mu: float
    tau: float

    def next_state(self) -> EconomyState:
        return EconomyState(B_prev=self.B, H_prev=self.H)


@dataclass(frozen=True)
class SteadyState:
    kind: SteadyStateKind
    j: float
    G: float
    B: float
    H: float
    mu: float
    tau: float
    welfare: float

    @property
    def output(self) -> float:
        """B* for the brown steady state, G* for the green one."""
        return self.B if self.kind is SteadyStateKind.BROWN else self.G

    @property
    def consumption_total(self) -> float:
        return self.G + self.B


@dataclass(frozen=True)
class SSEComparison:
    tau: float
    G_star: float
    B_star: float
    SW_G: float
    SW_B: float
    bistable: bool
    dominance_condition: bool
    consumption_verdict: bool
    welfare_verdict: bool


@dataclass(frozen=True)
class TaxSchedule:
    rates: tuple[float, ...]
    removal_period: int | None = None

    def __post_init__(self) -> None:
        if not self.rates:
            raise DomainError("a tax schedule needs at least one rate")
        if any(r < 0 for r in self.rates):
            raise DomainError(f"tax rates must be nonnegative, got {self.rates}")
        if self.removal_period is not None:
            if self.removal_period < 0:
                raise DomainError(f"removal_period must be nonnegative, got {self.removal_period}")
            if any(r != 0.0 for r in self.rates[self.removal_period :]):
                raise DomainError("rates must be zero from removal_period on")

    @classmethod
    def constant(cls, rate: float) -> "TaxSchedule":
        return cls(rates=(rate,), removal_period=0 if rate == 0.0 else None)

    def rate_at(self, t: int) -> float:
        if t < len(self.rates):
            return self.rates[t]
        if self.removal_period is not None:
            return 0.0
        return self.rates[-1]

    def rates_for(self, horizon: int) -> tuple[float, ...]:
        return tuple(self.rate_at(t) for t in range(horizon))


@dataclass(frozen=True)
class PolicyReport:
    schedule: TaxSchedule
    trajectory: Trajectory
    periods: tuple[PeriodEquilibrium, ...]
    welfare_path: tuple[float, ...]
    terminal: SteadyState | None = None

    @property
    def cumulative_welfare(self) -> float:
        return float(sum(self.welfare_path))

    @property
    def tax_revenue(self) -> float:
        return float(sum(eq.H for eq in self.periods))
