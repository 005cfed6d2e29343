"""Functional families for intrinsic preference, social norm and health damage.

Each curve is an immutable two-parameter family (plus an optional shape
parameter) that satisfies the monotonicity and limit assumptions of the model.
Non-default shapes are checked on a grid when constructed.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, optimize

from .errors import DomainError

GammaShape = Literal["affine", "power"]
NormShape = Literal["saturating", "exponential"]
DamageShape = Literal["exponential", "rational"]

GAMMA_SHAPES: tuple[str, ...] = ("affine", "power")
NORM_SHAPES: tuple[str, ...] = ("saturating", "exponential")
DAMAGE_SHAPES: tuple[str, ...] = ("exponential", "rational")

INVERSE_TOL = 1e-10
QUAD_TOL = 1e-10
FD_STEP = 1e-6

_REGISTRATION_GRID = np.linspace(0.0, 1.0, 201)
_RATIO_GRID = np.concatenate([np.linspace(0.0, 10.0, 201), np.geomspace(10.0, 1e6, 50)])


@dataclass(frozen=True)
class PreferenceCurve:
    """Intrinsic green preference γ(i), strictly decreasing on [0, 1]."""

    gamma_max: float
    gamma_min: float
    shape: GammaShape = "affine"
    exponent: float = 1.0

    def __post_init__(self) -> None:
        if self.shape not in GAMMA_SHAPES:
            raise DomainError(f"unknown gamma shape {self.shape!r}")
        if not (self.gamma_max > self.gamma_min > 0):
            raise DomainError(
                "gamma strictly decreasing: requires gamma_max > gamma_min > 0, got "
                f"gamma_max={self.gamma_max}, gamma_min={self.gamma_min}"
            )
        if self.shape == "power":
            if not self.exponent > 0:
                raise DomainError(f"gamma exponent must be positive, got {self.exponent}")
            values = self(_REGISTRATION_GRID)
            if not np.all(np.diff(values) < 0):
                raise DomainError("gamma strictly decreasing: power family failed grid check")

    @property
    def span(self) -> float:
        return self.gamma_max - self.gamma_min

    def __call__(self, i: ArrayLike) -> NDArray[np.float64]:
        x = np.asarray(i, dtype=float)
        if self.shape == "affine":
            return self.gamma_max - self.span * x
        return self.gamma_min + self.span * (1.0 - x) ** self.exponent

    def mean(self) -> float:
        """Average preference γ̂ under the uniform household measure."""
        return self.partial_integral(1.0)

    def partial_integral(self, upper: float) -> float:
        """∫₀^upper γ(i) di."""
        if upper <= 0.0:
            return 0.0
        if self.shape == "affine":
            return self.gamma_max * upper - 0.5 * self.span * upper * upper
        value, _ = integrate.quad(
            lambda i: float(self(i)), 0.0, upper, epsabs=QUAD_TOL, epsrel=QUAD_TOL
        )
        return float(value)


@dataclass(frozen=True)
class SocialNormCurve:
    """Social norm multiplier λ(r), increasing in the green/brown ratio r."""

    lambda_0: float
    lambda_inf: float
    shape: NormShape = "saturating"
    steepness: float = 1.0

    def __post_init__(self) -> None:
        if self.shape not in NORM_SHAPES:
            raise DomainError(f"unknown lambda shape {self.shape!r}")
        if not (self.lambda_inf > self.lambda_0 > 0):
            raise DomainError(
                "lambda increasing: requires lambda_inf > lambda_0 > 0, got "
                f"lambda_0={self.lambda_0}, lambda_inf={self.lambda_inf}"
            )
        if not (self.steepness > 0 and math.isfinite(self.steepness)):
            raise DomainError(f"lambda steepness must be positive, got {self.steepness}")
        if self.shape != "saturating":
            values = [self(float(r)) for r in _RATIO_GRID]
            if any(b < a for a, b in zip(values, values[1:])):
                raise DomainError("lambda increasing: exponential family failed grid check")

    def __call__(self, r: float) -> float:
        if math.isinf(r):
            return self.lambda_inf
        gap = self.lambda_inf - self.lambda_0
        x = self.steepness * r
        if self.shape == "saturating":
            return self.lambda_0 + gap * x / (1.0 + x)
        return self.lambda_inf - gap * math.exp(-x)


@dataclass(frozen=True)
class DamageCurve:
    """Health/productivity multiplier μ(B, H) with μ(0, 0) = 1."""

    delta_B: float
    delta_H: float
    shape: DamageShape = "exponential"

    def __post_init__(self) -> None:
        if self.shape not in DAMAGE_SHAPES:
            raise DomainError(f"unknown mu shape {self.shape!r}")
        if self.delta_B < 0 or self.delta_H < 0:
            raise DomainError(
                "mu monotone: requires delta_B >= 0 and delta_H >= 0, got "
                f"delta_B={self.delta_B}, delta_H={self.delta_H}"
            )
        if self.shape != "exponential":
            grid = _REGISTRATION_GRID * 10.0
            along_b = [self(float(b), 0.0) for b in grid]
            along_h = [self(0.0, float(h)) for h in grid]
            if any(b > a for a, b in zip(along_b, along_b[1:])) or any(
                b < a for a, b in zip(along_h, along_h[1:])
            ):
                raise DomainError("mu monotone: rational family failed grid check")

    @property
    def is_trivial(self) -> bool:
        return self.delta_B == 0.0 and self.delta_H == 0.0

    def __call__(self, B: float, H: float) -> float:
        if self.shape == "exponential":
            return math.exp(-self.delta_B * B + self.delta_H * H)
        return (1.0 + self.delta_H * H) / (1.0 + self.delta_B * B)

    def partials(self, B: float, H: float) -> tuple[float, float]:
        """(∂μ/∂B, ∂μ/∂H), closed form where known, central differences otherwise."""
        if self.shape == "exponential":
            mu = self(B, H)
            return -self.delta_B * mu, self.delta_H * mu
        hb = FD_STEP * max(abs(B), 1.0)
        hh = FD_STEP * max(abs(H), 1.0)
        d_b = (self(B + hb, H) - self(B - hb, H)) / (2.0 * hb)
        d_h = (self(B, H + hh) - self(B, H - hh)) / (2.0 * hh)
        return d_b, d_h

    def elasticities(self, B: float, H: float) -> tuple[float, float]:
        """Partial elasticities (ε_B, ε_H)."""
        mu = self(B, H)
        d_b, d_h = self.partials(B, H)
        return B / mu * d_b, H / mu * d_h


@dataclass(frozen=True)
class FunctionalForms:
    gamma: PreferenceCurve
    norm: SocialNormCurve
    damage: DamageCurve


@dataclass(frozen=True)
class ElasticityReport:
    holds: bool
    margin: float
    violating_B: float | None = None
    vacuous: bool = False


def gamma_eval(curve: PreferenceCurve, i: float) -> float:
    if not 0.0 <= i <= 1.0:
        raise DomainError(f"household index must lie in [0, 1], got {i}")
    return float(curve(i))


def gamma_inverse(curve: PreferenceCurve, v: float) -> float:
    """The unique household index i with γ(i) = v."""
    if not curve.gamma_min <= v <= curve.gamma_max:
        raise DomainError(
            f"preference weight {v} outside [{curve.gamma_min}, {curve.gamma_max}]"
        )
    if curve.shape == "affine":
        return min(1.0, max(0.0, (curve.gamma_max - v) / curve.span))
    if v == curve.gamma_max:
        return 0.0
    if v == curve.gamma_min:
        return 1.0
    return float(optimize.bisect(lambda i: float(curve(i)) - v, 0.0, 1.0, xtol=INVERSE_TOL))


def lambda_eval(curve: SocialNormCurve, r: float) -> float:
    if math.isnan(r) or r < 0:
        raise DomainError(f"consumption ratio must be nonnegative, got {r}")
    return curve(r)


def mu_eval(curve: DamageCurve, B: float, H: float) -> float:
    if B < 0 or H < 0:
        raise DomainError(f"brown output and healthcare must be nonnegative, got B={B}, H={H}")
    return curve(B, H)


def elasticity_check(
    curve: DamageCurve,
    tau: float,
    B_range: tuple[float, float],
    points: int = 201,
) -> ElasticityReport:
    """Check ε_H < |ε_B| along the balanced-budget path H = τB.

    Points where both elasticities vanish carry no information and are skipped;
    if every point is skipped the assumption holds vacuously.
    """
    if curve.is_trivial:
        return ElasticityReport(holds=True, margin=0.0, vacuous=True)

    lo, hi = B_range
    worst = math.inf
    informative = False
    for B in np.linspace(lo, hi, points):
        B = float(B)
        if B <= 0.0:
            continue
        eps_b, eps_h = curve.elasticities(B, tau * B)
        if eps_b == 0.0 and eps_h == 0.0:
            continue
        informative = True
        gap = abs(eps_b) - eps_h
        worst = min(worst, gap)
        if gap <= 0.0:
            return ElasticityReport(holds=False, margin=gap, violating_B=B)

    if not informative:
        return ElasticityReport(holds=True, margin=0.0, vacuous=True)
    return ElasticityReport(holds=True, margin=worst)
