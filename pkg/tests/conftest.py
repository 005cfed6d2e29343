import functools
import json

import numpy as np
import pytest
from numpy.typing import NDArray
from scipy import optimize

from green_transition.forms import (
    DamageCurve,
    FunctionalForms,
    PreferenceCurve,
    SocialNormCurve,
)
from green_transition.types import Economy, RatioConvention

HOUSEHOLDS = 100_001
HOUSEHOLD_GRID = np.linspace(0.0, 1.0, HOUSEHOLDS)

# Interior fixed point of ψ at τ=0 in the reference economy: root of 2j² − 2.5j + 0.25.
REF_BARRIER = (2.5 - np.sqrt(4.25)) / 4.0

REF_SCENARIO = {
    "economy": {"a_g": 1.0, "a_b": 1.0, "ratio_convention": "quantity"},
    "forms": {
        "gamma": {"shape": "affine", "gamma_max": 1.5, "gamma_min": 0.5},
        "lambda": {"shape": "saturating", "lambda_0": 0.5, "lambda_inf": 2.5},
        "mu": {"shape": "exponential", "delta_B": 0.2, "delta_H": 0.05},
    },
    "initial": {"j0": 0.0, "seed": "pristine"},
    "policy": {"mode": "constant", "rate": 0.0, "margin": 1e-6},
    "horizon": 20,
}


def make_economy(
    a_g: float = 1.0,
    a_b: float = 1.0,
    gamma: tuple[float, float] = (1.5, 0.5),
    norm: tuple[float, float] = (0.5, 2.5),
    damage: tuple[float, float] = (0.2, 0.05),
    convention: RatioConvention = RatioConvention.QUANTITY,
) -> Economy:
    """Build an economy from plain numbers; the defaults are the reference economy."""
    forms = FunctionalForms(
        gamma=PreferenceCurve(gamma_max=gamma[0], gamma_min=gamma[1]),
        norm=SocialNormCurve(lambda_0=norm[0], lambda_inf=norm[1]),
        damage=DamageCurve(delta_B=damage[0], delta_H=damage[1]),
    )
    return Economy(a_g=a_g, a_b=a_b, forms=forms, ratio_convention=convention)


def random_economies(count: int, seed: int = 7) -> list[Economy]:
    rng = np.random.default_rng(seed)
    economies = []
    for _ in range(count):
        gamma_min = rng.uniform(0.2, 1.0)
        lambda_0 = rng.uniform(0.2, 1.0)
        economies.append(
            make_economy(
                a_g=rng.uniform(0.5, 2.0),
                a_b=rng.uniform(0.5, 2.0),
                gamma=(gamma_min + rng.uniform(0.2, 2.0), gamma_min),
                norm=(lambda_0, lambda_0 + rng.uniform(0.5, 3.0)),
                damage=(0.0, 0.0),
            )
        )
    return economies


def bistable_economies(count: int, seed: int = 11) -> list[Economy]:
    """Damage-free economies where both j=0 and j=1 are stable without a tax."""
    rng = np.random.default_rng(seed)
    economies = []
    for _ in range(count):
        a_g = rng.uniform(0.5, 2.0)
        a_b = rng.uniform(0.5, 2.0)
        gamma_min = rng.uniform(0.2, 1.0)
        gamma_max = gamma_min + rng.uniform(0.2, 2.0)
        lambda_0 = rng.uniform(0.3, 0.9) * (a_b / a_g) / gamma_max
        lambda_inf = rng.uniform(1.1, 3.0) * (a_b / a_g) / gamma_min
        economies.append(
            make_economy(
                a_g=a_g,
                a_b=a_b,
                gamma=(gamma_max, gamma_min),
                norm=(lambda_0, lambda_inf),
                damage=(0.0, 0.0),
            )
        )
    return economies


@functools.cache
def _gamma_on_households(curve: PreferenceCurve) -> NDArray[np.float64]:
    return np.asarray(curve(HOUSEHOLD_GRID), dtype=np.float64)


def household_cutoff(j: float, tau: float, economy: Economy, refine: bool = True) -> float:
    """Index of the last household that weakly prefers green next period.

    Counts green buyers on a grid of HOUSEHOLDS households instead of inverting
    γ. With ``refine`` the boundary between the last buyer and the first
    non-buyer is then bisected, so the answer is not limited by grid spacing.
    """
    forms = economy.forms
    if j == 0.0:
        ratio = 0.0
    elif j == 1.0:
        ratio = np.inf
    else:
        ratio = j / (1.0 - j) * economy.a_g / economy.a_b
        if economy.ratio_convention is RatioConvention.MARKET:
            ratio *= 1.0 + tau
    lam = forms.norm(ratio)
    # household i buys green when λ γ(i) a_g >= a_b / (1+τ)
    need = economy.a_b / ((1.0 + tau) * economy.a_g * lam)
    values = _gamma_on_households(forms.gamma)
    buyers = int(np.searchsorted(-values, -need, side="right"))
    if buyers == 0:
        return 0.0
    if buyers == HOUSEHOLDS:
        return 1.0
    lo, hi = float(HOUSEHOLD_GRID[buyers - 1]), float(HOUSEHOLD_GRID[buyers])
    if not refine:
        return lo

    def surplus(i: float) -> float:
        return float(forms.gamma(i)) - need

    if surplus(lo) <= 0.0:
        return lo
    if surplus(hi) >= 0.0:
        return hi
    return float(optimize.bisect(surplus, lo, hi, xtol=1e-14))


def scenario_text(**overrides: object) -> str:
    doc = json.loads(json.dumps(REF_SCENARIO))
    doc.update(overrides)
    return json.dumps(doc)


@pytest.fixture
def ref_economy() -> Economy:
    return make_economy()


@pytest.fixture
def clean_economy() -> Economy:
    """Reference preferences without health damage."""
    return make_economy(damage=(0.0, 0.0))


@pytest.fixture
def scenario_file(tmp_path):
    def write(**overrides: object):
        path = tmp_path / "scenario.json"
        path.write_text(scenario_text(**overrides))
        return path

    return write
