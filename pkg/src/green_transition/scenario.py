"""Scenario documents: one JSON file fully determines a run.

Validation collects every problem in the document before raising, so a user
fixing a scenario sees all of them at once.
"""

import json
import math
from dataclasses import dataclass, field, fields, replace
from typing import Any

from .errors import DomainError, ScenarioError
from .forms import (
    DAMAGE_SHAPES,
    GAMMA_SHAPES,
    NORM_SHAPES,
    DamageCurve,
    FunctionalForms,
    PreferenceCurve,
    SocialNormCurve,
    elasticity_check,
)
from .policy import STRATEGIES
from .types import RATIO_CONVENTION_ALIASES, Economy, RatioConvention, SolverParams

POLICY_MODES: tuple[str, ...] = ("constant", "schedule", "synthesize")
SEED_MODES: tuple[str, ...] = ("pristine", "brown-sse", "explicit")
SWEEP_ANALYSES: tuple[str, ...] = ("fixed-points", "policy")
SWEEP_PARAMETERS: tuple[str, ...] = (
    "tau",
    "a_g",
    "a_b",
    "gamma_max",
    "gamma_min",
    "lambda_0",
    "lambda_inf",
    "delta_B",
    "delta_H",
)

_TOP_KEYS = ("economy", "forms", "initial", "policy", "horizon", "solver", "sweep")


@dataclass(frozen=True)
class InitialCondition:
    j0: float = 0.0
    seed: str = "pristine"
    B_prev: float = 0.0
    H_prev: float = 0.0
    tau_prev: float = 0.0


@dataclass(frozen=True)
class PolicyBlock:
    mode: str = "constant"
    rate: float = 0.0
    rates: tuple[float, ...] = ()
    margin: float = 1e-6
    strategy: str = "threshold"

    @property
    def rates_in_use(self) -> tuple[float, ...]:
        if self.mode == "constant":
            return (self.rate,)
        if self.mode == "schedule":
            return self.rates
        return ()


@dataclass(frozen=True)
class SweepBlock:
    parameter: str
    start: float
    stop: float
    steps: int
    analysis: str = "fixed-points"
    workers: int = 1

    def values(self) -> list[float]:
        if self.steps == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.steps - 1)
        return [self.start + k * step for k in range(self.steps)]


@dataclass(frozen=True)
class ScenarioDoc:
    economy: Economy
    initial: InitialCondition = field(default_factory=InitialCondition)
    policy: PolicyBlock = field(default_factory=PolicyBlock)
    horizon: int = 50
    solver: SolverParams = field(default_factory=SolverParams)
    sweep: SweepBlock | None = None

    @property
    def tau(self) -> float:
        """The tax rate analyses at a single rate run at."""
        if self.policy.mode == "schedule" and self.policy.rates:
            return self.policy.rates[0]
        return self.policy.rate


class _Reader:
    def __init__(self) -> None:
        self.errors: list[str] = []

    def section(self, data: Any, name: str, allowed: tuple[str, ...]) -> dict[str, Any]:
        if data is None:
            return {}
        if not isinstance(data, dict):
            self.errors.append(f"{name}: expected an object")
            return {}
        for key in data:
            if key not in allowed:
                self.errors.append(f"{name}: unknown key {key!r}")
        return data

    def number(
        self,
        data: dict[str, Any],
        where: str,
        key: str,
        default: float | None = None,
        minimum: float | None = None,
        strict: bool = False,
    ) -> float:
        value = data.get(key, default)
        if value is None:
            self.errors.append(f"{where}.{key}: required")
            return math.nan
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.errors.append(f"{where}.{key}: expected a number, got {value!r}")
            return math.nan
        value = float(value)
        if not math.isfinite(value):
            self.errors.append(f"{where}.{key}: must be finite")
        elif minimum is not None and (value <= minimum if strict else value < minimum):
            bound = ">" if strict else ">="
            self.errors.append(f"{where}.{key}: must be {bound} {minimum}, got {value}")
        return value

    def integer(
        self, data: dict[str, Any], where: str, key: str, default: int, minimum: int
    ) -> int:
        value = data.get(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            self.errors.append(f"{where}.{key}: expected an integer, got {value!r}")
            return default
        if value < minimum:
            self.errors.append(f"{where}.{key}: must be >= {minimum}, got {value}")
        return value

    def choice(
        self, data: dict[str, Any], where: str, key: str, default: str, options: tuple[str, ...]
    ) -> str:
        value = data.get(key, default)
        if value not in options:
            self.errors.append(f"{where}.{key}: expected one of {list(options)}, got {value!r}")
            return default
        return str(value)

    def build(self, factory: Any, **kwargs: Any) -> Any:
        if any(isinstance(v, float) and math.isnan(v) for v in kwargs.values()):
            return None
        try:
            return factory(**kwargs)
        except DomainError as e:
            self.errors.append(str(e))
            return None


def _read_forms(reader: _Reader, raw: Any) -> FunctionalForms | None:
    forms = reader.section(raw, "forms", ("gamma", "lambda", "mu"))
    g = reader.section(
        forms.get("gamma"), "forms.gamma", ("shape", "gamma_max", "gamma_min", "exponent")
    )
    n = reader.section(
        forms.get("lambda"), "forms.lambda", ("shape", "lambda_0", "lambda_inf", "steepness")
    )
    m = reader.section(forms.get("mu"), "forms.mu", ("shape", "delta_B", "delta_H"))

    gamma = reader.build(
        PreferenceCurve,
        gamma_max=reader.number(g, "forms.gamma", "gamma_max"),
        gamma_min=reader.number(g, "forms.gamma", "gamma_min"),
        shape=reader.choice(g, "forms.gamma", "shape", "affine", GAMMA_SHAPES),
        exponent=reader.number(g, "forms.gamma", "exponent", 1.0),
    )
    norm = reader.build(
        SocialNormCurve,
        lambda_0=reader.number(n, "forms.lambda", "lambda_0"),
        lambda_inf=reader.number(n, "forms.lambda", "lambda_inf"),
        shape=reader.choice(n, "forms.lambda", "shape", "saturating", NORM_SHAPES),
        steepness=reader.number(n, "forms.lambda", "steepness", 1.0),
    )
    damage = reader.build(
        DamageCurve,
        delta_B=reader.number(m, "forms.mu", "delta_B", 0.0),
        delta_H=reader.number(m, "forms.mu", "delta_H", 0.0),
        shape=reader.choice(m, "forms.mu", "shape", "exponential", DAMAGE_SHAPES),
    )
    if gamma is None or norm is None or damage is None:
        return None
    return FunctionalForms(gamma=gamma, norm=norm, damage=damage)


def _read_solver(reader: _Reader, raw: Any) -> SolverParams:
    names = tuple(f.name for f in fields(SolverParams))
    data = reader.section(raw, "solver", names)
    defaults = SolverParams()
    kwargs: dict[str, Any] = {}
    for name in names:
        if name not in data:
            continue
        if isinstance(getattr(defaults, name), int):
            kwargs[name] = reader.integer(data, "solver", name, getattr(defaults, name), 1)
        else:
            kwargs[name] = reader.number(data, "solver", name, minimum=0.0, strict=True)
    return reader.build(SolverParams, **kwargs) or defaults


def _read_sweep(reader: _Reader, raw: Any) -> SweepBlock | None:
    if raw is None:
        return None
    data = reader.section(
        raw, "sweep", ("parameter", "start", "stop", "steps", "analysis", "workers")
    )
    return SweepBlock(
        parameter=reader.choice(data, "sweep", "parameter", "tau", SWEEP_PARAMETERS),
        start=reader.number(data, "sweep", "start"),
        stop=reader.number(data, "sweep", "stop"),
        steps=reader.integer(data, "sweep", "steps", 11, 1),
        analysis=reader.choice(data, "sweep", "analysis", "fixed-points", SWEEP_ANALYSES),
        workers=reader.integer(data, "sweep", "workers", 1, 1),
    )


def _elasticity_errors(economy: Economy, rates: tuple[float, ...]) -> list[str]:
    errors = []
    for tau in sorted(set(rates)):
        report = elasticity_check(
            economy.forms.damage, tau, (0.0, economy.a_b / (1.0 + tau))
        )
        if not report.holds:
            errors.append(
                f"elasticity assumption eps_H < |eps_B| fails at tau={tau}, B={report.violating_B}"
            )
    return errors


def parse_scenario(text: str) -> ScenarioDoc:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError([f"line {e.lineno}, column {e.colno}: {e.msg}"]) from e

    reader = _Reader()
    top = reader.section(raw, "scenario", _TOP_KEYS)

    econ = reader.section(top.get("economy"), "economy", ("a_g", "a_b", "ratio_convention"))
    a_g = reader.number(econ, "economy", "a_g", minimum=0.0, strict=True)
    a_b = reader.number(econ, "economy", "a_b", minimum=0.0, strict=True)
    conventions = tuple(c.value for c in RatioConvention) + tuple(RATIO_CONVENTION_ALIASES)
    convention = reader.choice(econ, "economy", "ratio_convention", "quantity", conventions)
    forms = _read_forms(reader, top.get("forms"))

    init = reader.section(
        top.get("initial"), "initial", ("j0", "seed", "B_prev", "H_prev", "tau_prev")
    )
    initial = InitialCondition(
        j0=reader.number(init, "initial", "j0", 0.0, minimum=0.0),
        seed=reader.choice(init, "initial", "seed", "pristine", SEED_MODES),
        B_prev=reader.number(init, "initial", "B_prev", 0.0, minimum=0.0),
        H_prev=reader.number(init, "initial", "H_prev", 0.0, minimum=0.0),
        tau_prev=reader.number(init, "initial", "tau_prev", 0.0, minimum=0.0),
    )
    if initial.j0 > 1.0:
        reader.errors.append(f"initial.j0: must be <= 1, got {initial.j0}")

    pol = reader.section(
        top.get("policy"), "policy", ("mode", "rate", "rates", "margin", "strategy")
    )
    raw_rates = pol.get("rates", [])
    if not isinstance(raw_rates, list):
        reader.errors.append("policy.rates: expected a list of numbers")
        raw_rates = []
    rates = tuple(
        reader.number({"rate": r}, f"policy.rates[{k}]", "rate", minimum=0.0)
        for k, r in enumerate(raw_rates)
    )
    policy = PolicyBlock(
        mode=reader.choice(pol, "policy", "mode", "constant", POLICY_MODES),
        rate=reader.number(pol, "policy", "rate", 0.0, minimum=0.0),
        rates=rates,
        margin=reader.number(pol, "policy", "margin", 1e-6, minimum=0.0, strict=True),
        strategy=reader.choice(pol, "policy", "strategy", "threshold", STRATEGIES),
    )
    if policy.mode == "schedule" and not policy.rates:
        reader.errors.append("policy.rates: required when mode is 'schedule'")

    horizon = top.get("horizon", 50)
    if isinstance(horizon, bool) or not isinstance(horizon, int) or horizon < 1:
        reader.errors.append(f"horizon: expected a positive integer, got {horizon!r}")
        horizon = 50

    solver = _read_solver(reader, top.get("solver"))
    sweep = _read_sweep(reader, top.get("sweep"))

    economy = None
    if forms is not None:
        economy = reader.build(
            Economy, a_g=a_g, a_b=a_b, forms=forms, ratio_convention=RatioConvention(convention)
        )
    if economy is not None:
        checked = policy.rates_in_use + (initial.tau_prev,)
        if sweep is not None and sweep.parameter == "tau":
            checked += (sweep.start, sweep.stop)
        reader.errors.extend(_elasticity_errors(economy, checked))

    if reader.errors or economy is None:
        raise ScenarioError(reader.errors or ["economy: could not be constructed"])
    return ScenarioDoc(
        economy=economy,
        initial=initial,
        policy=policy,
        horizon=horizon,
        solver=solver,
        sweep=sweep,
    )


def load_scenario(path: str) -> ScenarioDoc:
    with open(path, encoding="utf-8") as f:
        return parse_scenario(f.read())


def apply_overrides(
    doc: ScenarioDoc,
    tau: float | None = None,
    seed_state: str | None = None,
) -> ScenarioDoc:
    """Apply the command-line overrides, re-checking what they can invalidate."""
    errors = []
    if tau is not None:
        if not tau >= 0.0:
            errors.append(f"--tau: must be >= 0, got {tau}")
        else:
            doc = replace(doc, policy=replace(doc.policy, mode="constant", rate=tau))
            errors.extend(_elasticity_errors(doc.economy, (tau,)))
    if seed_state is not None:
        if seed_state not in ("pristine", "brown-sse"):
            errors.append(f"--seed-state: expected pristine or brown-sse, got {seed_state!r}")
        else:
            doc = replace(doc, initial=replace(doc.initial, seed=seed_state))
    if errors:
        raise ScenarioError(errors)
    return doc


def _economy_dict(economy: Economy) -> dict[str, Any]:
    forms = economy.forms
    return {
        "economy": {
            "a_g": economy.a_g,
            "a_b": economy.a_b,
            "ratio_convention": economy.ratio_convention.value,
        },
        "forms": {
            "gamma": {
                "shape": forms.gamma.shape,
                "gamma_max": forms.gamma.gamma_max,
                "gamma_min": forms.gamma.gamma_min,
                "exponent": forms.gamma.exponent,
            },
            "lambda": {
                "shape": forms.norm.shape,
                "lambda_0": forms.norm.lambda_0,
                "lambda_inf": forms.norm.lambda_inf,
                "steepness": forms.norm.steepness,
            },
            "mu": {
                "shape": forms.damage.shape,
                "delta_B": forms.damage.delta_B,
                "delta_H": forms.damage.delta_H,
            },
        },
    }


def dump_scenario(doc: ScenarioDoc) -> str:
    """Serialize a scenario so that parse_scenario reproduces it exactly."""
    data = _economy_dict(doc.economy)
    data["initial"] = {
        "j0": doc.initial.j0,
        "seed": doc.initial.seed,
        "B_prev": doc.initial.B_prev,
        "H_prev": doc.initial.H_prev,
        "tau_prev": doc.initial.tau_prev,
    }
    data["policy"] = {
        "mode": doc.policy.mode,
        "rate": doc.policy.rate,
        "rates": list(doc.policy.rates),
        "margin": doc.policy.margin,
        "strategy": doc.policy.strategy,
    }
    data["horizon"] = doc.horizon
    data["solver"] = {f.name: getattr(doc.solver, f.name) for f in fields(SolverParams)}
    if doc.sweep is not None:
        data["sweep"] = {
            "parameter": doc.sweep.parameter,
            "start": doc.sweep.start,
            "stop": doc.sweep.stop,
            "steps": doc.sweep.steps,
            "analysis": doc.sweep.analysis,
            "workers": doc.sweep.workers,
        }
    return json.dumps(data, indent=2) + "\n"
