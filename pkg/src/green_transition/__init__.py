from .dynamics import (
    basins,
    bistability_conditions,
    classify,
    find_fixed_points,
    green_ratio,
    indifference_price,
    iterate,
    psi,
    run_to_convergence,
    zero_stable_tax_bound,
)
from .errors import (
    DomainError,
    GreenTransitionError,
    PolicyInfeasibleError,
    PreconditionError,
    ScenarioError,
    SolverError,
)
from .forms import (
    DamageCurve,
    ElasticityReport,
    FunctionalForms,
    PreferenceCurve,
    SocialNormCurve,
    elasticity_check,
    gamma_eval,
    gamma_inverse,
    lambda_eval,
    mu_eval,
)
from .levels import (
    brown_steady_state,
    compare_sse,
    green_steady_state,
    household_demand,
    initial_state,
    period_equilibrium,
    period_welfare,
    welfare,
)
from .policy import (
    escapes,
    green_basin_entry,
    initial_norm,
    min_constant_tax,
    simulate_policy,
    synthesize_schedule,
    tau_hat,
    tax_hat_path,
    unstable_threshold,
)
from .runner import RunResult, emit, run
from .scenario import ScenarioDoc, apply_overrides, dump_scenario, load_scenario, parse_scenario
from .types import (
    Barrier,
    BasinInterval,
    Economy,
    EconomyState,
    FixedPoint,
    PeriodEquilibrium,
    PolicyReport,
    RatioConvention,
    SolverParams,
    SSEComparison,
    StabilityKind,
    SteadyState,
    SteadyStateKind,
    TaxSchedule,
    Trajectory,
)

__all__ = [
    "Barrier",
    "BasinInterval",
    "DamageCurve",
    "DomainError",
    "Economy",
    "EconomyState",
    "ElasticityReport",
    "FixedPoint",
    "FunctionalForms",
    "GreenTransitionError",
    "PeriodEquilibrium",
    "PolicyInfeasibleError",
    "PolicyReport",
    "PreconditionError",
    "PreferenceCurve",
    "RatioConvention",
    "RunResult",
    "SSEComparison",
    "ScenarioDoc",
    "ScenarioError",
    "SocialNormCurve",
    "SolverError",
    "SolverParams",
    "StabilityKind",
    "SteadyState",
    "SteadyStateKind",
    "TaxSchedule",
    "Trajectory",
    "apply_overrides",
    "basins",
    "bistability_conditions",
    "brown_steady_state",
    "classify",
    "compare_sse",
    "dump_scenario",
    "elasticity_check",
    "emit",
    "escapes",
    "find_fixed_points",
    "gamma_eval",
    "gamma_inverse",
    "green_basin_entry",
    "green_ratio",
    "green_steady_state",
    "household_demand",
    "indifference_price",
    "initial_norm",
    "initial_state",
    "iterate",
    "lambda_eval",
    "load_scenario",
    "min_constant_tax",
    "mu_eval",
    "parse_scenario",
    "period_equilibrium",
    "period_welfare",
    "psi",
    "run",
    "run_to_convergence",
    "simulate_policy",
    "synthesize_schedule",
    "tau_hat",
    "tax_hat_path",
    "unstable_threshold",
    "welfare",
    "zero_stable_tax_bound",
]
