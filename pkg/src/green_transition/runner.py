"""Run orchestration and machine-readable output."""

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Literal

from loguru import logger

from .dynamics import basins, find_fixed_points
from .errors import DomainError, PolicyInfeasibleError
from .levels import brown_steady_state, compare_sse, green_steady_state, initial_state
from .policy import (
    green_basin_entry,
    initial_norm,
    min_constant_tax,
    simulate_policy,
    synthesize_schedule,
    tau_hat,
    unstable_threshold,
)
from .scenario import ScenarioDoc
from .types import Barrier, Economy, EconomyState, PolicyReport, SteadyState, TaxSchedule

Command = Literal["simulate", "fixed-points", "steady-state", "policy", "sweep"]
COMMANDS: tuple[str, ...] = ("simulate", "fixed-points", "steady-state", "policy", "sweep")

PERIOD_HEADER = ("t", "tau", "j", "mu", "p", "w", "G", "B", "H", "l_g", "l_b", "l_h", "welfare")
FIXED_POINT_HEADER = ("parameter", "value", "j", "kind", "residual")
STEADY_STATE_HEADER = ("kind", "j", "G", "B", "H", "mu", "welfare", "consumption")
POLICY_SWEEP_HEADER = ("parameter", "value", "min_constant_tax")


@dataclass(frozen=True)
class PeriodRecord:
    t: int
    tau: float
    j: float
    mu: float
    p: float
    w: float
    G: float
    B: float
    H: float
    l_g: float
    l_b: float
    l_h: float
    welfare: float

    def row(self) -> tuple[Any, ...]:
        return tuple(getattr(self, name) for name in PERIOD_HEADER)


@dataclass(frozen=True)
class RunResult:
    command: str
    records: tuple[PeriodRecord, ...] = ()
    table_header: tuple[str, ...] = ()
    table_rows: tuple[tuple[Any, ...], ...] = ()
    summary: dict[str, Any] = field(default_factory=dict)
    infeasible: bool = False


def _fmt(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return str(value)
        return float(f"{value:.12g}")
    return value


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Barrier):
        return value.value
    return _fmt(value)


def _records(report: PolicyReport) -> tuple[PeriodRecord, ...]:
    return tuple(
        PeriodRecord(
            t=t,
            tau=eq.tau,
            j=eq.j,
            mu=eq.mu,
            p=eq.p,
            w=eq.w,
            G=eq.G,
            B=eq.B,
            H=eq.H,
            l_g=eq.l_g,
            l_b=eq.l_b,
            l_h=eq.l_h,
            welfare=welfare,
        )
        for t, (eq, welfare) in enumerate(zip(report.periods, report.welfare_path))
    )


def _steady_state_summary(ss: SteadyState | None) -> dict[str, Any] | None:
    if ss is None:
        return None
    return {
        "kind": ss.kind.value,
        "j": ss.j,
        "G": ss.G,
        "B": ss.B,
        "H": ss.H,
        "mu": ss.mu,
        "tau": ss.tau,
        "welfare": ss.welfare,
        "consumption_total": ss.consumption_total,
    }


def _schedule_summary(schedule: TaxSchedule) -> dict[str, Any]:
    return {"rates": list(schedule.rates), "removal_period": schedule.removal_period}


def _seed(doc: ScenarioDoc) -> EconomyState:
    initial = doc.initial
    if initial.seed == "explicit":
        return EconomyState(B_prev=initial.B_prev, H_prev=initial.H_prev)
    return initial_state(initial.seed, doc.economy, initial.tau_prev)  # type: ignore[arg-type]


def _schedule(doc: ScenarioDoc) -> TaxSchedule:
    policy = doc.policy
    if policy.mode == "schedule":
        return TaxSchedule(rates=policy.rates)
    if policy.mode == "synthesize":
        return synthesize_schedule(
            doc.initial.j0,
            policy.margin,
            doc.economy,
            T_max=doc.horizon,
            strategy=policy.strategy,  # type: ignore[arg-type]
            params=doc.solver,
        )
    return TaxSchedule.constant(policy.rate)


def _run_simulate(doc: ScenarioDoc) -> RunResult:
    schedule = _schedule(doc)
    report = simulate_policy(
        schedule, doc.initial.j0, _seed(doc), doc.economy, doc.horizon, doc.solver
    )
    summary = {
        "schedule": _schedule_summary(schedule),
        "terminal": _steady_state_summary(report.terminal),
        "final_j": report.trajectory.final,
        "cumulative_welfare": report.cumulative_welfare,
        "tax_revenue": report.tax_revenue,
    }
    return RunResult(command="simulate", records=_records(report), summary=summary)


def _fixed_point_rows(
    parameter: str, value: float, tau: float, economy: Economy, doc: ScenarioDoc
) -> list[tuple[Any, ...]]:
    return [
        (parameter, value, fp.j, fp.kind.value, fp.residual)
        for fp in find_fixed_points(tau, economy, doc.solver)
    ]


def _run_fixed_points(doc: ScenarioDoc) -> RunResult:
    tau = doc.tau
    points = find_fixed_points(tau, doc.economy, doc.solver)
    summary = {
        "tau": tau,
        "fixed_points": [
            {"j": fp.j, "kind": fp.kind.value, "residual": fp.residual} for fp in points
        ],
        "basins": [
            {
                "lower": b.lower,
                "upper": b.upper,
                "lower_closed": b.lower_closed,
                "upper_closed": b.upper_closed,
                "attractor": b.attractor,
            }
            for b in basins(tau, doc.economy, doc.solver)
        ],
        "threshold": unstable_threshold(tau, doc.economy, doc.solver),
    }
    rows = tuple(("tau", tau, fp.j, fp.kind.value, fp.residual) for fp in points)
    return RunResult(
        command="fixed-points",
        table_header=FIXED_POINT_HEADER,
        table_rows=rows,
        summary=summary,
    )


def _run_steady_state(doc: ScenarioDoc) -> RunResult:
    comparison = compare_sse(doc.tau, doc.economy)
    summary = {
        "tau": comparison.tau,
        "G_star": comparison.G_star,
        "B_star": comparison.B_star,
        "SW_G": comparison.SW_G,
        "SW_B": comparison.SW_B,
        "bistable": comparison.bistable,
        "dominance_condition": comparison.dominance_condition,
        "consumption_verdict": comparison.consumption_verdict,
        "welfare_verdict": comparison.welfare_verdict,
    }
    brown = brown_steady_state(doc.tau, doc.economy)
    green = green_steady_state(doc.economy, doc.tau)
    rows = tuple(
        (ss.kind.value, ss.j, ss.G, ss.B, ss.H, ss.mu, ss.welfare, ss.consumption_total)
        for ss in (brown, green)
    )
    return RunResult(
        command="steady-state",
        table_header=STEADY_STATE_HEADER,
        table_rows=rows,
        summary=summary,
    )


def _run_policy(doc: ScenarioDoc) -> RunResult:
    economy, params = doc.economy, doc.solver
    j0, margin = doc.initial.j0, doc.policy.margin
    lam0 = initial_norm(j0, economy)
    barrier = unstable_threshold(0.0, economy, params)
    summary: dict[str, Any] = {
        "j0": j0,
        "lambda_0": lam0,
        "barrier": barrier,
        "green_basin_entry": green_basin_entry(economy, params),
        "tau_hat_1": tau_hat(1.0, lam0, economy),
        "tau_hat_barrier": tau_hat(barrier, lam0, economy) if isinstance(barrier, float) else None,
    }
    infeasible = False

    try:
        summary["min_constant_tax"] = min_constant_tax(j0, margin, economy, params)
    except PolicyInfeasibleError as e:
        infeasible = True
        summary["min_constant_tax"] = {"infeasible": str(e), "stalled_at": e.stalled_at}

    records: tuple[PeriodRecord, ...] = ()
    try:
        schedule = synthesize_schedule(
            j0,
            margin,
            economy,
            T_max=doc.horizon,
            strategy=doc.policy.strategy,  # type: ignore[arg-type]
            params=params,
        )
    except PolicyInfeasibleError as e:
        infeasible = True
        summary["schedule"] = {"infeasible": str(e), "stalled_at": e.stalled_at}
    else:
        report = simulate_policy(schedule, j0, _seed(doc), economy, doc.horizon, params)
        records = _records(report)
        summary["schedule"] = _schedule_summary(schedule)
        summary["verification"] = {
            "terminal": _steady_state_summary(report.terminal),
            "final_j": report.trajectory.final,
            "cumulative_welfare": report.cumulative_welfare,
        }

    if infeasible:
        logger.warning("policy search infeasible for this scenario")
    return RunResult(command="policy", records=records, summary=summary, infeasible=infeasible)


_FORM_FIELDS = {
    "gamma_max": "gamma",
    "gamma_min": "gamma",
    "lambda_0": "norm",
    "lambda_inf": "norm",
    "delta_B": "damage",
    "delta_H": "damage",
}


def _vary(economy: Economy, parameter: str, value: float) -> Economy:
    if parameter in ("a_g", "a_b"):
        return replace(economy, **{parameter: value})
    if parameter not in _FORM_FIELDS:
        raise DomainError(f"cannot sweep parameter {parameter!r}")
    forms = economy.forms
    curve = _FORM_FIELDS[parameter]
    varied = replace(getattr(forms, curve), **{parameter: value})
    return replace(economy, forms=replace(forms, **{curve: varied}))


def _sweep_point(doc: ScenarioDoc, value: float) -> list[tuple[Any, ...]]:
    sweep = doc.sweep
    assert sweep is not None
    parameter = sweep.parameter
    tau = value if parameter == "tau" else doc.tau
    try:
        economy = doc.economy if parameter == "tau" else _vary(doc.economy, parameter, value)
        if sweep.analysis == "policy":
            try:
                rate: Any = min_constant_tax(doc.initial.j0, doc.policy.margin, economy, doc.solver)
            except PolicyInfeasibleError:
                rate = "infeasible"
            return [(parameter, value, rate)]
        return _fixed_point_rows(parameter, value, tau, economy, doc)
    except DomainError as e:
        logger.warning(f"sweep point {parameter}={value} skipped: {e}")
        if sweep.analysis == "policy":
            return [(parameter, value, "invalid")]
        return [(parameter, value, None, "invalid", None)]


def _run_sweep(doc: ScenarioDoc) -> RunResult:
    sweep = doc.sweep
    if sweep is None:
        raise DomainError("the sweep command needs a 'sweep' block in the scenario")
    values = sweep.values()
    logger.info(f"sweeping {sweep.parameter} over {len(values)} points ({sweep.analysis})")

    docs = [doc] * len(values)
    if sweep.workers > 1:
        with ProcessPoolExecutor(max_workers=sweep.workers) as pool:
            chunks = list(pool.map(_sweep_point, docs, values))
    else:
        chunks = [_sweep_point(d, v) for d, v in zip(docs, values)]

    rows = tuple(row for chunk in chunks for row in chunk)
    header = POLICY_SWEEP_HEADER if sweep.analysis == "policy" else FIXED_POINT_HEADER
    summary = {
        "parameter": sweep.parameter,
        "analysis": sweep.analysis,
        "values": values,
        "rows": len(rows),
    }
    return RunResult(command="sweep", table_header=header, table_rows=rows, summary=summary)


def run(command: Command | str, doc: ScenarioDoc) -> RunResult:
    logger.info(f"running {command}")
    if command == "simulate":
        return _run_simulate(doc)
    if command == "fixed-points":
        return _run_fixed_points(doc)
    if command == "steady-state":
        return _run_steady_state(doc)
    if command == "policy":
        return _run_policy(doc)
    if command == "sweep":
        return _run_sweep(doc)
    raise DomainError(f"unknown command {command!r}")


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit(result: RunResult, format: Literal["csv", "json"] = "csv") -> bytes:
    """Serialize a run deterministically: per-period CSV (or a table) or a JSON summary."""
    if format == "json":
        payload = {"command": result.command, "summary": result.summary}
        if result.infeasible:
            payload["infeasible"] = True
        return (json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n").encode("utf-8")

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if result.records or not result.table_header:
        writer.writerow(PERIOD_HEADER)
        for record in result.records:
            writer.writerow([_csv_cell(v) for v in record.row()])
    else:
        writer.writerow(result.table_header)
        for row in result.table_rows:
            writer.writerow([_csv_cell(v) for v in row])
    return buffer.getvalue().encode("utf-8")
