"""General solvers: projected-gradient ascent for Cobb-Douglas utilities on
any n x m linear model, a tableau LP for linear utilities with throughput
requirements, a brute-force grid oracle, and a strategy comparison."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .ca import (baseline_absolute_advantage, baseline_even_split,
                 check_ca_structure, solve_2_by_m, solve_2x2,
                 solve_ca_specialization, solve_n_by_2)
from .errors import (InfeasibleObjectiveError, InfeasibleRequirementsError,
                     NonlinearModelError, OracleBudgetError, VnfcaError)
from .model import (CapacityModel, CobbDouglas, Linear, UtilitySpec, kkt_residual,
                    shadow_prices)
from .report import Diagnostics, SolveReport, failed_report, make_report
from .simplex import simplex_max

log = logging.getLogger(__name__)

STRATEGIES = ("ca", "even", "absolute", "general", "oracle")


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 100_000
    initial_step: float = 1.0
    shrink: float = 0.5
    armijo: float = 1e-4
    rel_tol: float = 1e-10
    pg_tol: float = 1e-8
    min_step: float = 1e-20
    backend: str | None = None


@dataclass(frozen=True)
class OracleConfig:
    grid_step: float = 0.05
    max_points: int = 25_000_000
    full_utilization: bool = True
    backend: str | None = None

    def __post_init__(self):
        if not (0 < self.grid_step <= 0.5):
            raise ValueError(f"grid_step must be in (0, 0.5], got {self.grid_step}")
        k = round(1.0 / self.grid_step)
        if abs(k * self.grid_step - 1.0) > 1e-12:
            raise ValueError(f"grid_step {self.grid_step} does not divide 1")

    @property
    def divisions(self) -> int:
        return round(1.0 / self.grid_step)


def _check_cobb_douglas(model: CapacityModel, spec):
    if not isinstance(spec, CobbDouglas):
        raise TypeError("solve_general maximizes a Cobb-Douglas utility; "
                        "use solve_requirements_lp for linear utilities")
    if len(spec.weights) != model.m_vnfs:
        raise ValueError(f"{len(spec.weights)} weights for {model.m_vnfs} VNFs")
    if not model.linear_only:
        raise NonlinearModelError("continuous solvers need a linear capacity model; use the oracle")
    zero = model.zero_columns()
    if zero:
        names = [model.vnfs[j] for j in zero]
        raise InfeasibleObjectiveError(
            f"VNF(s) {', '.join(names)} have zero capacity on every machine; "
            "Cobb-Douglas utility is -inf everywhere", zero)


def solve_general(model: CapacityModel, spec: CobbDouglas,
                  config: SolverConfig | None = None) -> SolveReport:
    """Projected gradient ascent from the even split with backtracking."""
    config = config or SolverConfig()
    _check_cobb_douglas(model, spec)
    b = model.b
    alpha = np.asarray(spec.weights)
    u0 = baseline_even_split(b)
    u, its, converged, pg, _ = kernels.projected_gradient(
        b, alpha, u0, max_iter=config.max_iter, step0=config.initial_step,
        shrink=config.shrink, armijo=config.armijo, rel_tol=config.rel_tol,
        pg_tol=config.pg_tol, min_step=config.min_step, backend=config.backend)
    report = make_report(model, spec, u, "general")
    d = report.diagnostics
    d.iterations = its
    d.converged = converged
    d.pg_norm = pg
    p = shadow_prices(report.x, spec)
    d.shadow_prices = tuple(float(v) for v in p)
    d.foc_residual = kkt_residual(u, b, p)
    if not converged:
        log.warning("projected gradient stopped after %d iterations (pg norm %.3g)", its, pg)
    return report


def utility_trace(model: CapacityModel, spec: CobbDouglas, config: SolverConfig | None = None):
    """Utility after every accepted iteration of :func:`solve_general`."""
    config = config or SolverConfig()
    _check_cobb_douglas(model, spec)
    return kernels.projected_gradient(
        model.b, np.asarray(spec.weights), baseline_even_split(model.b),
        max_iter=config.max_iter, step0=config.initial_step, shrink=config.shrink,
        armijo=config.armijo, rel_tol=config.rel_tol, pg_tol=config.pg_tol,
        min_step=config.min_step, backend=config.backend)[4]


# ---------------------------------------------------------------------------
# LP mode


def solve_requirements_lp(model: CapacityModel, spec: Linear) -> SolveReport:
    """Maximize sum_j w_j x_j subject to x_j >= r_j over the allocation polytope."""
    if not isinstance(spec, Linear):
        raise TypeError("solve_requirements_lp needs a linear utility")
    if not model.linear_only:
        raise NonlinearModelError("the LP needs a linear capacity model; use the oracle")
    b = model.b
    n, m = b.shape
    w = np.asarray(spec.weights)
    r = np.zeros(m) if spec.requirements is None else np.asarray(spec.requirements)
    # variable z[i*m + j] = u_ij
    c = (b * w).ravel()
    A_ub = np.zeros((n, n * m))
    for i in range(n):
        A_ub[i, i * m:(i + 1) * m] = 1.0
    A_ge = np.zeros((m, n * m))
    for j in range(m):
        A_ge[j, j::m] = b[:, j]
    res = simplex_max(c, A_ub, np.ones(n), A_ge, r)
    if res.status == "infeasible":
        caps = b.sum(axis=0)
        short = [(j, float(r[j]), float(caps[j])) for j in range(m) if r[j] > caps[j]]
        if short:
            parts = [f"{model.vnfs[j]} requires {req:.12g} but max achievable is {cap:.12g}"
                     for j, req, cap in short]
        else:
            short = [(j, float(r[j]), float(caps[j])) for j in range(m) if res.ge_residuals[j] > 1e-9]
            parts = [f"{model.vnfs[j]} requires {req:.12g} (jointly unreachable)"
                     for j, req, _ in short]
        raise InfeasibleRequirementsError("infeasible requirements: " + "; ".join(parts), short)
    if res.status != "optimal":
        raise VnfcaError(f"LP terminated with status {res.status}")
    u = np.clip(res.z.reshape(n, m), 0.0, None)
    report = make_report(model, spec, u, "lp")
    d = report.diagnostics
    d.iterations = res.iterations
    d.binding = {
        "machines": [model.machines[i] for i in range(n) if res.ub_slack[i] <= 1e-9],
        "requirements": [model.vnfs[j] for j in range(m)
                         if r[j] > 0 and report.x[j] - r[j] <= 1e-9 * max(1.0, r[j])],
    }
    return report


# ---------------------------------------------------------------------------
# brute-force oracle


def _compositions(k: int, m: int, exact: bool):
    """Integer vectors of length m summing to k (or <= k), lexicographic ascending."""
    if m == 1:
        return [(k,)] if exact else [(v,) for v in range(k + 1)]
    out = []
    for first in range(k + 1):
        for rest in _compositions(k - first, m - 1, exact):
            out.append((first,) + rest)
    return out


def grid_size(n: int, m: int, config: OracleConfig) -> int:
    k = config.divisions
    per = math.comb(k + m - 1, m - 1) if config.full_utilization else math.comb(k + m, m)
    return per ** n


def brute_force_oracle(model: CapacityModel, spec: UtilitySpec,
                       config: OracleConfig | None = None) -> SolveReport:
    """Exhaustive maximization over the fraction grid; handles curve models."""
    config = config or OracleConfig()
    n, m = model.shape
    if len(spec.weights) != m:
        raise ValueError(f"{len(spec.weights)} weights for {m} VNFs")
    count = grid_size(n, m, config)
    if count > config.max_points:
        raise OracleBudgetError(
            f"oracle grid has {count} points, budget is {config.max_points}", count)
    k = config.divisions
    points = np.array(_compositions(k, m, config.full_utilization), dtype=float) / k
    contrib = np.empty((n, points.shape[0], m))
    for i in range(n):
        for j in range(m):
            contrib[i, :, j] = model.curves[i][j](points[:, j])
    kind = kernels.UTIL_COBB_DOUGLAS if isinstance(spec, CobbDouglas) else kernels.UTIL_LINEAR
    req = None
    if isinstance(spec, Linear) and spec.requirements is not None:
        req = np.asarray(spec.requirements)
    idx, _ = kernels.grid_argmax(contrib, kind, spec.weights, req, backend=config.backend)
    if idx[0] < 0:
        raise InfeasibleRequirementsError(
            "no grid point meets the requirements",
            [(j, float(req[j]), float(model.b[:, j].sum())) for j in range(m)])
    u = points[idx]
    report = make_report(model, spec, u, "oracle")
    report.diagnostics.iterations = count
    report.diagnostics.notes.append(f"grid step {config.grid_step}, {count} points")
    return report


# ---------------------------------------------------------------------------
# strategy dispatch


def solve_ca(model: CapacityModel, spec: UtilitySpec, config: SolverConfig | None = None) -> SolveReport:
    """Shape-appropriate comparative-advantage solver."""
    n, m = model.shape
    if isinstance(spec, Linear):
        return solve_ca_specialization(model, spec)
    if n == 2 and m == 2:
        return solve_2x2(model, spec)
    if m == 2 and np.all(model.b > 0):
        return solve_n_by_2(model, spec)
    if n == 2 and np.all(model.b > 0):
        return solve_2_by_m(model, spec, config)
    report = solve_general(model, spec, config)
    report.strategy = "ca-general"
    if m == 2 or n == 2:
        report.diagnostics.structure = check_ca_structure(report.allocation, model.b)
    return report


def solve(model: CapacityModel, spec: UtilitySpec, strategy: str,
          config: SolverConfig | None = None, oracle: OracleConfig | None = None) -> SolveReport:
    if strategy == "even":
        report = make_report(model, spec, baseline_even_split(model), "even")
    elif strategy == "absolute":
        report = make_report(model, spec, baseline_absolute_advantage(model), "absolute")
    elif strategy == "oracle":
        report = brute_force_oracle(model, spec, oracle)
    elif strategy == "general" or (strategy == "ca" and isinstance(spec, Linear) and spec.has_requirements):
        if isinstance(spec, Linear):
            report = solve_requirements_lp(model, spec)
        else:
            report = solve_general(model, spec, config)
    elif strategy == "ca":
        report = solve_ca(model, spec, config)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    n, m = model.shape
    if report.diagnostics.structure is None and (m == 2 or n == 2):
        report.diagnostics.structure = check_ca_structure(report.allocation, model.b)
    return report


def compare_strategies(model: CapacityModel, spec: UtilitySpec,
                       config: SolverConfig | None = None,
                       oracle: OracleConfig | None = None) -> list[SolveReport]:
    """Run CA, even split, absolute advantage and (within budget) the oracle.

    A failing strategy yields a report with ``error`` set instead of aborting
    the others.  Reports come back sorted by utility, best first.
    """
    oracle = oracle or OracleConfig()
    names = ["ca", "even", "absolute"]
    if grid_size(*model.shape, oracle) <= oracle.max_points:
        names.append("oracle")
    else:
        log.info("skipping oracle: grid exceeds %d points", oracle.max_points)
    reports = []
    for name in names:
        try:
            reports.append(solve(model, spec, name, config, oracle))
        except VnfcaError as exc:
            reports.append(failed_report(model, name, exc))
        except (TypeError, ValueError) as exc:
            reports.append(failed_report(model, name, exc))
    reports.sort(key=lambda r: (not r.ok, -r.utility if r.ok else 0.0))
    return reports
