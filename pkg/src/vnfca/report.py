from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict
from typing import Any

import numpy as np

from .model import CapacityModel, UtilitySpec, evaluate_throughput, evaluate_utility


@dataclass
class Diagnostics:
    iterations: int = 0
    converged: bool = True
    foc_residual: float | None = None
    threshold: int | None = None  # 1-based position in the CA order
    theta: float | None = None
    boundary: bool = False
    shadow_prices: tuple[float, ...] | None = None
    pg_norm: float | None = None
    ordering: tuple[int, ...] | None = None
    ties: tuple[tuple[int, int], ...] = ()
    structure: Any = None
    binding: dict | None = None
    notes: list[str] = field(default_factory=list)


@dataclass
class SolveReport:
    """Allocation with its throughput, utility and solver diagnostics.

    Construct through :func:`make_report` so ``x`` and ``utility`` always
    agree with ``allocation``.
    """

    strategy: str
    allocation: np.ndarray
    x: np.ndarray
    utility: float
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    error: str | None = None

    @property
    def total(self) -> float:
        return float(np.sum(self.x))

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self, model: CapacityModel | None = None) -> dict:
        d = self.diagnostics
        diag = {k: v for k, v in asdict(d).items() if k != "structure"}
        if d.structure is not None:
            diag["structure"] = d.structure.to_dict()
        out = {"strategy": self.strategy}
        if model is not None:
            out["machines"] = list(model.machines)
            out["vnfs"] = list(model.vnfs)
            out["units"] = model.units
        out.update(
            u=self.allocation.tolist(),
            x=self.x.tolist(),
            total=self.total,
            utility=self.utility,
            diagnostics=diag,
        )
        return out


def make_report(model: CapacityModel, spec: UtilitySpec, u, strategy: str,
                diagnostics: Diagnostics | None = None) -> SolveReport:
    u = np.array(u, dtype=float)
    x = evaluate_throughput(u, model)
    return SolveReport(strategy, u, x, evaluate_utility(x, spec),
                       diagnostics or Diagnostics())


def failed_report(model: CapacityModel, strategy: str, exc: Exception) -> SolveReport:
    n, m = model.shape
    return SolveReport(strategy, np.full((n, m), np.nan), np.full(m, np.nan),
                       -math.inf, Diagnostics(converged=False),
                       error=f"{type(exc).__name__}: {exc}")
