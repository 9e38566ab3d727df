"""Domain types plus throughput/utility evaluation shared by every solver.

Capacities are stored per (machine, VNF) pair as a piecewise-linear curve
mapping the allocated fraction of the machine to throughput.  A curve with
exactly two samples ``(0, 0), (1, b)`` is *linear*; anything else encodes
virtual-slicing overhead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, UndefinedPriceError

EPS_FEAS = 1e-9


class MachineId(NamedTuple):
    name: str
    index: int


class VnfId(NamedTuple):
    name: str
    index: int


@dataclass(frozen=True)
class CapacityCurve:
    """Throughput of one machine running one VNF as a function of its share."""

    fractions: tuple[float, ...]
    capacities: tuple[float, ...]

    def __post_init__(self):
        fr = tuple(float(f) for f in self.fractions)
        cap = tuple(float(c) for c in self.capacities)
        object.__setattr__(self, "fractions", fr)
        object.__setattr__(self, "capacities", cap)
        problem = curve_problem(fr, cap)
        if problem is not None:
            raise ValueError(problem[1])

    @classmethod
    def linear(cls, capacity: float) -> "CapacityCurve":
        return cls((0.0, 1.0), (0.0, float(capacity)))

    @classmethod
    def from_samples(cls, samples: Sequence[Sequence[float]]) -> "CapacityCurve":
        samples = list(samples)
        return cls(tuple(s[0] for s in samples), tuple(s[1] for s in samples))

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.fractions, self.capacities))

    @property
    def full(self) -> float:
        """Capacity at full allocation (b_ij)."""
        return self.capacities[-1]

    @property
    def is_linear(self) -> bool:
        return len(self.fractions) == 2

    def __call__(self, fraction):
        # fractions outside [0, 1] clamp; no extrapolation
        f = np.clip(fraction, 0.0, 1.0)
        if self.is_linear:
            return f * self.full
        return np.interp(f, self.fractions, self.capacities)


def curve_problem(fractions, capacities):
    """Return ``(sample_index, message)`` for the first invariant violation, else None."""
    if len(fractions) != len(capacities):
        return None, "fractions and capacities differ in length"
    if len(fractions) < 2:
        return None, "a curve needs at least two samples"
    for k, (f, c) in enumerate(zip(fractions, capacities)):
        if not (math.isfinite(f) and math.isfinite(c)):
            return k, f"non-finite sample ({f}, {c})"
        if c < 0:
            return k, f"negative capacity {c}"
    if fractions[0] != 0.0 or capacities[0] != 0.0:
        return 0, "first sample must be (0, 0)"
    if fractions[-1] != 1.0:
        return len(fractions) - 1, f"last sample must have fraction 1, got {fractions[-1]}"
    for k in range(1, len(fractions)):
        if fractions[k] <= fractions[k - 1]:
            return k, (f"fractions not increasing: {fractions[k]} after "
                       f"{fractions[k - 1]}")
        if capacities[k] < capacities[k - 1]:
            return k, (f"capacities not monotone: {capacities[k]} after "
                       f"{capacities[k - 1]}")
    return None


@dataclass(frozen=True)
class CapacityModel:
    """Dense n x m grid of capacity curves with machine and VNF labels."""

    machines: tuple[str, ...]
    vnfs: tuple[str, ...]
    curves: tuple[tuple[CapacityCurve, ...], ...]
    units: str = "kpps"
    b: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "machines", tuple(self.machines))
        object.__setattr__(self, "vnfs", tuple(self.vnfs))
        object.__setattr__(self, "curves", tuple(tuple(r) for r in self.curves))
        n, m = len(self.machines), len(self.vnfs)
        if n == 0 or m == 0:
            raise ValueError("a model needs at least one machine and one VNF")
        for kind, names in (("machine", self.machines), ("vnf", self.vnfs)):
            if len(set(names)) != len(names):
                raise ValueError(f"duplicate {kind} names: {names}")
            if any(not name for name in names):
                raise ValueError(f"empty {kind} name")
        if len(self.curves) != n or any(len(row) != m for row in self.curves):
            raise DimensionError(f"curve grid must be {n}x{m}")
        b = np.array([[c.full for c in row] for row in self.curves], dtype=float)
        b.setflags(write=False)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_matrix(cls, b, machines=None, vnfs=None, units="kpps") -> "CapacityModel":
        b = np.asarray(b, dtype=float)
        if b.ndim != 2:
            raise DimensionError("capacity matrix must be 2-D")
        n, m = b.shape
        machines = machines or [f"m{i + 1}" for i in range(n)]
        vnfs = vnfs or [f"vnf{j + 1}" for j in range(m)]
        curves = [[CapacityCurve.linear(v) for v in row] for row in b]
        return cls(tuple(machines), tuple(vnfs), curves, units)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.machines), len(self.vnfs)

    @property
    def n_machines(self) -> int:
        return len(self.machines)

    @property
    def m_vnfs(self) -> int:
        return len(self.vnfs)

    @property
    def linear_only(self) -> bool:
        return all(c.is_linear for row in self.curves for c in row)

    @property
    def machine_ids(self) -> list[MachineId]:
        return [MachineId(name, i) for i, name in enumerate(self.machines)]

    @property
    def vnf_ids(self) -> list[VnfId]:
        return [VnfId(name, j) for j, name in enumerate(self.vnfs)]

    def zero_columns(self) -> list[int]:
        return [j for j in range(self.m_vnfs) if not np.any(self.b[:, j] > 0)]


@dataclass(frozen=True)
class CobbDouglas:
    """g(x) = prod x_j^a_j, evaluated as sum a_j log x_j."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(a) for a in self.weights)
        object.__setattr__(self, "weights", w)
        if not w or any(not (a > 0) or not math.isfinite(a) for a in w):
            raise ValueError("Cobb-Douglas weights must be strictly positive")
        if abs(sum(w) - 1.0) > 1e-9:
            raise ValueError(f"Cobb-Douglas weights must sum to 1, got {sum(w)}")

    @classmethod
    def equal(cls, m: int) -> "CobbDouglas":
        return cls(tuple([1.0 / m] * m))

    @classmethod
    def normalized(cls, weights) -> "CobbDouglas":
        w = np.asarray(weights, dtype=float)
        return cls(tuple(w / w.sum()))

    @property
    def kind(self) -> str:
        return "cobb-douglas"


@dataclass(frozen=True)
class Linear:
    """g(x) = sum w_j x_j, optionally subject to x_j >= r_j."""

    weights: tuple[float, ...]
    requirements: tuple[float, ...] | None = None

    def __post_init__(self):
        w = tuple(float(a) for a in self.weights)
        object.__setattr__(self, "weights", w)
        if not w or any(not (a > 0) or not math.isfinite(a) for a in w):
            raise ValueError("linear weights must be strictly positive")
        if self.requirements is not None:
            r = tuple(float(a) for a in self.requirements)
            if len(r) != len(w):
                raise ValueError("requirements must have one entry per VNF")
            if any(not (a >= 0) or not math.isfinite(a) for a in r):
                raise ValueError("requirements must be finite and non-negative")
            object.__setattr__(self, "requirements", r)

    @property
    def kind(self) -> str:
        return "linear"

    @property
    def has_requirements(self) -> bool:
        return self.requirements is not None and any(r > 0 for r in self.requirements)


UtilitySpec = CobbDouglas | Linear


@dataclass(frozen=True)
class ValidationResult:
    valid: bool
    negative_entries: tuple[tuple[int, int, float], ...] = ()
    overfull_rows: tuple[tuple[int, float], ...] = ()

    def messages(self) -> list[str]:
        out = [f"negative entry u[{i}][{j}] = {v:.12g}" for i, j, v in self.negative_entries]
        out += [f"row {i} sums to {s:.12g} > 1" for i, s in self.overfull_rows]
        return out


def check_dims(u, model: CapacityModel) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != model.shape:
        raise DimensionError(f"allocation shape {u.shape} does not match model {model.shape}")
    return u


def validate_allocation(u, model: CapacityModel, eps: float = EPS_FEAS) -> ValidationResult:
    u = check_dims(u, model)
    neg = tuple((int(i), int(j), float(u[i, j])) for i, j in zip(*np.nonzero(~(u >= 0))))
    sums = u.sum(axis=1)
    over = tuple((int(i), float(sums[i])) for i in np.nonzero(sums > 1.0 + eps)[0])
    return ValidationResult(not neg and not over, neg, over)


def evaluate_throughput(u, model: CapacityModel) -> np.ndarray:
    """x_j = sum_i curve_ij(u_ij); exactly sum_i b_ij u_ij for linear curves."""
    u = check_dims(u, model)
    if model.linear_only:
        return (model.b * u).sum(axis=0)
    n, m = model.shape
    x = np.zeros(m)
    for i in range(n):
        for j in range(m):
            x[j] += model.curves[i][j](u[i, j])
    return x


def evaluate_utility(x, spec: UtilitySpec) -> float:
    x = np.asarray(x, dtype=float)
    w = spec.weights
    if len(w) != x.shape[0]:
        raise DimensionError(f"utility has {len(w)} weights for {x.shape[0]} VNFs")
    if isinstance(spec, CobbDouglas):
        if np.any(x <= 0):
            return -math.inf
        return float(sum(a * math.log(v) for a, v in zip(w, x)))
    return float(sum(a * v for a, v in zip(w, x)))


def shadow_prices(x, spec: UtilitySpec) -> np.ndarray:
    """Marginal utility per unit throughput: a_j / x_j (log form) or w_j."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(spec.weights)
    if isinstance(spec, Linear):
        return w.copy()
    zero = np.nonzero(x <= 0)[0]
    if zero.size:
        raise UndefinedPriceError(f"shadow price undefined at zero throughput for VNF(s) {zero.tolist()}")
    return w / x


def kkt_residual(u, b, prices, active_tol: float = 1e-6) -> float:
    """Largest relative gap in marginal value p_j b_ij across active entries of a row.

    Inactive entries with a larger marginal value than the active ones also count.
    """
    worst = 0.0
    mv = b * prices
    for i in range(b.shape[0]):
        active = u[i] > active_tol
        if not active.any():
            continue
        top = mv[i, active].max()
        if top <= 0:
            continue
        spread = (top - mv[i, active].min()) / top
        excess = max(0.0, (mv[i, ~active].max() - top) / top) if (~active).any() else 0.0
        worst = max(worst, spread, excess)
    return float(worst)
