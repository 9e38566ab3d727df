"""Comparative-advantage predicates, orderings, structure checks, the
threshold solvers for the n x 2 and 2 x m shapes, and baseline strategies.

All capacity comparisons are done by cross-multiplication so zero
capacities and exact ties need no special casing.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (InfeasibleObjectiveError, NonlinearModelError,
                     UnsupportedShapeError)
from .model import (CapacityModel, CobbDouglas, Linear, UtilitySpec,
                    evaluate_utility, kkt_residual, shadow_prices)
from .report import Diagnostics, SolveReport, make_report

ZERO_TOL = 1e-6


class Advantage(enum.Enum):
    FIRST = "i1-advantage"
    SECOND = "i2-advantage"
    TIE = "tie"


def _capacities(model) -> np.ndarray:
    if isinstance(model, CapacityModel):
        return model.b
    return np.asarray(model, dtype=float)


def has_comparative_advantage(model, i1: int, i2: int, j1: int, j2: int) -> Advantage:
    """Does machine ``i1`` hold the comparative advantage for VNF ``j1``
    (against machine ``i2`` and VNF ``j2``)?"""
    b = _capacities(model)
    if b[i2, j1] == 0 and b[i2, j2] == 0:
        raise ValueError(f"machine {i2} has zero capacity for both VNFs {j1} and {j2}; "
                         "comparison undefined")
    lhs = b[i1, j1] * b[i2, j2]
    rhs = b[i1, j2] * b[i2, j1]
    if lhs > rhs:
        return Advantage.FIRST
    if lhs < rhs:
        return Advantage.SECOND
    return Advantage.TIE


@dataclass(frozen=True)
class CaOrdering:
    axis: str  # "machines" or "vnfs"
    order: tuple[int, ...]
    ratios: tuple[float, ...]  # along the order, non-increasing
    ties: tuple[tuple[int, int], ...] = ()

    @property
    def machine_order(self):
        return self.order if self.axis == "machines" else None

    @property
    def vnf_order(self):
        return self.order if self.axis == "vnfs" else None


def _ratio(num, den):
    if den == 0:
        return math.inf if num > 0 else math.nan
    return num / den


def _pairs(b, axis):
    """(numerator, denominator) per element of the sorted axis."""
    if axis == "machines":
        if b.shape[1] != 2:
            raise UnsupportedShapeError(
                f"machine ordering needs exactly 2 VNFs, got {b.shape[1]}; use solve_general")
        return [(b[i, 0], b[i, 1]) for i in range(b.shape[0])]
    if axis == "vnfs":
        if b.shape[0] != 2:
            raise UnsupportedShapeError(
                f"VNF ordering needs exactly 2 machines, got {b.shape[0]}; use solve_general")
        return [(b[0, j], b[1, j]) for j in range(b.shape[1])]
    raise ValueError(f"axis must be 'machines' or 'vnfs', not {axis!r}")


def _cmp_key(pairs):
    def cmp(a, c):
        (p, q), (r, s) = pairs[a], pairs[c]
        # all-zero elements have no ratio; they sort last
        za, zc = p == 0 and q == 0, r == 0 and s == 0
        if za or zc:
            return (za > zc) - (za < zc) or (a - c)
        lhs, rhs = p * s, r * q
        if lhs != rhs:
            return -1 if lhs > rhs else 1
        return a - c
    return functools.cmp_to_key(cmp)


def _tied(pairs, a, c):
    (p, q), (r, s) = pairs[a], pairs[c]
    return p * s == r * q


def sort_by_ca(model, axis: str = "machines") -> CaOrdering:
    """Order machines by decreasing b_i1/b_i2, or VNFs by decreasing b_1j/b_2j."""
    b = _capacities(model)
    pairs = _pairs(b, axis)
    order = sorted(range(len(pairs)), key=_cmp_key(pairs))
    ratios = tuple(_ratio(*pairs[k]) for k in order)
    ties = tuple((a, c) for a, c in zip(order, order[1:]) if _tied(pairs, a, c))
    return CaOrdering(axis, tuple(order), ratios, ties)


# ---------------------------------------------------------------------------
# structure check


@dataclass(frozen=True)
class StructureCheck:
    holds: bool
    violations: tuple[tuple[int, int, float], ...]
    inferred_threshold: int | None
    axis: str
    order: tuple[int, ...]
    ties: tuple[tuple[int, int], ...] = ()

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "violations": [list(v) for v in self.violations],
            "inferred_threshold": self.inferred_threshold,
            "axis": self.axis,
            "order": list(self.order),
            "ties": [list(t) for t in self.ties],
        }


def check_ca_structure(u, model, tol: float = ZERO_TOL) -> StructureCheck:
    """Verify the single-threshold zero pattern after sorting by comparative advantage.

    For every strictly ordered pair (k before l) the allocation must not
    have both the earlier element doing the later side's work and the later
    element doing the earlier side's work.  Tied pairs are exempt.
    """
    b = _capacities(model)
    u = np.asarray(u, dtype=float)
    n, m = b.shape
    if m == 2:
        axis = "machines"
    elif n == 2:
        axis = "vnfs"
    else:
        raise UnsupportedShapeError(f"structure check needs an n x 2 or 2 x m problem, got {n}x{m}")
    ordering = sort_by_ca(b, axis)
    pairs = _pairs(b, axis)
    order = ordering.order

    def late(k):   # does element k take part in the "second" side?
        return u[k, 1] > tol if axis == "machines" else u[1, k] > tol

    def early(k):
        return u[k, 0] > tol if axis == "machines" else u[0, k] > tol

    def entry(k, side):
        i, j = (k, side) if axis == "machines" else (side, k)
        return (i, j, float(u[i, j]))

    bad = set()
    for a in range(len(order)):
        for c in range(a + 1, len(order)):
            k, l = order[a], order[c]
            if _tied(pairs, k, l):
                continue
            if late(k) and early(l):
                bad.add(entry(k, 1))
                bad.add(entry(l, 0))
    threshold = None
    for pos, k in enumerate(order, start=1):
        if late(k):
            threshold = pos
            break
    if threshold is None:
        threshold = len(order)
    violations = tuple(sorted(bad))
    return StructureCheck(not violations, violations, threshold, axis, order, ordering.ties)


# ---------------------------------------------------------------------------
# threshold solvers


def _require_linear_positive(model: CapacityModel, spec, shape_ok: bool, shape_msg: str):
    if not isinstance(spec, CobbDouglas):
        raise TypeError("threshold solvers need a Cobb-Douglas utility")
    if not shape_ok:
        raise UnsupportedShapeError(shape_msg)
    if not model.linear_only:
        raise NonlinearModelError("threshold solvers need a linear capacity model; use the oracle")
    zero = model.zero_columns()
    if zero:
        names = [model.vnfs[j] for j in zero]
        raise InfeasibleObjectiveError(
            f"VNF(s) {', '.join(names)} have zero capacity on every machine; "
            "Cobb-Douglas utility is -inf everywhere", zero)
    if np.any(model.b <= 0):
        raise ValueError("threshold solvers need strictly positive capacities; use solve_general")


def _theta(b_sorted, alpha, pos):
    """Closed-form split of the machine at 0-based position ``pos``.

    Solves  alpha b_I1 x2 = (1 - alpha) b_I2 x1  with
    x1 = S1 + theta b_I1 and x2 = (1 - theta) b_I2 + S2, which is linear in theta.
    """
    bi1, bi2 = b_sorted[pos]
    s1 = b_sorted[:pos, 0].sum()
    s2 = b_sorted[pos + 1:, 1].sum()
    return (alpha * bi1 * (bi2 + s2) - (1 - alpha) * bi2 * s1) / (bi1 * bi2), s1, s2


def _threshold_allocation(n, order, pos, theta):
    u = np.zeros((n, 2))
    for p, i in enumerate(order):
        if p < pos:
            u[i, 0] = 1.0
        elif p > pos:
            u[i, 1] = 1.0
        else:
            u[i] = (theta, 1.0 - theta)
    return u


def _solve_threshold(model: CapacityModel, spec: CobbDouglas, strategy: str) -> SolveReport:
    b = model.b
    n = b.shape[0]
    alpha = spec.weights[0]
    ordering = sort_by_ca(b, "machines")
    order = list(ordering.order)
    bs = b[order]

    chosen = None
    for pos in range(n):
        theta, _, _ = _theta(bs, alpha, pos)
        if 0.0 <= theta <= 1.0:
            chosen = (pos, theta, False)
            break
    if chosen is None:
        # degenerate: every interior candidate falls outside [0, 1]
        best = -math.inf
        for pos in range(n):
            theta, _, _ = _theta(bs, alpha, pos)
            clamped = min(max(theta, 0.0), 1.0)
            x1 = bs[:pos, 0].sum() + clamped * bs[pos, 0]
            x2 = (1 - clamped) * bs[pos, 1] + bs[pos + 1:, 1].sum()
            val = evaluate_utility((x1, x2), spec)
            if val > best:
                best, chosen = val, (pos, clamped, True)
    pos, theta, boundary = chosen
    # report theta in [0, 1): a fully used threshold machine hands over to the next one
    if theta == 1.0 and pos < n - 1:
        pos, theta = pos + 1, 0.0
    u = _threshold_allocation(n, order, pos, theta)

    report = make_report(model, spec, u, strategy)
    d = report.diagnostics
    d.threshold = pos + 1
    d.theta = float(theta)
    d.boundary = boundary
    d.ordering = tuple(order)
    d.ties = ordering.ties
    x = report.x
    if np.all(x > 0):
        p = shadow_prices(x, spec)
        d.shadow_prices = tuple(float(v) for v in p)
        d.foc_residual = kkt_residual(u, b, p)
    d.structure = check_ca_structure(u, b)
    return report


def solve_n_by_2(model: CapacityModel, spec: CobbDouglas) -> SolveReport:
    """Exact optimum for two VNFs by a scan over candidate threshold machines."""
    n, m = model.shape
    _require_linear_positive(model, spec, m == 2, f"solve_n_by_2 needs 2 VNFs, got {m}")
    return _solve_threshold(model, spec, "ca-n-by-2")


def solve_2x2(model: CapacityModel, spec: CobbDouglas) -> SolveReport:
    n, m = model.shape
    _require_linear_positive(model, spec, n == 2 and m == 2,
                             f"solve_2x2 needs a 2x2 problem, got {n}x{m}")
    return _solve_threshold(model, spec, "ca-2x2")


def solve_2_by_m(model: CapacityModel, spec: CobbDouglas, config=None) -> SolveReport:
    """Two machines, many VNFs: general solver plus threshold extraction."""
    from .solver import solve_general

    n, m = model.shape
    _require_linear_positive(model, spec, n == 2, f"solve_2_by_m needs 2 machines, got {n}")
    report = solve_general(model, spec, config)
    report.strategy = "ca-2-by-m"
    check = check_ca_structure(report.allocation, model.b)
    report.diagnostics.structure = check
    report.diagnostics.threshold = check.inferred_threshold
    report.diagnostics.ordering = check.order
    report.diagnostics.ties = check.ties
    return report


def solve_ca_specialization(model: CapacityModel, spec: Linear) -> SolveReport:
    """Whole-machine comparative-advantage split for two VNFs.

    Machines sorted by CA are assigned entirely to VNF 1 up to a cut and to
    VNF 2 after it.  The cut maximizes the linear utility among cuts that
    serve both VNFs (when there are at least two machines).
    """
    n, m = model.shape
    if m != 2:
        raise UnsupportedShapeError(
            f"CA specialization under a linear utility needs 2 VNFs, got {m}; "
            "use the LP (general) strategy")
    if not model.linear_only:
        raise NonlinearModelError("CA specialization needs a linear capacity model")
    ordering = sort_by_ca(model.b, "machines")
    order = list(ordering.order)
    cuts = range(1, n) if n >= 2 else range(0, n + 1)
    best, best_u, best_cut = -math.inf, None, None
    for cut in cuts:
        u = np.zeros((n, 2))
        for p, i in enumerate(order):
            u[i, 0 if p < cut else 1] = 1.0
        val = evaluate_utility((model.b * u).sum(axis=0), spec)
        if val > best:
            best, best_u, best_cut = val, u, cut
    report = make_report(model, spec, best_u, "ca-specialization")
    d = report.diagnostics
    d.threshold = best_cut + 1 if best_cut < n else n
    d.theta = 0.0 if best_cut < n else 1.0
    d.ordering = tuple(order)
    d.ties = ordering.ties
    d.structure = check_ca_structure(best_u, model.b)
    return report


# ---------------------------------------------------------------------------
# baselines


def baseline_even_split(model) -> np.ndarray:
    n, m = _capacities(model).shape
    return np.full((n, m), 1.0 / m)


def baseline_absolute_advantage(model) -> np.ndarray:
    """Each machine runs only the VNF it processes fastest (lowest index on ties)."""
    b = _capacities(model)
    u = np.zeros_like(b, dtype=float)
    u[np.arange(b.shape[0]), np.argmax(b, axis=1)] = 1.0
    return u
