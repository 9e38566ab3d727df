"""Numeric inner loops: row-wise simplex projection, projected-gradient
ascent on the Cobb-Douglas log utility, and exhaustive grid enumeration.

Every kernel exists twice: a numba ``@njit`` version and a pure-numpy
version.  The numba path is used by default; set ``VNFCA_DISABLE_NUMBA=1``
(or pass ``backend="numpy"``) to force the numpy path.  Both paths follow
the same arithmetic order so they agree to round-off.
"""

from __future__ import annotations

import itertools
import os

import numpy as np

try:
    import numba
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

UTIL_COBB_DOUGLAS = 0
UTIL_LINEAR = 1


def _env_disabled() -> bool:
    return os.environ.get("VNFCA_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


def default_backend() -> str:
    return "numpy" if (_env_disabled() or not HAS_NUMBA) else "numba"


def _resolve(backend: str | None) -> str:
    backend = backend or default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


# ---------------------------------------------------------------------------
# numpy implementations


def _project_rows_np(v):
    # sort-based Euclidean projection of every row onto {u >= 0, sum u = 1}
    n, m = v.shape
    s = -np.sort(-v, axis=1)
    css = np.cumsum(s, axis=1) - 1.0
    k = np.arange(1, m + 1)
    rho = np.sum(s - css / k > 0, axis=1) - 1
    tau = css[np.arange(n), rho] / (rho + 1)
    return np.maximum(v - tau[:, None], 0.0)


def _throughput_np(b, u):
    m = b.shape[1]
    x = np.zeros(m)
    for i in range(b.shape[0]):
        x += b[i] * u[i]
    return x


def _log_gain_np(alpha, x, dx):
    # sum_j a_j log((x_j + dx_j) / x_j), accurate for tiny dx
    out = 0.0
    for j in range(x.shape[0]):
        r = dx[j] / x[j]
        if r <= -1.0:
            return -np.inf
        out += alpha[j] * np.log1p(r)
    return out


def _pga_np(b, alpha, u0, max_iter, step0, shrink, armijo, rel_tol, pg_tol, min_step):
    u = u0.copy()
    x = _throughput_np(b, u)
    f = float(np.sum(alpha * np.log(x)))
    trace = np.empty(max_iter + 1)
    trace[0] = f
    last_rel = np.inf
    pg = np.inf
    converged = False
    it = 0
    while it < max_iter:
        g = alpha * b / x
        pg = float(np.sqrt(np.sum((_project_rows_np(u + g) - u) ** 2)))
        if pg < pg_tol and last_rel < rel_tol:
            converged = True
            break
        # row-centred gradient: blind to the round-off in projected row sums
        gc = g - g.mean(axis=1)[:, None]
        step = step0
        accepted = False
        while step >= min_step:
            cand = _project_rows_np(u + step * g)
            d = cand - u
            if float(np.sum(gc * d)) > 0.0:
                dx = _throughput_np(b, d)
                gain = _log_gain_np(alpha, x, dx)
                if gain >= armijo * float(np.sum(g * d)):
                    accepted = True
                    break
                if gain == -np.inf:
                    step *= shrink
                    continue
                # concave objective: a non-negative slope at the far end of the
                # segment means the whole step was uphill
                ge = alpha * b / (x + dx)
                if float(np.sum((ge - ge.mean(axis=1)[:, None]) * d)) >= 0.0:
                    accepted = True
                    break
            step *= shrink
        if not accepted:
            converged = pg < pg_tol
            break
        u = cand
        x = _throughput_np(b, u)
        f_new = f + gain
        last_rel = gain / max(abs(f), 1.0)
        f = f_new
        it += 1
        trace[it] = f
    return u, it, converged, pg, trace[: it + 1]


def _oracle_np(contrib, kind, weights, req, tol):
    n, p, m = contrib.shape
    best_val = -np.inf
    best_idx = np.full(n, -1, dtype=np.int64)
    last = contrib[n - 1]
    for prefix in itertools.product(range(p), repeat=n - 1):
        base = np.zeros(m)
        for i, k in enumerate(prefix):
            base = base + contrib[i, k]
        xs = base + last
        feasible = np.all(xs >= req - tol, axis=1)
        if kind == UTIL_COBB_DOUGLAS:
            val = np.zeros(p)
            pos = np.all(xs > 0, axis=1)
            with np.errstate(divide="ignore"):
                for j in range(m):
                    val = val + weights[j] * np.log(xs[:, j])
            val[~pos] = -np.inf
        else:
            val = np.zeros(p)
            for j in range(m):
                val = val + weights[j] * xs[:, j]
        if not feasible.any():
            continue
        val = np.where(feasible, val, -np.inf)
        k = int(np.argmax(val))
        if val[k] == -np.inf:
            k = int(np.argmax(feasible))
        if best_idx[0] < 0 or val[k] > best_val:
            best_val = float(val[k])
            best_idx[: n - 1] = prefix
            best_idx[n - 1] = k
    return best_idx, best_val


# ---------------------------------------------------------------------------
# numba implementations

if HAS_NUMBA:

    @njit(cache=True)
    def _project_row_nb(v, out):
        m = v.shape[0]
        s = np.sort(v)[::-1]
        css = 0.0
        tau = 0.0
        for k in range(m):
            css += s[k]
            t = (css - 1.0) / (k + 1)
            if s[k] - t > 0:
                tau = t
        for k in range(m):
            d = v[k] - tau
            out[k] = d if d > 0.0 else 0.0

    @njit(cache=True)
    def _project_rows_nb(v):
        out = np.empty_like(v)
        for i in range(v.shape[0]):
            _project_row_nb(v[i], out[i])
        return out

    @njit(cache=True)
    def _throughput_nb(b, u, x):
        n, m = b.shape
        for j in range(m):
            x[j] = 0.0
        for i in range(n):
            for j in range(m):
                x[j] += b[i, j] * u[i, j]

    @njit(cache=True)
    def _pga_nb(b, alpha, u0, max_iter, step0, shrink, armijo, rel_tol, pg_tol, min_step):
        n, m = b.shape
        u = u0.copy()
        x = np.empty(m)
        dx = np.empty(m)
        _throughput_nb(b, u, x)
        f = 0.0
        for j in range(m):
            f += alpha[j] * np.log(x[j])
        trace = np.empty(max_iter + 1)
        trace[0] = f
        g = np.empty((n, m))
        v = np.empty((n, m))
        cand = np.empty((n, m))
        d = np.empty((n, m))
        gc = np.empty((n, m))
        ge = np.empty(m)
        last_rel = np.inf
        pg = np.inf
        converged = False
        it = 0
        while it < max_iter:
            for i in range(n):
                for j in range(m):
                    g[i, j] = alpha[j] * b[i, j] / x[j]
                    v[i, j] = u[i, j] + g[i, j]
            for i in range(n):
                _project_row_nb(v[i], cand[i])
            acc = 0.0
            for i in range(n):
                for j in range(m):
                    acc += (cand[i, j] - u[i, j]) ** 2
            pg = np.sqrt(acc)
            if pg < pg_tol and last_rel < rel_tol:
                converged = True
                break
            for i in range(n):
                mean = 0.0
                for j in range(m):
                    mean += g[i, j]
                mean /= m
                for j in range(m):
                    gc[i, j] = g[i, j] - mean
            step = step0
            accepted = False
            gain = 0.0
            while step >= min_step:
                for i in range(n):
                    for j in range(m):
                        v[i, j] = u[i, j] + step * g[i, j]
                for i in range(n):
                    _project_row_nb(v[i], cand[i])
                dir_deriv = 0.0
                slope = 0.0
                for i in range(n):
                    for j in range(m):
                        d[i, j] = cand[i, j] - u[i, j]
                        dir_deriv += g[i, j] * d[i, j]
                        slope += gc[i, j] * d[i, j]
                if slope > 0.0:
                    _throughput_nb(b, d, dx)
                    gain = 0.0
                    for j in range(m):
                        r = dx[j] / x[j]
                        if r <= -1.0:
                            gain = -np.inf
                            break
                        gain += alpha[j] * np.log1p(r)
                    if gain >= armijo * dir_deriv:
                        accepted = True
                        break
                    if gain == -np.inf:
                        step *= shrink
                        continue
                    end_slope = 0.0
                    for i in range(n):
                        mean = 0.0
                        for j in range(m):
                            ge[j] = alpha[j] * b[i, j] / (x[j] + dx[j])
                            mean += ge[j]
                        mean /= m
                        for j in range(m):
                            end_slope += (ge[j] - mean) * d[i, j]
                    if end_slope >= 0.0:
                        accepted = True
                        break
                step *= shrink
            if not accepted:
                converged = pg < pg_tol
                break
            u[:, :] = cand
            _throughput_nb(b, u, x)
            last_rel = gain / max(abs(f), 1.0)
            f = f + gain
            it += 1
            trace[it] = f
        return u, it, converged, pg, trace[: it + 1]

    @njit(cache=True)
    def _oracle_nb(contrib, kind, weights, req, tol):
        n, p, m = contrib.shape
        idx = np.zeros(n, dtype=np.int64)
        best_idx = np.full(n, -1, dtype=np.int64)
        best_val = -np.inf
        x = np.empty(m)
        while True:
            for j in range(m):
                x[j] = 0.0
            for i in range(n - 1):
                for j in range(m):
                    x[j] += contrib[i, idx[i], j]
            for j in range(m):
                x[j] = x[j] + contrib[n - 1, idx[n - 1], j]
            feasible = True
            for j in range(m):
                if x[j] < req[j] - tol:
                    feasible = False
                    break
            if feasible:
                val = 0.0
                if kind == UTIL_COBB_DOUGLAS:
                    for j in range(m):
                        if x[j] <= 0.0:
                            val = -np.inf
                            break
                        val += weights[j] * np.log(x[j])
                else:
                    for j in range(m):
                        val += weights[j] * x[j]
                if best_idx[0] < 0 or val > best_val:
                    best_val = val
                    best_idx[:] = idx
            k = n - 1
            while k >= 0:
                idx[k] += 1
                if idx[k] < p:
                    break
                idx[k] = 0
                k -= 1
            if k < 0:
                break
        return best_idx, best_val


# ---------------------------------------------------------------------------
# dispatch


def project_rows(v, backend: str | None = None) -> np.ndarray:
    """Project every row of ``v`` onto the probability simplex."""
    v = np.ascontiguousarray(v, dtype=float)
    if _resolve(backend) == "numba":
        return _project_rows_nb(v)
    return _project_rows_np(v)


def projected_gradient(b, alpha, u0, *, max_iter, step0, shrink, armijo,
                       rel_tol, pg_tol, min_step, backend: str | None = None):
    """Maximize sum_j alpha_j log(sum_i b_ij u_ij) over row simplices.

    Returns ``(u, iterations, converged, pg_norm, utility_trace)``.
    """
    b = np.ascontiguousarray(b, dtype=float)
    alpha = np.ascontiguousarray(alpha, dtype=float)
    u0 = np.ascontiguousarray(u0, dtype=float)
    args = (b, alpha, u0, int(max_iter), float(step0), float(shrink), float(armijo),
            float(rel_tol), float(pg_tol), float(min_step))
    if _resolve(backend) == "numba":
        u, it, conv, pg, trace = _pga_nb(*args)
    else:
        u, it, conv, pg, trace = _pga_np(*args)
    return u, int(it), bool(conv), float(pg), np.asarray(trace)


def grid_argmax(contrib, kind: int, weights, requirements=None, tol: float = 1e-12,
                backend: str | None = None):
    """Exhaustive search over one grid point per machine.

    ``contrib[i, p, :]`` is the throughput vector machine ``i`` produces at
    grid point ``p``.  Points are visited in lexicographic order and only a
    strictly better value replaces the incumbent, so ties resolve to the
    first point visited.  Returns ``(indices, value)``; indices are -1 when
    no point satisfies the requirements.
    """
    contrib = np.ascontiguousarray(contrib, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    m = contrib.shape[2]
    req = np.zeros(m) if requirements is None else np.ascontiguousarray(requirements, dtype=float)
    if _resolve(backend) == "numba":
        idx, val = _oracle_nb(contrib, int(kind), weights, req, float(tol))
    else:
        idx, val = _oracle_np(contrib, int(kind), weights, req, float(tol))
    return np.asarray(idx), float(val)
