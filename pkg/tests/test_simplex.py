import numpy as np
import pytest
from scipy.optimize import linprog

from vnfca.simplex import simplex_max


def test_textbook_problem():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
    res = simplex_max([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert res.status == "optimal"
    np.testing.assert_allclose(res.z, [2, 6])
    assert res.objective == pytest.approx(36)


def test_phase_one_needed():
    # max x + y, x + y <= 4, x >= 1, y >= 2
    res = simplex_max([1, 1], [[1, 1]], [4], [[1, 0], [0, 1]], [1, 2])
    assert res.status == "optimal"
    assert res.objective == pytest.approx(4)
    assert res.z[0] >= 1 - 1e-9 and res.z[1] >= 2 - 1e-9


def test_infeasible():
    res = simplex_max([1, 1], [[1, 1]], [1], [[1, 1]], [3])
    assert res.status == "infeasible"
    assert res.ge_residuals[0] == pytest.approx(2)


def test_unbounded():
    assert simplex_max([1, 0], None, None, [[1, 1]], [1]).status == "unbounded"


def test_degenerate_cycling_example():
    # Beale's example cycles under the largest-coefficient rule; Bland terminates
    c = [0.75, -150, 0.02, -6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    res = simplex_max(c, A, [0, 0, 1])
    assert res.status == "optimal"
    assert res.objective == pytest.approx(0.05)


@pytest.mark.parametrize("seed", range(25))
def test_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    nv, p, q = 5, 3, 2
    c = rng.uniform(0, 5, nv)
    A = rng.uniform(0, 3, (p, nv))
    b = rng.uniform(5, 10, p)
    G = rng.uniform(0, 1, (q, nv))
    h = rng.uniform(0, 1, q)
    res = simplex_max(c, A, b, G, h)
    ref = linprog(-c, A_ub=np.vstack([A, -G]), b_ub=np.concatenate([b, -h]), method="highs")
    assert ref.status == 0 and res.status == "optimal"
    assert res.objective == pytest.approx(-ref.fun, rel=1e-9)
