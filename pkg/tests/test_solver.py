import math

import numpy as np
import pytest

from vnfca.errors import (InfeasibleObjectiveError, InfeasibleRequirementsError,
                          NonlinearModelError, OracleBudgetError)
from vnfca.knowledgebase import build_model, load_path
from vnfca.model import CapacityModel, CobbDouglas, Linear, validate_allocation
from vnfca.solver import (OracleConfig, SolverConfig, brute_force_oracle,
                          compare_strategies, grid_size, kkt_residual, solve,
                          solve_general, solve_n_by_2, solve_requirements_lp,
                          utility_trace)

from conftest import DATA, random_instances


def test_general_matches_closed_form(illustration, half, backend):
    g = solve_general(illustration, half, SolverConfig(backend=backend))
    c = solve_n_by_2(illustration, half)
    assert g.diagnostics.converged
    assert g.utility == pytest.approx(c.utility, abs=1e-6)
    np.testing.assert_allclose(g.allocation, c.allocation, atol=1e-4)


def test_general_single_cell():
    r = solve_general(CapacityModel.from_matrix([[7]]), CobbDouglas((1.0,)))
    assert r.allocation.tolist() == [[1.0]] and r.x.tolist() == [7.0]


@pytest.mark.parametrize("b", random_instances(11, 5, (3, 3)))
def test_general_beats_grid_oracle(b):
    model = CapacityModel.from_matrix(b)
    spec = CobbDouglas.equal(3)
    g = solve_general(model, spec)
    o = brute_force_oracle(model, spec, OracleConfig(0.05))
    assert g.diagnostics.converged
    assert g.utility >= o.utility - 1e-3 * abs(o.utility)


def test_general_zero_column(half):
    with pytest.raises(InfeasibleObjectiveError):
        solve_general(CapacityModel.from_matrix([[1, 0], [2, 0]]), half)


def test_general_rejects_curve_model(half):
    model = build_model(load_path(DATA / "two_machine_overhead.json"))
    with pytest.raises(NonlinearModelError):
        solve_general(model, half)


def test_general_iteration_cap(illustration, half):
    r = solve_general(illustration, half, SolverConfig(max_iter=1))
    assert not r.diagnostics.converged
    assert r.diagnostics.iterations == 1


def test_every_iterate_feasible(illustration, half):
    for cap in range(0, 30):
        r = solve_general(illustration, half, SolverConfig(max_iter=cap, backend="numpy"))
        assert validate_allocation(r.allocation, illustration).valid


def test_utility_trace_monotone():
    for b in random_instances(3, 5, (4, 3)):
        trace = utility_trace(CapacityModel.from_matrix(b), CobbDouglas.equal(3))
        assert np.all(np.diff(trace) >= -1e-15 * max(1.0, np.abs(trace).max()))


def test_kkt_at_convergence():
    for b in random_instances(5, 5, (4, 3)):
        model = CapacityModel.from_matrix(b)
        r = solve_general(model, CobbDouglas((0.2, 0.3, 0.5)))
        assert r.diagnostics.converged
        assert kkt_residual(r.allocation, b, np.array(r.diagnostics.shadow_prices)) <= 1e-6


def test_lp_no_requirements(illustration):
    r = solve_requirements_lp(illustration, Linear((1, 1), (0, 0)))
    assert r.total == pytest.approx(65)
    np.testing.assert_allclose(r.allocation, [[0, 1], [0, 1]], atol=1e-12)


def test_lp_with_requirement(illustration):
    r = solve_requirements_lp(illustration, Linear((1, 1), (19.5, 0)))
    # cheapest VNF-1 capacity is machine 1 (35/21 VNF-2 units per unit)
    assert r.x[0] == pytest.approx(19.5)
    assert r.allocation[0, 0] == pytest.approx(13 / 14)
    assert r.total == pytest.approx(52) and r.total < 65
    assert r.diagnostics.binding["requirements"] == ["vnf1"]
    grid = brute_force_oracle(illustration, Linear((1, 1), (19.5, 0)), OracleConfig(0.01))
    assert grid.x[0] >= 19.5
    assert grid.total <= r.total + 1e-9
    assert grid.total >= r.total - 0.1


def test_lp_infeasible_names_vnf(illustration):
    with pytest.raises(InfeasibleRequirementsError) as exc:
        solve_requirements_lp(illustration, Linear((1, 1), (100, 100)))
    assert "vnf1" in str(exc.value) and "27" in str(exc.value)
    assert (0, 100.0, 27.0) in exc.value.unreachable


def test_lp_jointly_infeasible(illustration):
    # each requirement alone is reachable, both together are not
    with pytest.raises(InfeasibleRequirementsError) as exc:
        solve_requirements_lp(illustration, Linear((1, 1), (27, 60)))
    assert "jointly" in str(exc.value)


def test_lp_row_separable_optimum():
    for b in random_instances(8, 10, (4, 3)):
        r = solve_requirements_lp(CapacityModel.from_matrix(b), Linear((1, 1, 1)))
        assert r.total == pytest.approx(b.max(axis=1).sum(), rel=1e-12)


def test_oracle_illustration(illustration, half):
    r = brute_force_oracle(illustration, half, OracleConfig(0.01))
    exact = solve_n_by_2(illustration, half)
    assert abs(r.utility - exact.utility) <= 1e-3
    assert abs(r.allocation[0, 0] - 13 / 14) <= 0.01


def test_oracle_flat_objective_lexicographic():
    r = brute_force_oracle(CapacityModel.from_matrix([[3, 3]]), Linear((1, 1)), OracleConfig(0.25))
    assert r.allocation.tolist() == [[0.0, 1.0]]


def test_oracle_relaxed_grid_includes_idle():
    cfg = OracleConfig(0.5, full_utilization=False)
    assert grid_size(1, 2, cfg) == 6
    r = brute_force_oracle(CapacityModel.from_matrix([[3, 3]]), Linear((1, 1)), cfg)
    assert r.allocation.sum() == 1.0


def test_oracle_budget():
    with pytest.raises(OracleBudgetError) as exc:
        brute_force_oracle(CapacityModel.from_matrix(np.ones((4, 4))), CobbDouglas.equal(4),
                           OracleConfig(0.01, max_points=1000))
    assert exc.value.count == math.comb(103, 3) ** 4


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(0.3)
    with pytest.raises(ValueError):
        OracleConfig(0.75)


def test_oracle_curve_model_prefers_specialization(half):
    model = build_model(load_path(DATA / "two_machine_overhead.json"))
    o = brute_force_oracle(model, half, OracleConfig(0.05))
    even = solve(model, half, "even")
    assert o.utility > even.utility
    np.testing.assert_array_equal(o.allocation, np.eye(2))


def test_compare_linear(illustration):
    totals = {r.strategy: r.total for r in compare_strategies(illustration, Linear((1, 1)))}
    assert totals["absolute"] == 65
    assert totals["ca-specialization"] == 51
    assert totals["even"] == 46
    assert totals["oracle"] == 65


def test_compare_cobb_douglas(illustration, half):
    reports = compare_strategies(illustration, half)
    assert reports[0].strategy == "ca-2x2"
    absolute = [r for r in reports if r.strategy == "absolute"][0]
    assert absolute.utility == -math.inf
    assert reports[-1] is absolute


def test_compare_symmetric_ties():
    model = CapacityModel.from_matrix([[1, 1], [1, 1]])
    utils = [r.utility for r in compare_strategies(model, Linear((1, 1)))]
    assert max(utils) - min(utils) <= 1e-9


def test_compare_records_errors(half):
    model = build_model(load_path(DATA / "two_machine_overhead.json"))
    reports = compare_strategies(model, half)
    ca = [r for r in reports if r.strategy == "ca"][0]
    assert not ca.ok and "NonlinearModelError" in ca.error
    assert reports[0].strategy == "oracle"


def test_compare_skips_oracle_over_budget(half):
    model = CapacityModel.from_matrix(random_instances(0, 1, (6, 2))[0])
    names = [r.strategy for r in compare_strategies(model, half, oracle=OracleConfig(0.01, max_points=100))]
    assert "oracle" not in names


def test_value_monotone_in_capacity(half):
    for b in random_instances(21, 10, (3, 2)):
        base = solve_n_by_2(CapacityModel.from_matrix(b), half).utility
        bumped = b.copy()
        bumped[1, 0] += 1.0
        assert solve_n_by_2(CapacityModel.from_matrix(bumped), half).utility >= base
