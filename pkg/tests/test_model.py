import math

import numpy as np
import pytest

from vnfca.errors import DimensionError, UndefinedPriceError
from vnfca.model import (CapacityCurve, CapacityModel, CobbDouglas, Linear,
                         evaluate_throughput, evaluate_utility, shadow_prices,
                         validate_allocation)


def test_validate_full_specialization(illustration):
    assert validate_allocation([[1, 0], [0, 1]], illustration).valid


def test_validate_overfull_row(illustration):
    res = validate_allocation([[0.7, 0.4], [0, 1]], illustration)
    assert not res.valid
    assert res.overfull_rows[0][0] == 0
    assert res.overfull_rows[0][1] == pytest.approx(1.1)
    assert res.negative_entries == ()


def test_validate_negative_entry(illustration):
    res = validate_allocation([[-0.1, 0.5], [0, 1]], illustration)
    assert not res.valid
    assert res.negative_entries == ((0, 0, -0.1),)


def test_validate_tolerates_roundoff(illustration):
    assert validate_allocation([[0.5, 0.5 + 5e-10], [0, 1]], illustration).valid
    assert not validate_allocation([[0.5, 0.5 + 5e-9], [0, 1]], illustration).valid


def test_validate_dimension_mismatch(illustration):
    with pytest.raises(DimensionError):
        validate_allocation([[1, 0, 0], [0, 1, 0]], illustration)


def test_throughput_specialized(illustration):
    x = evaluate_throughput([[1, 0], [0, 1]], illustration)
    assert x.tolist() == [21, 30]
    assert x.sum() == 51


def test_throughput_even_split_is_46(illustration):
    x = evaluate_throughput([[0.5, 0.5], [0.5, 0.5]], illustration)
    assert x.tolist() == [13.5, 32.5]
    assert x.sum() == 46


def test_throughput_zero_allocation(illustration):
    assert evaluate_throughput(np.zeros((2, 2)), illustration).tolist() == [0, 0]


def test_throughput_curve_model():
    curves = [[CapacityCurve.from_samples([[0, 0], [0.5, 8], [1, 21]]), CapacityCurve.linear(35)]]
    model = CapacityModel(("m1",), ("a", "b"), curves)
    assert not model.linear_only
    assert evaluate_throughput([[0.25, 0.75]], model).tolist() == [4.0, 26.25]


def test_curve_reproduces_samples():
    c = CapacityCurve.from_samples([[0, 0], [0.2, 1], [0.7, 9], [1, 10]])
    for f, cap in c.samples:
        assert c(f) == cap


def test_curve_clamps_outside_unit_interval():
    c = CapacityCurve.linear(7)
    assert c(1.5) == 7
    assert c(-0.5) == 0


@pytest.mark.parametrize("samples", [
    [[0, 0], [0.5, 8], [0.4, 9], [1, 21]],
    [[0, 0], [0.5, 8], [1, 5]],
    [[0, 1], [1, 5]],
    [[0, 0], [0.9, 5]],
    [[0, 0], [1, -1]],
])
def test_curve_rejects_invariant_violations(samples):
    with pytest.raises(ValueError):
        CapacityCurve.from_samples(samples)


def test_utility_cobb_douglas_log_form():
    assert evaluate_utility([4, 9], CobbDouglas((0.5, 0.5))) == pytest.approx(math.log(6), abs=1e-15)


def test_utility_linear_total():
    assert evaluate_utility([21, 30], Linear((1, 1))) == 51


def test_utility_inada_boundary():
    assert evaluate_utility([0, 5], CobbDouglas((0.5, 0.5))) == -math.inf


def test_shadow_prices_at_optimum():
    p = shadow_prices([19.5, 32.5], CobbDouglas((0.5, 0.5)))
    np.testing.assert_allclose(p, [1 / 39, 1 / 65], rtol=1e-15)
    assert p[0] == pytest.approx(0.025641025641)
    assert p[1] == pytest.approx(0.0153846153846)


def test_shadow_prices_trivial():
    assert shadow_prices([1, 1], CobbDouglas((0.5, 0.5))).tolist() == [0.5, 0.5]
    assert shadow_prices([1, 3], CobbDouglas((0.25, 0.75))).tolist() == [0.25, 0.25]


def test_shadow_prices_undefined_at_zero():
    with pytest.raises(UndefinedPriceError):
        shadow_prices([0, 3], CobbDouglas((0.5, 0.5)))


def test_cobb_douglas_weights_validated():
    with pytest.raises(ValueError):
        CobbDouglas((0.5, 0.6))
    with pytest.raises(ValueError):
        CobbDouglas((1.0, 0.0))
    assert CobbDouglas.normalized([1, 3]).weights == (0.25, 0.75)


def test_linear_requirements_length():
    with pytest.raises(ValueError):
        Linear((1, 1), (1,))


def test_model_names_unique():
    with pytest.raises(ValueError):
        CapacityModel.from_matrix([[1, 2], [3, 4]], machines=["a", "a"])


def test_model_ids_are_contiguous(illustration):
    assert [m.index for m in illustration.machine_ids] == [0, 1]
    assert [v.name for v in illustration.vnf_ids] == ["vnf1", "vnf2"]
