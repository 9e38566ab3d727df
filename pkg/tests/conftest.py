from pathlib import Path

import numpy as np
import pytest

from vnfca.kernels import HAS_NUMBA
from vnfca.model import CapacityModel, CobbDouglas

FIXTURES = Path(__file__).parent / "fixtures"
DATA = Path(__file__).parents[1] / "src" / "vnfca" / "data"

BACKENDS = ["numpy"] + (["numba"] if HAS_NUMBA else [])

# capacities of the two-machine illustration, kpps
B_ILLUSTRATION = [[21.0, 35.0], [6.0, 30.0]]


@pytest.fixture
def illustration():
    return CapacityModel.from_matrix(B_ILLUSTRATION)


@pytest.fixture
def half():
    return CobbDouglas((0.5, 0.5))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def random_instances(seed, count, shape, low=1, high=10):
    rng = np.random.default_rng(seed)
    return [rng.integers(low, high + 1, size=shape).astype(float) for _ in range(count)]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        ok, line = mod.RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {key} {line}")
