import math

import numpy as np
import pytest
from hypothesis import strategies as st

from symreach import sp2

finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
coords = st.tuples(finite, finite, finite)


def algebra(x, y, z):
    return sp2.from_basis_coords(x, y, z)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


COSH1, SINH1 = math.cosh(1.0), math.sinh(1.0)


# acceptance lines, filled by tests/test_acceptance.py and echoed in the terminal summary
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
