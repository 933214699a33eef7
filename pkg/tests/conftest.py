import numpy as np
import pytest

from qcnms import OscillatorParams, TimeGrid


@pytest.fixture
def fig1_params():
    return OscillatorParams.canonical(0.01, 1.0)


@pytest.fixture
def fig2_params():
    return OscillatorParams.canonical(1.0 / 900.0, 1.0)


@pytest.fixture
def fig2_grid():
    return TimeGrid.span(400.0, 0.02)


def at(tau):
    """Two-point grid whose first sample sits at ``tau``."""
    return TimeGrid(float(tau), 1.0, 2)


def first(series):
    return complex(np.asarray(series.values)[0])


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for key in sorted(results, key=int):
            terminalreporter.write_line(results[key])
