import math

import pytest

from dicke_reset import SystemParams, figure_protocols
from dicke_reset.kernels import BACKENDS

ACCEPTANCE_LINES = []


def two_level(beta, gamma0, omega, t):
    """Closed-form single qubit under a constant splitting, from p_e = 1/2.

    Solves dp_e/dt = gamma_up - gamma0 p_e; returns (p_e(t), heat released).
    """
    p_eq = 1.0 / (1.0 + math.exp(beta * omega))
    p_e = p_eq + (0.5 - p_eq) * math.exp(-gamma0 * t)
    return p_e, omega * (0.5 - p_e)


# beta = gamma0 = tau = omega = 1
EPS_BENCH, HEAT_BENCH = two_level(1.0, 1.0, 1.0, 1.0)
F_BENCH = HEAT_BENCH / (1 - 2 * EPS_BENCH) ** 2


@pytest.fixture
def unit_params():
    return SystemParams(1, 1.0, 1.0, 1.0)


@pytest.fixture(params=["quench", "linear", "exponential"])
def protocol_name(request):
    return request.param


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param


def fig_protocol(name, params):
    return figure_protocols(params)[name]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
