import math

import pytest

from kerrjpa import DeviceParams, PumpDrive, critical_pump, validate

# reference device: omega0 = 1e11, K = -9.99e-5 omega0, gamma = gamma1 = 0.0032 omega0
P0 = DeviceParams(omega0=1e11, kerr=-9.99e6, gamma1=3.2e8)


def p0_model(fraction=0.5, y=0.0, params=P0):
    b = fraction * math.sqrt(critical_pump(params))
    return validate(params, PumpDrive(params.omega0 * (1.0 - y), b))


@pytest.fixture
def p0():
    return P0


# filled by test_acceptance, one (number, title, passed, detail) per criterion
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number}. {title}: {detail}")
