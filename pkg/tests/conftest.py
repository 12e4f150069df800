import math

import numpy as np
import pytest

from spacetime_states.qstate import StateVector

SQ2 = 1 / math.sqrt(2)


def ket(*bits):
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int("".join(map(str, bits)), 2)] = 1.0
    return v


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def singlet():
    return StateVector((ket(0, 1) - ket(1, 0)) * SQ2)


@pytest.fixture
def phi_plus():
    return StateVector((ket(1, 1) + ket(0, 0)) * SQ2)


def random_amplitudes(rng):
    """Random normalized (alpha, beta) with generic phases."""
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    z /= np.linalg.norm(z)
    return complex(z[0]), complex(z[1])


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[number] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
