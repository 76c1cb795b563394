import numpy as np
import pytest

from holomon import LogarithmicSystem, Path, RationalMatrixForm

BASE = -0.6 - 0.5j
POLES = (0.0, 1.0, 0.5 + 1.0j)

E = np.array([[0, 1], [0, 0]], dtype=complex)
F = np.array([[0, 0], [1, 0]], dtype=complex)
H = np.array([[1, 0], [0, -1]], dtype=complex)


def three_pole_system(seed=5):
    return LogarithmicSystem.random(POLES, genus=2, rng=seed).form


def keyholes(poles=POLES, base=BASE, radius=0.3):
    return [Path.keyhole(base, p, radius) for p in poles]


def random_sl2(rng, scale=0.5):
    g = np.eye(2) + scale * (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    return g / np.sqrt(np.linalg.det(g))


def random_scalar_form(rng, npoles=2, scale=0.3):
    poles = [complex(*rng.uniform(-0.5, 0.5, 2)) + 2.5 * np.exp(2j * np.pi * k / npoles) for k in range(npoles)]
    res = scale * (rng.standard_normal(npoles) + 1j * rng.standard_normal(npoles))
    poly = scale * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
    return RationalMatrixForm.scalar(poles, res, poly)


@pytest.fixture
def rng():
    return np.random.default_rng(20201027)


@pytest.fixture(scope="session")
def system3():
    return three_pole_system()


@pytest.fixture(scope="session")
def loops3():
    return keyholes()


# one line per acceptance criterion, printed after the run even when output is captured
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
