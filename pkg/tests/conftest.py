import numpy as np
import pytest

from etfgap.constructions import harmonic_etf, singer_difference_set

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def singer_frames():
    return {q: harmonic_etf(singer_difference_set(q)) for q in (2, 3, 4, 5)}


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_projection(rng, size, rank):
    z = rng.normal(size=(size, rank)) + 1j * rng.normal(size=(size, rank))
    q, _ = np.linalg.qr(z)
    return q @ q.conj().T


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))
    elif report.when == "setup" and report.failed and "test_acceptance.py" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], "error"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{mark}] {name}")
