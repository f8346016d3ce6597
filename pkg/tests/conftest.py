import numpy as np
import pytest

from ruo.io import builtin

_ACCEPTANCE = []


def record_acceptance(label, ok, detail=""):
    _ACCEPTANCE.append((label, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def cnot():
    return builtin("cnot_pair").to_ensemble()


@pytest.fixture(params=["cnot_pair", "identity", "single_unitary_pauli_x", "diag_irrational_phase"])
def builtin_ensemble(request):
    return builtin(request.param).to_ensemble()
