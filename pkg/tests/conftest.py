import numpy as np
import pytest

import spinchaos
from spinchaos import SystemParams


def pytest_configure(config):
    spinchaos.set_threads()


@pytest.fixture(scope="session")
def params():
    return SystemParams()


@pytest.fixture(scope="session")
def xR():
    return spinchaos.named_state("xR")


@pytest.fixture(scope="session")
def xC():
    return spinchaos.named_state("xC")


def assert_states_close(a, b, tol=1e-9):
    """Equality up to a global phase."""
    za = np.asarray(a.amplitudes if hasattr(a, "amplitudes") else a)
    zb = np.asarray(b.amplitudes if hasattr(b, "amplitudes") else b)
    overlap = np.vdot(za, zb)
    assert abs(abs(overlap) - 1.0) < tol, f"|<a|b>| = {abs(overlap)}"
