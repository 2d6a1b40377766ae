import numpy as np
import pytest

from mdf import build_standard_form, tracial_state


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sf2():
    """Two-level Gibbs-like state with distinct eigenvalues."""
    return build_standard_form(np.diag([0.75, 0.25]))


@pytest.fixture
def sf3():
    """Three-level faithful state, non-diagonal basis."""
    rng = np.random.default_rng(7)
    g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    rho = g @ g.conj().T + 0.3 * np.eye(3)
    rho /= np.trace(rho).real
    return build_standard_form(rho)


@pytest.fixture
def sf4():
    """Four-level state with a degenerate eigenvalue pair."""
    return build_standard_form(np.diag([0.4, 0.25, 0.25, 0.1]))


@pytest.fixture
def tr2():
    return tracial_state(2)


@pytest.fixture
def tr3():
    return tracial_state(3)
