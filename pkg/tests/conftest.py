import numpy as np
import pytest

from capa.scenario import Scenario


@pytest.fixture(scope="session")
def scenario():
    return Scenario()


@pytest.fixture(scope="session")
def grid(scenario):
    return scenario.grid()


@pytest.fixture(scope="session")
def draw(scenario, grid):
    """One default-scenario user drop (K = 8) with its discrete-array channels."""
    return scenario.realize(seed=1, trial_index=0, with_spda=True, grid=grid)


def random_hpd(rng, K, cond=100.0):
    """Random Hermitian positive definite matrix with a given condition number."""
    Q, _ = np.linalg.qr(rng.standard_normal((K, K)) + 1j * rng.standard_normal((K, K)))
    ev = np.geomspace(1.0, cond, K)
    M = (Q * ev) @ Q.conj().T
    return 0.5 * (M + M.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
