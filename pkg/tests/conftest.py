from functools import lru_cache

import numpy as np
import pytest

from eitent import IntegratorConfig, initial_state, integrate, cooling_params
from eitent.lindblad import default_n_max

ACCEPTANCE_LINES = []


def record(criterion: str, passed: bool, detail: str):
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@lru_cache(maxsize=None)
def cooling_run(gamma_mhz: float, n_in: int, t_end: float, interval: float = 1.0,
                g1_over_g2: float = 10.0):
    """Constant-lam run from |phi_2, n_in> with the cooling parameters; cached per session."""
    p = cooling_params(gamma_mhz, g1_over_g2, n_max=default_n_max(n_in))
    cfg = IntegratorConfig.for_interval(p, interval)
    return p, integrate(initial_state(p, n_in), t_end, p, config=cfg)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density(rng, dim, rank=None):
    rank = rank or dim
    x = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
