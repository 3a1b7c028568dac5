import sys

import numpy as np
import pytest

import longmem as lm


@pytest.fixture(scope="session")
def db2():
    return lm.make_wavelet("db2")


@pytest.fixture(scope="session")
def db4():
    return lm.make_wavelet("db4")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def deterministic_pyramid(spec, n, d0, sigma2=1.0, L=1):
    """Pyramid with ``W_{j,k}^2 = sigma2 2^(2 d0 j)`` at the counts of a length-``n`` series."""
    counts = [lm.num_coeffs(n, spec.T, j) for j in range(lm.max_scale(n, spec.T) + 1)]
    coeffs = [np.zeros(counts[0])]
    for j in range(1, len(counts)):
        coeffs.append(np.full(counts[j], np.sqrt(sigma2) * 2.0 ** (d0 * j)))
    return lm.Pyramid.from_arrays(spec, n, coeffs)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.RESULTS:
        terminalreporter.write_line(line)
