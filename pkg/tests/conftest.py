import numpy as np
import pytest

from risphase.phase import ChannelInstance

DATA = __import__("pathlib").Path(__file__).parent / "data"

# lines collected by tests/test_acceptance.py, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def rayleigh(rng, N, direct=True):
    h = (rng.standard_normal(N) + 1j * rng.standard_normal(N)) / np.sqrt(2)
    h0 = (rng.standard_normal() + 1j * rng.standard_normal()) / np.sqrt(2) if direct else 0j
    return ChannelInstance(h0, h)


def with_duplicates(rng, groups, K, direct=True):
    """Instance whose elements fall into groups sharing alpha mod 2*pi/K.

    ``groups`` lists group sizes; members of a group get the same base phase
    shifted by random multiples of the period and random amplitudes.
    """
    w = 2 * np.pi / K
    alpha, beta = [], []
    for size in groups:
        a = rng.uniform(0, 2 * np.pi)
        for _ in range(size):
            alpha.append(a + w * rng.integers(0, K))
            beta.append(rng.uniform(0.2, 1.5))
    h = np.array(beta) * np.exp(1j * np.array(alpha))
    perm = rng.permutation(len(h))
    h0 = complex(rng.uniform(0.2, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi))) if direct else 0j
    return ChannelInstance(h0, h[perm])


def rel_close(a, b, tol):
    return abs(a - b) <= tol * max(abs(a), abs(b), 1e-300)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
