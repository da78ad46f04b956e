import math
from pathlib import Path

import pytest

from goldbach_explicit.arith import sieve_lambda
from goldbach_explicit.goldbach import psi2, truncation
from goldbach_explicit.zeros import zeta_zeros

DATA = Path(__file__).parent / "data"

# one "CRITERION k: PASS|FAIL ..." line per acceptance criterion, echoed in the summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def lam_small():
    """Lambda up to T(10^4), enough for every smoothed sum at N <= 10^4."""
    return sieve_lambda(truncation(1e4))


@pytest.fixture(scope="session")
def psi2_small(lam_small):
    return psi2(lam_small, truncation(1e4), "fft")


@pytest.fixture(scope="session")
def zeta100():
    return zeta_zeros(100.0)


def trial_division_lambda(n: int) -> float:
    """Independent oracle: log p if n = p^k, else 0."""
    if n < 2:
        return 0.0
    p = next(d for d in range(2, math.isqrt(n) + 2) if n % d == 0 or d > math.isqrt(n))
    if n % p:
        return math.log(n)
    m = n
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


@pytest.fixture(scope="session")
def lam_big():
    """Lambda up to T(10^5) (about 8.3 million entries)."""
    return sieve_lambda(truncation(1e5))


@pytest.fixture(scope="session")
def psi2_big(lam_big):
    return psi2(lam_big, truncation(1e5), "fft")


@pytest.fixture(scope="session")
def zeta10k():
    return zeta_zeros(1e4)
