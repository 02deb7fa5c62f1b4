import numpy as np
import pytest
from hypothesis import settings, strategies as st

from schreierstats.schreier import from_permutations

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def perm_lists(draw, max_n=7, max_m=2, min_n=1):
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(1, max_m))
    return [draw(st.permutations(range(n))) for _ in range(m)]


@st.composite
def graphs(draw, max_n=7, max_m=2, min_n=1):
    perms = draw(perm_lists(max_n, max_m, min_n))
    return from_permutations(len(perms[0]), perms)


def random_perms(rng: np.random.Generator, n: int, m: int) -> list[list[int]]:
    return [rng.permutation(n).tolist() for _ in range(m)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance tests append their PASS/FAIL lines here; printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
