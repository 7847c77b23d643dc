from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hlvar.corpus import random_corpus
from hlvar.stepfn import make_step

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def rationals(span: int = 6, max_den: int = 16, positive: bool = False):
    lo = 1 if positive else -span * max_den
    return st.builds(
        lambda n, d: Fraction(n, d),
        st.integers(lo, span * max_den),
        st.integers(1, max_den),
    )


@st.composite
def step_functions(draw, max_pieces: int = 6, signed: bool = True, max_den: int = 8):
    bps = draw(st.lists(rationals(4, max_den), max_size=max_pieces - 1, unique=True))
    bps.sort()
    lo = -4 * max_den if signed else 0
    vals = draw(
        st.lists(
            st.builds(lambda n, d: Fraction(n, d), st.integers(lo, 4 * max_den), st.integers(1, max_den)),
            min_size=len(bps) + 1,
            max_size=len(bps) + 1,
        )
    )
    return make_step(bps, vals)


@pytest.fixture(scope="session")
def corpus():
    return random_corpus(1000)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
