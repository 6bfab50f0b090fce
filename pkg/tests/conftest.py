import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from prsde.algebra import Poly, Q, Var

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

SMALL_VARS = tuple(Var.parse(n) for n in ("t", "x", "p", "q_x", "r_yy", "p_tz"))

coefficients = st.fractions(min_value=-10, max_value=10, max_denominator=6)


@st.composite
def polys(draw, variables=SMALL_VARS, max_terms=4, max_exp=2):
    """Sparse polynomials over a handful of base and jet variables."""
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        chosen = draw(st.lists(st.sampled_from(variables), max_size=3, unique=True))
        mono = tuple(sorted((v, draw(st.integers(1, max_exp))) for v in chosen))
        terms[mono] = Q(draw(coefficients))
    return Poly(terms)


@pytest.fixture
def rng():
    return random.Random(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.report_line(n))
