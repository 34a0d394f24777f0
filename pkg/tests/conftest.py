import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from hpcause import rock_throwing  # noqa: E402
from hpcause.bench import random_model  # noqa: E402
from hpcause.expr import FALSE, TRUE, Not, Var, conj, disj, parse_expr  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ROCK_CONTEXT = {"ST_exo": True, "BT_exo": True}


@pytest.fixture
def rock():
    return rock_throwing()


@pytest.fixture
def ctx11():
    return dict(ROCK_CONTEXT)


@pytest.fixture
def bs():
    return parse_expr("BS")


@st.composite
def small_models(draw, max_endogenous: int = 7):
    """Seeded random models plus a context, drawn through hypothesis."""
    seed = draw(st.integers(0, 2**32))
    n = draw(st.integers(2, max_endogenous))
    k = draw(st.integers(1, 3))
    model = random_model(seed, n, k)
    ctx = {u: draw(st.booleans()) for u in model.exogenous}
    return model, ctx


NAMES = ["A", "B", "C", "D"]


def core_exprs(max_leaves=12):
    leaves = st.sampled_from([Var(n) for n in NAMES] + [TRUE, FALSE])

    def extend(children):
        return st.one_of(
            children.map(Not),
            st.lists(children, min_size=2, max_size=3).map(conj),
            st.lists(children, min_size=2, max_size=3).map(disj),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@st.composite
def small_queries(draw, max_endogenous: int = 7, max_cause: int = 3):
    """A random model plus one checking query whose effect and cause hold in the actual world."""
    from reference import random_queries

    model, _ = draw(small_models(max_endogenous))
    ctx, effect, cause = random_queries(model, draw(st.integers(0, 2**32)), 1, max_cause)[0]
    return model, ctx, effect, cause
