from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dopoly import MomentFunctional, PointSet

settings.register_profile("default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

EIGHT_POINTS = [(-1, -1), (0, -1), (1, -1), (-1, 0), (0, 0), (1, 0), (-1, 1), (-1, 2)]
FOUR_POINTS = [(0, 0), (0, 1), (1, 2), (2, 3)]


@pytest.fixture
def eight():
    return PointSet.of(EIGHT_POINTS)


@pytest.fixture
def eight_uniform(eight):
    return MomentFunctional.uniform(eight)


@pytest.fixture
def four():
    return PointSet.of(FOUR_POINTS)


small_rationals = st.fractions(min_value=-4, max_value=4, max_denominator=5)
positive_rationals = st.fractions(min_value=Fraction(1, 7), max_value=5, max_denominator=7)


@st.composite
def point_sets(draw, dim=2, min_size=1, max_size=7, span=3):
    coords = st.integers(min_value=-span, max_value=span)
    pts = draw(st.lists(st.tuples(*[coords] * dim), min_size=min_size, max_size=max_size, unique=True))
    return PointSet(dim, tuple(pts))


@st.composite
def rational_matrices(draw, rows=None, cols=None, max_dim=5):
    r = rows or draw(st.integers(1, max_dim))
    c = cols or draw(st.integers(1, max_dim))
    from dopoly.exactlinalg import ratmatrix

    return ratmatrix([[draw(small_rationals) for _ in range(c)] for _ in range(r)], (r, c))


@st.composite
def low_rank_matrices(draw, max_dim=5):
    """Products of thin factors so rank deficiency is common."""
    from dopoly.exactlinalg import ratmatrix

    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    k = draw(st.integers(0, min(r, c)))
    ints = st.integers(-3, 3)
    U = ratmatrix([[draw(ints) for _ in range(k)] for _ in range(r)], (r, k))
    W = ratmatrix([[draw(ints) for _ in range(c)] for _ in range(k)], (k, c))
    return U @ W if k else ratmatrix([[0] * c for _ in range(r)], (r, c))
