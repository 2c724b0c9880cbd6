import numpy as np
import pytest
from hypothesis import settings, strategies as st

from koenigslab.series import DirichletSeries
from koenigslab.symbols import Symbol

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

small = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, small, small)


@st.composite
def series(draw, N=24, density=6):
    terms = draw(st.dictionaries(st.integers(1, N), cplx, max_size=density))
    return DirichletSeries.from_terms(N, terms)


@st.composite
def symbols(draw, N=32, c0=None, max_terms=3):
    """Symbols with Re c1 above the tail sum, so they map the half-plane into itself."""
    c0 = draw(st.sampled_from([1, 2, 3])) if c0 is None else c0
    idx = draw(st.lists(st.integers(2, 16), max_size=max_terms, unique=True))
    terms = {k: 0.3 * draw(cplx) for k in idx}
    re = sum(abs(v) for v in terms.values()) + draw(st.floats(0.3, 2.0))
    terms[1] = complex(re, draw(small))
    return Symbol.from_terms(c0, terms, N)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
