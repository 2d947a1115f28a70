import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from partcache import QuadratureSpec, beta, beta_complement

ARGS = st.floats(min_value=0.05, max_value=4.0, allow_nan=False)


def test_beta_closed_forms():
    assert beta(0.5, 0.5) == pytest.approx(math.pi, abs=1e-12)
    assert beta(2.0 / 3.0, 1.0 / 3.0) == pytest.approx(
        2.0 * math.pi / math.sqrt(3.0), abs=1e-12
    )
    assert beta(1.0, 1.0) == pytest.approx(1.0, abs=1e-13)
    assert beta(2.0, 3.0) == pytest.approx(1.0 / 12.0, abs=1e-13)


@given(x=ARGS, y=ARGS)
def test_beta_symmetry(x, y):
    assert beta(x, y) == pytest.approx(beta(y, x), rel=1e-10)


@given(x=ARGS, y=ARGS)
def test_beta_recurrence(x, y):
    # B(x+1, y) = B(x, y) * x / (x + y)
    assert beta(x + 1.0, y) == pytest.approx(beta(x, y) * x / (x + y), rel=1e-9)


def test_complement_endpoints():
    assert beta_complement(0.5, 0.5, 1.0) == 0.0
    assert beta_complement(0.5, 0.5, 0.0) == pytest.approx(beta(0.5, 0.5), abs=1e-12)


def test_complement_closed_form():
    want = math.pi - 2.0 * math.asin(2.0**-0.25)
    assert beta_complement(0.5, 0.5, 2.0**-0.5) == pytest.approx(want, abs=1e-12)


@given(
    x=st.floats(min_value=0.1, max_value=0.95),
    y=st.floats(min_value=0.1, max_value=0.95),
    z=st.floats(min_value=0.01, max_value=0.95),
)
def test_complement_additivity(x, y, z):
    # the lower integral is evaluated by a separate quadrature with the
    # singular weight only at the left endpoint
    lower, _ = integrate.quad(
        lambda u: (1.0 - u) ** (y - 1.0),
        0.0,
        z,
        weight="alg",
        wvar=(x - 1.0, 0.0),
        epsabs=1e-13,
    )
    assert beta_complement(x, y, z) + lower == pytest.approx(beta(x, y), abs=1e-10)


@given(
    x=st.floats(min_value=0.1, max_value=0.9),
    y=st.floats(min_value=0.1, max_value=0.9),
    z1=st.floats(min_value=0.0, max_value=1.0),
    z2=st.floats(min_value=0.0, max_value=1.0),
)
def test_complement_monotone_in_cutoff(x, y, z1, z2):
    lo, hi = sorted((z1, z2))
    assert beta_complement(x, y, hi) <= beta_complement(x, y, lo) + 1e-12


def test_domain_errors():
    with pytest.raises(ValueError):
        beta(0.0, 1.0)
    with pytest.raises(ValueError):
        beta(1.0, -2.0)
    with pytest.raises(ValueError):
        beta_complement(0.5, 0.5, -0.1)
    with pytest.raises(ValueError):
        beta_complement(0.5, 0.5, 1.7)


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)


def test_unattainable_tolerance_is_reported():
    # machine precision cannot certify 1e-300, so the evaluation must
    # refuse rather than return a silently unqualified value
    spec = QuadratureSpec(abs_tol=1e-300)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # the backend flags the roundoff too
        with pytest.raises(ArithmeticError):
            beta(0.5, 0.5, spec)
