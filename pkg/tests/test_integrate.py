import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as sp_integrate

from deltaplates.errors import InvalidInput, QuadratureNotConverged
from deltaplates.integrate import (
    GAUSS,
    KRONROD,
    NODES,
    QuadratureSpec,
    Substitution,
    half_line_map,
    integrate_semi_infinite,
    integrate_unit_interval,
    integrate_unit_square,
)

SUBS = list(Substitution)


def test_rule_integrates_polynomials():
    # Kronrod part exact to degree 22, embedded Gauss to degree 13
    for deg in range(0, 23, 3):
        exact = (1 - (-1) ** (deg + 1)) / (deg + 1)
        assert KRONROD @ NODES ** deg == pytest.approx(exact, abs=1e-14)
        if deg <= 13:
            assert GAUSS @ NODES ** deg == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("sub", SUBS)
@pytest.mark.parametrize(
    "f, exact",
    [
        (lambda x: np.exp(-x), 1.0),
        (lambda x: x ** 2 * np.log1p(-np.exp(-2 * x)), -math.pi ** 4 / 360),
        (lambda x: x ** 3 * np.exp(-2 * x) / -np.expm1(-2 * x), math.pi ** 4 / 240),
    ],
)
def test_semi_infinite_known_values(sub, f, exact):
    res = integrate_semi_infinite(f, spec=QuadratureSpec(substitution=sub))
    assert res.value == pytest.approx(exact, rel=1e-9)
    assert res.error >= 0.0


@given(rate=st.floats(0.2, 5.0), lower=st.floats(-2.0, 2.0), power=st.integers(0, 4))
def test_against_scipy(rate, lower, power):
    def f(x):
        return (x - lower) ** power * np.exp(-rate * (x - lower)) / (1 + (x - lower))

    want, _ = sp_integrate.quad(f, lower, np.inf, epsabs=0, epsrel=1e-12, limit=500)
    got = integrate_semi_infinite(f, lower, QuadratureSpec(rel_tol=1e-10), rate=rate)
    assert got.value == pytest.approx(want, rel=1e-9, abs=1e-14)


def test_error_estimate_is_conservative():
    f = lambda x: x ** 2 * np.log1p(-np.exp(-2 * x))
    for tol in (1e-4, 1e-6, 1e-8):
        res = integrate_semi_infinite(f, spec=QuadratureSpec(rel_tol=tol))
        assert abs(res.value + math.pi ** 4 / 360) <= max(res.error, 1e-15)


def test_endpoints_never_evaluated():
    seen = []

    def f(v):
        seen.append(v.copy())
        return 1.0 / np.sqrt(v * (1 - v))

    with pytest.raises(QuadratureNotConverged):
        integrate_unit_interval(f, rel_tol=1e-12, max_panels=200)
    v = np.concatenate(seen)
    assert v.min() > 0.0 and v.max() < 1.0


def test_non_convergence_carries_estimate():
    with pytest.raises(QuadratureNotConverged) as info:
        integrate_unit_interval(lambda v: np.sin(1 / v), rel_tol=1e-12, max_panels=50)
    assert math.isfinite(info.value.value)
    assert info.value.error > 0
    assert info.value.evaluations > 0


def test_reference_scale_for_cancelling_integrand():
    # integrand identically ~0 by cancellation; the reference keeps the tolerance meaningful
    def f(v):
        a = np.exp(-v)
        return a - a[::-1][::-1], 2 * a

    res = integrate_unit_interval(f, rel_tol=1e-12)
    assert res.value == 0.0


@pytest.mark.parametrize(
    "f",
    [
        lambda x, s: np.exp(-x * s) * np.cos(3 * x),
        lambda x, s: x ** 2 * s / (1 + x * s),
        lambda x, s: np.log1p(x * x * s),
    ],
)
def test_unit_square_against_scipy(f):
    want, _ = sp_integrate.dblquad(lambda s, x: f(x, s), 0, 1, 0, 1, epsabs=1e-14, epsrel=1e-13)
    got = integrate_unit_square(f, rel_tol=1e-11)
    assert got.value == pytest.approx(want, rel=1e-10)


@pytest.mark.parametrize("sub", SUBS)
def test_half_line_map(sub):
    transform = half_line_map(sub, 1.5, 2.0)
    v = np.array([1e-9, 0.3, 0.999])
    x, jac = transform(v)
    assert np.all(np.diff(x) > 0) and x[0] == pytest.approx(1.5, abs=1e-8)
    h = 1e-7
    fd = (transform(v + h)[0] - transform(v - h)[0]) / (2 * h)
    np.testing.assert_allclose(jac, fd, rtol=1e-5)


class TestSpec:
    def test_defaults(self):
        spec = QuadratureSpec()
        assert spec.tolerance(False) == 1e-9
        assert spec.tolerance(True) == 1e-7
        assert QuadratureSpec(rel_tol=1e-5).tolerance(True) == 1e-5

    @pytest.mark.parametrize("kwargs", [{"rel_tol": 0.0}, {"rel_tol": -1.0}, {"abs_tol": -1.0}, {"max_subdivisions": 0}])
    def test_invalid(self, kwargs):
        with pytest.raises(InvalidInput):
            QuadratureSpec(**kwargs)
