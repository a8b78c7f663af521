import math

import numpy as np
import pytest

from tools import extended_precision as ep
from twocenter.errors import DomainEdge, NoConvergence, PoleInB
from twocenter.models import SeriesControl
from twocenter.services import specfun


def test_kummer_equal_parameters_is_exponential_at_one():
    assert specfun.kummer_m(1.0, 1.0, 1.0) == pytest.approx(2.718281828459045, rel=1e-15)


@pytest.mark.parametrize("a,b", [(0.3, 1.7), (-2.5, 0.5), (4.0, 2.0)])
def test_kummer_at_zero(a, b):
    assert specfun.kummer_m(a, b, 0.0) == 1.0


@pytest.mark.parametrize("x", np.linspace(0.0, 30.0, 31))
def test_kummer_equal_parameters_matches_exp(x):
    for a in (0.5, 1.0, 3.25):
        assert specfun.kummer_m(a, a, x) == pytest.approx(math.exp(x), rel=1e-12)


@pytest.mark.parametrize("a,b,x", [(0.25, 1.5, 3.7), (1.3, 2.2, 0.4), (-0.7, 1.1, 12.0), (0.25, 1.5, 25.0)])
def test_kummer_derivative_identity(a, b, x):
    step = 1e-5 * max(1.0, x)
    numeric = (specfun.kummer_m(a, b, x + step) - specfun.kummer_m(a, b, x - step)) / (2 * step)
    exact = a / b * specfun.kummer_m(a + 1, b + 1, x)
    assert numeric == pytest.approx(exact, rel=1e-7)


def test_kummer_against_extended_precision_series():
    assert specfun.kummer_m(0.25, 1.5, 3.7) == pytest.approx(ep.kummer_series(0.25, 1.5, 3.7), rel=1e-13)


@pytest.mark.parametrize("x", [-0.5, -3.7, -20.0])
def test_kummer_negative_argument(x):
    assert specfun.kummer_m(0.25, 1.5, x) == pytest.approx(ep.kummer(0.25, 1.5, x), rel=1e-12)


def test_kummer_terminates_for_negative_integer_a():
    b, x = 1.5, 2.3
    expected = 1.0 - 2.0 * x / b + x * x / (b * (b + 1.0))
    assert specfun.kummer_m(-2.0, b, x) == pytest.approx(expected, rel=1e-14)
    assert specfun.kummer_m(-2.0, b, -x) == pytest.approx(1.0 + 2.0 * x / b + x * x / (b * (b + 1.0)), rel=1e-14)


@pytest.mark.parametrize("b", [0.0, -1.0, -4.0])
def test_kummer_pole_in_b(b):
    with pytest.raises(PoleInB):
        specfun.kummer_m(0.5, b, 1.0)


def test_kummer_non_finite_argument():
    with pytest.raises(DomainEdge):
        specfun.kummer_m(0.5, 1.5, math.inf)


def test_kummer_series_budget():
    with pytest.raises(NoConvergence):
        specfun.kummer_m(0.5, 1.5, 40.0, SeriesControl(max_terms=5))


def test_kummer_log_stays_finite_past_overflow():
    sign, log_abs = specfun.kummer_log(1.0, 1.0, 800.0)
    assert sign == 1.0
    assert log_abs == pytest.approx(800.0, rel=1e-12)
    assert specfun.kummer_m(1.0, 1.0, 800.0) == math.inf


def test_whittaker_closed_form():
    assert specfun.whittaker_m(0.0, 0.5, 2.0) == pytest.approx(2.3504023872876028, rel=1e-12)
    for x in (0.1, 1.0, 7.5, 20.0):
        assert specfun.whittaker_m(0.0, 0.5, x) == pytest.approx(2.0 * math.sinh(x / 2.0), rel=1e-12)


@pytest.mark.parametrize("mu", [-0.25, 0.0, 0.5, 2.0])
def test_whittaker_vanishes_at_origin(mu):
    assert specfun.whittaker_m(0.7, mu, 0.0) == 0.0


def test_whittaker_against_mpmath():
    assert specfun.whittaker_m(1.0, 1.0, 1.5) == pytest.approx(ep.whittaker(1.0, 1.0, 1.5), rel=1e-12)
    assert specfun.whittaker_m(2.5, 0.5, 9.0) == pytest.approx(ep.whittaker(2.5, 0.5, 9.0), rel=1e-11)


def test_whittaker_negative_argument():
    with pytest.raises(DomainEdge):
        specfun.whittaker_m(0.5, 0.5, -1.0)


def test_etalon_first_argument_sign():
    assert specfun.etalon_kummer_a(1, 1, literal=True) == pytest.approx(1.0, abs=1e-14)
    assert specfun.etalon_kummer_a(1, 1, literal=False) == pytest.approx(-1.0, abs=1e-14)
    assert specfun.etalon_kummer_a(0, 0) == pytest.approx(0.0, abs=1e-14)


def test_radial_etalon_against_extended_precision():
    c = specfun.etalon_c(1)
    value = specfun.radial_etalon_w(1, 1, 0.8, literal=True)
    assert value == pytest.approx(ep.radial_etalon(1.0, c, 0.8), rel=1e-12)
    corrected = specfun.radial_etalon_w(1, 1, 0.8, literal=False)
    assert corrected == pytest.approx(ep.radial_etalon(-1.0, c, 0.8), rel=1e-12)


@pytest.mark.parametrize("literal", [True, False])
@pytest.mark.parametrize("n,m", [(0, 0), (1, 0), (1, 1), (2, 3)])
def test_radial_etalon_solves_its_equation(n, m, literal):
    c = specfun.etalon_c(m)
    s_prime = specfun.etalon_eigenvalue(n, m, literal)
    step = 1e-4
    for Y in (0.7, 1.3, 2.1):
        w = lambda y: specfun.radial_etalon_w(n, m, y * y, literal)
        second = (w(Y + step) - 2 * w(Y) + w(Y - step)) / step ** 2
        residual = second + (s_prime - Y * Y - c * (c - 1.0) / (Y * Y)) * w(Y)
        assert abs(residual) <= 1e-5 * max(1.0, abs(w(Y)), abs(second))


def test_radial_etalon_vanishes_at_origin():
    assert specfun.radial_etalon_w(0, 0, 0.0) == 0.0
    assert abs(specfun.radial_etalon_w(0, 0, 1e-10)) < 1e-6


def test_radial_etalon_rejects_negative_argument():
    with pytest.raises(DomainEdge):
        specfun.radial_etalon_w(0, 0, -0.1)
