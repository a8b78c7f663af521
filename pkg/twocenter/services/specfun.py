"""
Confluent hypergeometric kernels for the etalon solutions.

Only direct Taylor/Frobenius summation is used. Every kernel has a ``*_log``
variant returning ``(sign, log|value|)`` so that composed functions such as
``exp(-x/2) x^(mu+1/2) M(a, b, x)`` stay finite at arguments of several hundred.
"""

import math
import logging
from typing import Optional, Tuple

from twocenter.errors import DomainEdge, NoConvergence, PoleInB, SingularPoint
from twocenter.models import SeriesControl

logger = logging.getLogger(__name__)


def _is_nonpositive_integer(v: float) -> bool:
    return v <= 0 and v == int(v)


def _series_log(a: float, b: float, x: float, ctl: SeriesControl) -> Tuple[float, float]:
    term = 1.0
    total = 1.0
    log_shift = 0.0
    k = 0
    while True:
        term *= (a + k) * x / ((b + k) * (k + 1))
        total += term
        k += 1

        if term == 0.0:
            # a is a non-positive integer: the series terminated
            break

        if abs(total) > ctl.overflow_guard or abs(term) > ctl.overflow_guard:
            scale = max(abs(total), abs(term))
            total /= scale
            term /= scale
            log_shift += math.log(scale)

        ratio = abs((a + k) * x / ((b + k) * (k + 1)))
        if abs(term) <= ctl.rel_tol * abs(total) and ratio < 1.0:
            break
        if k >= ctl.max_terms:
            raise NoConvergence(
                f"M({a}, {b}, {x}) did not converge in {ctl.max_terms} terms"
            )

    if total == 0.0:
        return 0.0, -math.inf
    return math.copysign(1.0, total), math.log(abs(total)) + log_shift


def kummer_log(
    a: float, b: float, x: float, ctl: Optional[SeriesControl] = None
) -> Tuple[float, float]:
    """(sign, log|M(a, b, x)|)."""
    ctl = ctl or SeriesControl()
    if _is_nonpositive_integer(b):
        raise PoleInB(f"M(a, b, x) has a pole at b={b}")
    if not math.isfinite(x):
        raise DomainEdge(f"M(a, b, x) needs a finite argument, got {x}")
    if x == 0.0:
        return 1.0, 0.0

    if x < 0.0 and not _is_nonpositive_integer(a):
        # Kummer transformation M(a,b,x) = e^x M(b-a,b,-x) keeps terms positive
        sign, log_abs = _series_log(b - a, b, -x, ctl)
        return sign, log_abs + x
    return _series_log(a, b, x, ctl)


def kummer_m(a: float, b: float, x: float, ctl: Optional[SeriesControl] = None) -> float:
    """Kummer's function M(a, b, x) = sum (a)_k x^k / ((b)_k k!)."""
    sign, log_abs = kummer_log(a, b, x, ctl)
    if sign == 0.0:
        return 0.0
    try:
        return sign * math.exp(log_abs)
    except OverflowError:
        logger.warning(f"M({a}, {b}, {x}) overflows double precision")
        return sign * math.inf


def whittaker_log(
    kappa: float, mu: float, x: float, ctl: Optional[SeriesControl] = None
) -> Tuple[float, float]:
    if x < 0.0:
        raise DomainEdge(f"M_kappa,mu(x) is only defined here for x >= 0, got {x}")
    if x == 0.0:
        if mu > -0.5:
            return 0.0, -math.inf
        if mu == -0.5:
            return 1.0, 0.0
        raise SingularPoint(f"M_kappa,mu(0) diverges for mu={mu}")

    sign, log_abs = kummer_log(mu - kappa + 0.5, 2.0 * mu + 1.0, x, ctl)
    if sign == 0.0:
        return 0.0, -math.inf
    return sign, log_abs + (mu + 0.5) * math.log(x) - 0.5 * x


def whittaker_m(kappa: float, mu: float, x: float, ctl: Optional[SeriesControl] = None) -> float:
    """Whittaker's M_{kappa,mu}(x) = e^{-x/2} x^{mu+1/2} M(mu-kappa+1/2, 2mu+1, x)."""
    sign, log_abs = whittaker_log(kappa, mu, x, ctl)
    if sign == 0.0:
        return 0.0
    return sign * math.exp(log_abs)


def etalon_c(m: int) -> float:
    """Radial etalon exponent c = (1 + sqrt(m^2 + 3)) / 2, as printed."""
    return 0.5 * (1.0 + math.sqrt(m * m + 3.0))


def etalon_s(n: int, m: int) -> float:
    return 4 * n + math.sqrt(m * m + 3.0) + 2.0


def etalon_kummer_a(n: int, m: int, literal: bool = True) -> float:
    """First Kummer argument of the radial etalon.

    The printed (s - 2c - 1)/4 equals +n; the polynomial (decaying) solution
    needs -n.
    """
    a = (etalon_s(n, m) - 2.0 * etalon_c(m) - 1.0) / 4.0
    return a if literal else -a


def etalon_eigenvalue(n: int, m: int, literal: bool = True) -> float:
    """s' such that W solves W'' + [s' - Y^2 - c(c-1)/Y^2] W = 0 in Y = h*y."""
    return 2.0 * etalon_c(m) + 1.0 - 4.0 * etalon_kummer_a(n, m, literal)


def radial_etalon_log(
    n: int, m: int, y_sq_scaled: float, literal: bool = True, ctl: Optional[SeriesControl] = None
) -> Tuple[float, float]:
    if y_sq_scaled < 0.0:
        raise DomainEdge(f"radial etalon needs h^2 y^2 >= 0, got {y_sq_scaled}")
    c = etalon_c(m)
    if y_sq_scaled == 0.0:
        return 0.0, -math.inf

    sign, log_abs = kummer_log(etalon_kummer_a(n, m, literal), c + 0.5, y_sq_scaled, ctl)
    if sign == 0.0:
        return 0.0, -math.inf
    return sign, log_abs + 0.5 * c * math.log(y_sq_scaled) - 0.5 * y_sq_scaled


def radial_etalon_w(
    n: int, m: int, y_sq_scaled: float, literal: bool = True, ctl: Optional[SeriesControl] = None
) -> float:
    """W = Y^c e^{-Y^2/2} M(a, c + 1/2, Y^2) with Y^2 = h^2 y^2."""
    sign, log_abs = radial_etalon_log(n, m, y_sq_scaled, literal, ctl)
    if sign == 0.0:
        return 0.0
    return sign * math.exp(log_abs)
