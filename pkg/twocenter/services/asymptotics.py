"""
Large-R etalon formulas: separation constants, transition-point maps,
asymptotic wavefunctions and the energy expansion in 1/R.

β and δ are undetermined constants of the expansions; they default to the
configured values (0 unless overridden).
"""

import math
import logging
from typing import Callable, Optional, Tuple

import numpy as np

from twocenter.config import settings
from twocenter.errors import (
    ConfigurationError,
    DegenerateTransition,
    DomainEdge,
    LogBranch,
    NonPositiveShiftedEnergy,
    NumericalError,
    ZeroCharge,
)
from twocenter.models import (
    AsymptoticEval,
    Eigensolution,
    EnergyExpansion,
    PhysicalConfig,
    QuantumNumbers,
    ScaledParams,
    WaveComparison,
)
from twocenter.services import specfun
from twocenter.services.ode_engine import count_nodes
from twocenter.services.params import scale_parameters
from twocenter.utils import helpers

logger = logging.getLogger(__name__)


def _beta(beta: Optional[float]) -> float:
    return settings.BETA if beta is None else beta


def _delta(delta: Optional[float]) -> float:
    return settings.DELTA if delta is None else delta


def _check_scaled(sp: ScaledParams):
    if not (sp.h > 0.0 and sp.gamma > 0.0):
        raise ConfigurationError(f"asymptotic formulas need h > 0 and gamma > 0 (h={sp.h}, gamma={sp.gamma})")


def lambda_eta_asym(qn: QuantumNumbers, sp: ScaledParams, beta: Optional[float] = None) -> AsymptoticEval:
    """lambda = 4k sqrt(gamma) + (2k beta - 4 tau)/h^2 + O(h^-4)."""
    _check_scaled(sp)
    beta = _beta(beta)
    value = 4.0 * qn.k * math.sqrt(sp.gamma) + (2.0 * qn.k * beta - 4.0 * qn.tau) / sp.h ** 2
    return AsymptoticEval(value=value, order_included=2, remainder_order=4, beta=beta)


def lambda_xi_asym(qn: QuantumNumbers, sp: ScaledParams, delta: Optional[float] = None) -> AsymptoticEval:
    """lambda = -2s sqrt(gamma) - alpha/h + (4 tau - s delta)/h^2 - s alpha gamma^(-1/4)/(2h^3) + O(h^-4)."""
    _check_scaled(sp)
    delta = _delta(delta)
    s, h = qn.s, sp.h
    value = (
        -2.0 * s * math.sqrt(sp.gamma)
        - sp.alpha / h
        + (4.0 * qn.tau - s * delta) / h ** 2
        - s * sp.alpha * sp.gamma ** -0.25 / (2.0 * h ** 3)
    )
    return AsymptoticEval(value=value, order_included=3, remainder_order=4, delta=delta)


def harmonic_lambda(qn: QuantumNumbers, config: PhysicalConfig, E: float) -> float:
    """Midplane harmonic estimate of h*lambda; real for any E, including E' <= 0."""
    p_sq = 0.5 * config.R ** 2 * (E - config.floor)
    return math.sqrt(config.gamma_prime) * (2 * qn.q + 1) - p_sq - (1 - qn.m ** 2)


def quantum_condition_angular(z_derivs: Tuple[float, float], qn: QuantumNumbers, sp: ScaledParams) -> float:
    """lambda = 2k z'(0) + (2 tau/h^2)[z''(0)/z'(0) - 1]."""
    z1, z2 = z_derivs
    if z1 == 0.0:
        raise DegenerateTransition("z'(0) = 0: transition point is degenerate")
    return 2.0 * qn.k * z1 + (2.0 * qn.tau / sp.h ** 2) * (z2 / z1 - 1.0)


def quantization_condition_radial(
    phi_derivs: Tuple[float, float], qn: QuantumNumbers, sp: ScaledParams
) -> float:
    """lambda = -2s phi'(0) + alpha/h - (1/h^2)[phi''(0)/phi'(0) + 1].

    With phi = y^2/4 and the three-term y(t), phi'(0) = 2 sqrt(gamma), so the
    leading term is -4s sqrt(gamma): twice the leading term of ``lambda_xi_asym``.
    Both relations are kept as printed and the numeric solver decides.
    """
    p1, p2 = phi_derivs
    if p1 == 0.0:
        raise DegenerateTransition("phi'(0) = 0: transition point is degenerate")
    return -2.0 * qn.s * p1 + sp.alpha / sp.h - (p2 / p1 + 1.0) / sp.h ** 2


def z_of_x(x: float, sp: ScaledParams, beta: Optional[float] = None) -> float:
    """z = sqrt(gamma) x (2 - x) + (beta/h^2) ln(1 - x), x = 1 + eta.

    x = 1 is accepted only when beta = 0 (no log term).
    """
    beta = _beta(beta)
    if x > 1.0 or (x == 1.0 and beta != 0.0):
        raise LogBranch(f"ln(1 - x) has no real branch at x={x}")
    if x < 0.0:
        raise DomainEdge(f"z(x) is defined for 0 <= x <= 1, got {x}")
    value = math.sqrt(sp.gamma) * x * (2.0 - x)
    if beta != 0.0:
        value += beta / sp.h ** 2 * math.log1p(-x)
    return value


def z_prime(x: float, sp: ScaledParams, beta: Optional[float] = None) -> float:
    if x >= 1.0:
        raise LogBranch(f"ln(1 - x) has no real branch at x={x}")
    beta = _beta(beta)
    return 2.0 * math.sqrt(sp.gamma) * (1.0 - x) - beta / (sp.h ** 2 * (1.0 - x))


def z_derivatives(sp: ScaledParams, beta: Optional[float] = None) -> Tuple[float, float]:
    """(z'(0), z''(0)) of the closed form z(x)."""
    beta = _beta(beta)
    root = math.sqrt(sp.gamma)
    return 2.0 * root - beta / sp.h ** 2, -2.0 * root - beta / sp.h ** 2


def y_of_t(t: float, sp: ScaledParams, delta: Optional[float] = None, literal: Optional[bool] = None) -> float:
    """Three-term y(t), t = xi - 1.

    The last log term reads ln(2(t+1)/(t+1)) = ln 2 as printed; the
    alternate reading ln(2(t+1)/t) is used when ``literal`` is False.
    """
    if not t > 0.0:
        raise DomainEdge(f"y(t) needs t > 0, got {t}")
    delta = _delta(delta)
    literal = settings.LITERAL_FORMULAS if literal is None else literal

    u = t * t + 2.0 * t
    root_u = math.sqrt(u)
    g4 = sp.gamma ** 0.25
    value = 2.0 * g4 * root_u
    if delta != 0.0:
        value += delta / sp.h ** 2 / g4 / root_u * math.log1p(t)
    if sp.alpha != 0.0:
        log_term = math.log(2.0) if literal else math.log(2.0 * (t + 1.0) / t)
        value += sp.alpha / sp.h ** 3 * g4 ** -3 / root_u * log_term
    return value


def y_prime_leading(t: float, sp: ScaledParams) -> float:
    if not t > 0.0:
        raise DomainEdge(f"y'(t) needs t > 0, got {t}")
    return 2.0 * sp.gamma ** 0.25 * (t + 1.0) / math.sqrt(t * t + 2.0 * t)


def phi_of_t(t: float, sp: ScaledParams, delta: Optional[float] = None, literal: Optional[bool] = None) -> float:
    return 0.25 * y_of_t(t, sp, delta, literal) ** 2


def phi_derivatives(sp: ScaledParams, delta: Optional[float] = None) -> Tuple[float, float]:
    """(phi'(0), phi''(0)) of phi = y^2/4 through O(h^-2).

    The alpha term of y contributes a constant to phi under the printed ln 2
    and drops out of both derivatives.
    """
    delta = _delta(delta)
    root = math.sqrt(sp.gamma)
    return 2.0 * root + delta / sp.h ** 2, 2.0 * root - delta / sp.h ** 2


def angular_wave_asym(
    eta: float, qn: QuantumNumbers, sp: ScaledParams, beta: Optional[float] = None
) -> float:
    """V = z'^(-1/2) M_{k, m/2}(h^2 z) with x = 1 + eta; eta > 0 by parity."""
    if eta > 0.0:
        sign = -1.0 if qn.q % 2 else 1.0
        return sign * angular_wave_asym(-eta, qn, sp, beta)
    if eta == 0.0:
        raise DegenerateTransition("z'(x) vanishes at the midplane x = 1")

    x = 1.0 + eta
    dz = z_prime(x, sp, beta)
    if not dz > 0.0:
        raise DegenerateTransition(f"z'(x) = {dz} is not positive at x={x}")

    z = z_of_x(x, sp, beta)
    if z <= 0.0:
        return 0.0
    sign, log_abs = specfun.whittaker_log(qn.k, 0.5 * qn.m, sp.h ** 2 * z)
    if sign == 0.0:
        return 0.0
    return sign * math.exp(log_abs) / math.sqrt(dz)


def radial_wave_asym(
    xi: float,
    qn: QuantumNumbers,
    sp: ScaledParams,
    delta: Optional[float] = None,
    literal: Optional[bool] = None,
) -> float:
    """U = y^(-1/2) W(h^2 y^2) as printed, or y'^(-1/2) W when ``literal`` is False."""
    literal = settings.LITERAL_FORMULAS if literal is None else literal
    t = xi - 1.0
    y = y_of_t(t, sp, delta, literal)
    if not y > 0.0:
        raise DomainEdge(f"y(xi) = {y} is not positive at xi={xi}")

    sign, log_abs = specfun.radial_etalon_log(qn.n, qn.m, sp.h ** 2 * y * y, literal)
    if sign == 0.0:
        return 0.0
    prefactor = y if literal else y_prime_leading(t, sp)
    log_abs -= 0.5 * math.log(prefactor)
    try:
        return sign * math.exp(log_abs)
    except OverflowError:
        logger.warning(f"radial asymptotic wave overflows at xi={xi} (literal={literal})")
        return sign * math.inf


def _sampled(wave: Callable[[float], float], points: np.ndarray) -> np.ndarray:
    values = np.full(len(points), np.nan)
    for i, x in enumerate(points):
        try:
            values[i] = wave(float(x))
        except NumericalError:
            continue
    return values


def _agreement(x: np.ndarray, numeric: np.ndarray, asym: np.ndarray) -> Tuple[Optional[float], Optional[int]]:
    usable = np.isfinite(asym)
    if np.count_nonzero(usable) < 3:
        return None, None
    return helpers.shape_correlation(x[usable], numeric[usable], asym[usable]), count_nodes(asym[usable])


def compare_waves(
    sol: Eigensolution,
    qn: QuantumNumbers,
    config: PhysicalConfig,
    literal: Optional[bool] = None,
    beta: Optional[float] = None,
    delta: Optional[float] = None,
) -> WaveComparison:
    """Asymptotic U and V on the solver's own samples, against the numeric U and V.

    Points where a formula has no value (midplane, log branch, overflow) are
    left out. Below the floor there are no scaled parameters and nothing is
    compared.
    """
    try:
        sp = scale_parameters(config, sol.E)
    except NonPositiveShiftedEnergy:
        return WaveComparison()

    u = _sampled(lambda xi: radial_wave_asym(xi, qn, sp, delta, literal), sol.xi)
    v = _sampled(lambda eta: angular_wave_asym(eta, qn, sp, beta), sol.eta)
    corr_u, nodes_u = _agreement(sol.xi, sol.u, u)
    corr_v, nodes_v = _agreement(sol.eta, sol.v, v)
    return WaveComparison(corr_radial=corr_u, corr_angular=corr_v, nodes_radial=nodes_u, nodes_angular=nodes_v)


def energy_e0(qn: QuantumNumbers, omega: float) -> float:
    """E0 = 2 omega (N + 3/2)."""
    if not omega > 0.0:
        raise ConfigurationError(f"E0 needs omega > 0, got {omega}")
    return 2.0 * omega * (qn.N + 1.5)


def energy_coefficients(
    qn: QuantumNumbers, config: PhysicalConfig, E0: float, literal: Optional[bool] = None
) -> EnergyExpansion:
    """E1, E2 of E = omega^2 R^2/2 + E0 + E1/R + E2/R^2.

    literal: the printed closed forms. Otherwise the midpoint multipole
    expansion of the two Coulomb terms, E1 = -4Z and E2 = 0.
    """
    literal = settings.LITERAL_FORMULAS if literal is None else literal
    Z, omega = config.Z, config.omega
    if Z == 0.0:
        raise ZeroCharge("the 1/R energy coefficients divide by Z")

    if not literal:
        return EnergyExpansion(E0=E0, E1=-4.0 * Z, E2=0.0, literal=False)

    s, k, tau = qn.s, qn.k, qn.tau
    two_e0 = 2.0 * E0
    e1 = (
        (s * omega - 2.0 * k / omega) * two_e0 ** 2.5
        + (4.0 * s * s - 16.0 * k * k - 16.0 * tau) * two_e0 ** 1.5
    ) / (6.0 * Z)
    e2 = (
        2.5 * e1 * e1
        + 2.0 * s * E0 / omega
        + e1 * math.sqrt(two_e0) / Z * (16.0 * tau * tau + 16.0 * k * k - 4.0 * s * s)
    )
    return EnergyExpansion(E0=E0, E1=e1, E2=e2, literal=True)


def energy_asym(
    qn: QuantumNumbers, config: PhysicalConfig, R: float, order: int = 0, literal: Optional[bool] = None
) -> float:
    if not R > 0.0:
        raise ConfigurationError(f"R must be positive, got {R}")
    if order not in (0, 1, 2):
        raise ConfigurationError(f"energy expansion order must be 0, 1 or 2, got {order}")

    E0 = energy_e0(qn, config.omega)
    value = 0.5 * config.omega ** 2 * R ** 2 + E0
    if order == 0:
        return value

    coeffs = energy_coefficients(qn, config, E0, literal)
    value += coeffs.E1 / R
    if order == 2:
        value += coeffs.E2 / R ** 2
    return value
