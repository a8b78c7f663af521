import math
import logging
from typing import Tuple

from twocenter.errors import NonPositiveShiftedEnergy, SingularPoint, UnrealizableGeometry
from twocenter.models import PhysicalConfig, ScaledParams, SpheroidalPoint

logger = logging.getLogger(__name__)

# Slack for the triangle test and for clamping rounded coordinates
_GEOMETRY_SLACK = 1e-12


def scale_parameters(config: PhysicalConfig, E: float) -> ScaledParams:
    """Derived parameters E', p, h, alpha, gamma, a, gamma' at trial energy E."""
    e_prime = E - config.floor
    if not e_prime > 0.0:
        raise NonPositiveShiftedEnergy(
            f"E={E!r} is not above the confinement floor {config.floor!r} (E'={e_prime!r})"
        )

    root = math.sqrt(2.0 * e_prime)
    p = 0.5 * config.R * root
    return ScaledParams(
        E_prime=e_prime,
        p=p,
        h=2.0 * p,
        alpha=2.0 * config.Z / root,
        gamma=config.omega ** 2 / (8.0 * e_prime ** 2),
        a=config.a,
        gamma_prime=config.gamma_prime,
    )


def to_spheroidal(r1: float, r2: float, R: float) -> SpheroidalPoint:
    if R <= 0.0 or r1 < 0.0 or r2 < 0.0:
        raise UnrealizableGeometry(f"distances must be non-negative and R positive: {r1}, {r2}, {R}")

    slack = _GEOMETRY_SLACK * max(R, r1 + r2)
    if abs(r1 - r2) > R + slack or R > r1 + r2 + slack:
        raise UnrealizableGeometry(f"no triangle with sides r1={r1}, r2={r2}, R={R}")

    xi = max((r1 + r2) / R, 1.0)
    eta = min(max((r1 - r2) / R, -1.0), 1.0)
    return SpheroidalPoint(xi=xi, eta=eta)


def potential_terms(pt: SpheroidalPoint, config: PhysicalConfig) -> Tuple[float, float]:
    """a(xi), b(eta) such that V = -(2/R^2)(a+b)/(xi^2-eta^2) + omega^2 R^2 / 2."""
    gp = config.gamma_prime
    a_xi = config.a * pt.xi - gp * pt.xi ** 2 * (pt.xi ** 2 - 1.0)
    b_eta = gp * pt.eta ** 2 * (pt.eta ** 2 - 1.0)
    return a_xi, b_eta


def printed_potential_terms(pt: SpheroidalPoint, config: PhysicalConfig) -> Tuple[float, float]:
    """The a(xi), b(eta) pair in their printed form; kept for comparison only."""
    gp = config.gamma_prime
    return (
        config.a - gp * pt.xi ** 2 * (pt.xi ** 2 - 1.0),
        config.a - gp * pt.eta ** 2 * (pt.eta ** 2 - 1.0),
    )


def cartesian_potential(r1: float, r2: float, config: PhysicalConfig) -> float:
    """-Z/r1 - Z/r2 + omega^2 (r1^2 + r2^2), evaluated directly from r1 and r2."""
    if config.Z > 0.0 and (r1 == 0.0 or r2 == 0.0):
        raise SingularPoint(f"Coulomb singularity at r1={r1}, r2={r2}")
    coulomb = 0.0 if config.Z == 0.0 else -config.Z / r1 - config.Z / r2
    return coulomb + config.omega ** 2 * (r1 ** 2 + r2 ** 2)


def potential_value(pt: SpheroidalPoint, config: PhysicalConfig) -> float:
    denom = pt.xi ** 2 - pt.eta ** 2
    if denom <= 0.0:
        if config.Z > 0.0:
            raise SingularPoint(f"particle sits on a center (xi={pt.xi}, eta={pt.eta})")
        # Z = 0: (a+b)/(xi^2-eta^2) cancels to -gamma'(xi^2+eta^2-1)
        return 0.5 * config.omega ** 2 * config.R ** 2 * (pt.xi ** 2 + pt.eta ** 2)

    a_xi, b_eta = potential_terms(pt, config)
    return -(2.0 / config.R ** 2) * (a_xi + b_eta) / denom + config.floor
