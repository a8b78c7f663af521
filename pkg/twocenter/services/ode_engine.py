"""
Canonical quasi-radial / quasi-angular equations u'' + Q u = 0 and the
shooting integrator used by the eigensolver.

The integrator runs in the local coordinate measured from the lower singular
end, t = xi - 1 for the radial equation and s = eta + 1 for the angular one,
so the factors xi^2 - 1 = t(2 + t) and 1 - eta^2 = s(2 - s) keep full relative
precision next to the endpoints.

Magnitudes are controlled by segment log-rescaling: whenever |u| + |u'|
crosses the overflow guard the state is divided by its size and the log of
the factor is accumulated in ``Trajectory.log_scale``.
"""

import math
import logging
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from twocenter.config import settings
from twocenter.errors import ConfigurationError, DomainEdge, StepUnderflow, TailTooClose
from twocenter.models import CanonicalOde, Endpoint, OdeKind, Trajectory

logger = logging.getLogger(__name__)

MIN_REL_TOL = 1e-13
MAX_REL_TOL = 1e-6
MIN_STEP = 1e-15
DEPTH_SLACK = 1e-9


def to_local(kind: OdeKind, x: float) -> float:
    return x - 1.0 if kind == OdeKind.RADIAL else x + 1.0


def to_physical(kind: OdeKind, t):
    return 1.0 + t if kind == OdeKind.RADIAL else t - 1.0


def q_function(ode: CanonicalOde) -> Callable[[float], float]:
    """Fast closure for Q in the local coordinate; no domain checks."""
    p_sq = ode.p_sq
    h_lambda = ode.h_lambda
    h_alpha = ode.h_alpha
    conf = ode.confinement
    cent = 1.0 - ode.m * ode.m

    if ode.kind == OdeKind.RADIAL:
        def q(t: float) -> float:
            xi = 1.0 + t
            d = t * (2.0 + t)
            return p_sq + (h_alpha * xi - h_lambda) / d - conf * xi * xi + cent / (d * d)
    else:
        def q(s: float) -> float:
            eta = s - 1.0
            d = s * (2.0 - s)
            return p_sq + h_lambda / d - conf * eta * eta + cent / (d * d)
    return q


def _inside(ode: CanonicalOde, t: float) -> bool:
    if ode.kind == OdeKind.RADIAL:
        return t > 0.0 and math.isfinite(t)
    return 0.0 < t < 2.0


def ode_q(ode: CanonicalOde, coordinate: float) -> float:
    """Q such that u'' + Q u = 0 is the quasi-radial or quasi-angular equation, at a physical xi or eta."""
    t = to_local(ode.kind, coordinate)
    if not _inside(ode, t):
        raise DomainEdge(f"{ode.kind.value} coefficient evaluated outside the open domain at {coordinate}")
    return q_function(ode)(t)


def frobenius_exponent(m: int) -> float:
    """Regular root of sigma(sigma - 1) + (1 - m^2)/4 = 0."""
    return 0.5 * (1.0 + m)


def frobenius_c1(ode: CanonicalOde) -> float:
    """First Frobenius coefficient: u = d^sigma (1 + c1 d + ...)."""
    cent = 1.0 - ode.m * ode.m
    if ode.kind == OdeKind.RADIAL:
        b = 0.5 * (ode.h_alpha - ode.h_lambda) - 0.25 * cent
    else:
        b = 0.5 * ode.h_lambda + 0.25 * cent
    return -b / (1.0 + ode.m)


def frobenius_start(ode: CanonicalOde, endpoint: Endpoint, offset: float) -> Tuple[float, float, float]:
    """Regular-solution start (u, u', log_scale) at distance ``offset`` from a singular endpoint.

    The returned pair is normalized so max(|u|, |u'|) = 1; log_scale holds the
    log of the removed factor. u' is the derivative in the ODE coordinate.
    """
    if not 0.0 < offset <= 1e-3:
        raise ConfigurationError(f"Frobenius offset must lie in (0, 1e-3], got {offset}")
    if (endpoint == Endpoint.RADIAL) != (ode.kind == OdeKind.RADIAL):
        raise DomainEdge(f"endpoint {endpoint.value} does not belong to the {ode.kind.value} equation")

    sigma = frobenius_exponent(ode.m)
    c1 = frobenius_c1(ode)
    d = offset

    u = d ** sigma * (1.0 + c1 * d)
    du = d ** (sigma - 1.0) * (sigma + (sigma + 1.0) * c1 * d)
    if endpoint == Endpoint.RIGHT:
        du = -du

    size = max(abs(u), abs(du))
    return u / size, du / size, math.log(size)


def start_coordinate(endpoint: Endpoint, offset: float) -> float:
    """Local coordinate ``offset`` away from a singular endpoint."""
    if endpoint == Endpoint.RIGHT:
        return 2.0 - offset
    return offset


def decay_depth(ode: CanonicalOde, xi_max: float) -> float:
    """Gaussian decay exponent sqrt(h^4 gamma) (xi_max^2 - xi_c^2) / 2 beyond the confinement turning point."""
    if ode.confinement <= 0.0:
        return 0.0
    root = math.sqrt(ode.confinement)
    xi_c_sq = max(1.0, ode.p_sq / ode.confinement)
    return 0.5 * root * (xi_max * xi_max - xi_c_sq)


def default_xi_max(ode: CanonicalOde, depth: Optional[float] = None, cap: Optional[float] = None) -> float:
    """Smallest xi whose decay depth reaches ``depth`` (default TAIL_DEPTH), capped."""
    depth = settings.TAIL_DEPTH if depth is None else depth
    cap = settings.XI_MAX_CAP if cap is None else cap
    if ode.confinement <= 0.0:
        raise TailTooClose("no confining term: the tail start needs omega > 0")
    xi_c_sq = max(1.0, ode.p_sq / ode.confinement)
    return min(math.sqrt(xi_c_sq + 2.0 * depth / math.sqrt(ode.confinement)), cap)


def tail_start(ode: CanonicalOde, xi_max: float, depth: Optional[float] = None) -> Tuple[float, float, float]:
    """Decaying-branch start (u, u', log_scale) at xi_max from the dominant balance u'' ~ h^4 gamma xi^2 u."""
    depth = settings.TAIL_DEPTH if depth is None else depth
    if ode.kind != OdeKind.RADIAL:
        raise DomainEdge("tail start only applies to the radial equation")
    if decay_depth(ode, xi_max) < depth * (1.0 - DEPTH_SLACK):
        raise TailTooClose(
            f"xi_max={xi_max} gives decay depth {decay_depth(ode, xi_max):.3g} < {depth}"
        )

    root = math.sqrt(ode.confinement)
    ratio = -root * xi_max - 0.5 / xi_max
    size = max(1.0, abs(ratio))
    return 1.0 / size, ratio / size, -0.5 * root * xi_max * xi_max + math.log(size)


def outer_turning_point(ode: CanonicalOde, xi_max: float, samples: int = 400) -> float:
    """Largest xi where Q (without the positive m = 0 centrifugal spike) turns negative."""
    if ode.kind != OdeKind.RADIAL:
        raise DomainEdge("turning point search only applies to the radial equation")

    spike = max(0.0, 1.0 - ode.m * ode.m)
    q = q_function(ode)

    def q_smooth(t: float) -> float:
        d = t * (2.0 + t)
        return q(t) - spike / (d * d)

    t = np.geomspace(1e-6, xi_max - 1.0, samples)
    values = np.array([q_smooth(ti) for ti in t])
    positive = np.nonzero(values > 0.0)[0]
    if len(positive) == 0:
        return 1.0 + float(t[int(np.argmax(values))])

    i = int(positive[-1])
    if i == len(t) - 1:
        return 1.0 + float(t[-1])
    return 1.0 + brentq(q_smooth, t[i], t[i + 1], xtol=1e-14)


def count_nodes(u: np.ndarray) -> int:
    signs = np.sign(u)
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def integrate(
    ode: CanonicalOde,
    start: Tuple[float, float, float],
    end: float,
    rel_tol: float,
    log_scale: float = 0.0,
    overflow_guard: Optional[float] = None,
    samples: Optional[int] = None,
) -> Trajectory:
    """Adaptive DOP853 integration of u'' = -Q u from start = (t0, u0, u0') to ``end``.

    Coordinates are local (see ``to_local``); so are the trajectory abscissae.

    With ``samples`` the trajectory is reported on an even grid of that many
    points, otherwise on the accepted steps.
    """
    x0, u0, du0 = start
    overflow_guard = settings.OVERFLOW_GUARD if overflow_guard is None else overflow_guard
    if not (MIN_REL_TOL <= rel_tol <= MAX_REL_TOL):
        raise ConfigurationError(f"rel_tol={rel_tol} outside [{MIN_REL_TOL}, {MAX_REL_TOL}]")
    if not (_inside(ode, x0) and _inside(ode, end)):
        raise DomainEdge(f"integration interval [{x0}, {end}] leaves the open {ode.kind.value} domain")

    q = q_function(ode)

    def rhs(x, y):
        return [y[1], -q(x) * y[0]]

    def guard(x, y):
        return abs(y[0]) + abs(y[1]) - overflow_guard

    guard.terminal = True
    guard.direction = 1

    grid = np.linspace(x0, end, samples) if samples else None
    forward = end > x0

    xs, us, dus, scales = [], [], [], []
    x, y = x0, np.array([u0, du0], dtype=float)
    while True:
        t_eval = None
        if grid is not None:
            mask = (grid >= x) & (grid <= end) if forward else (grid <= x) & (grid >= end)
            t_eval = grid[mask]

        sol = solve_ivp(
            rhs, (x, end), y, method="DOP853", rtol=rel_tol,
            atol=rel_tol * 1e-6, events=guard, t_eval=t_eval,
        )
        if sol.status == -1:
            raise StepUnderflow(f"{ode.kind.value} integration failed near x={x}: {sol.message}")

        if sol.status == 1:
            x_ev = float(sol.t_events[0][0])
            y_ev = np.asarray(sol.y_events[0][0], dtype=float)
            keep = sol.t < x_ev if forward else sol.t > x_ev
        else:
            keep = np.ones(len(sol.t), dtype=bool)

        if xs and len(sol.t) and grid is None:
            # first accepted point repeats the previous segment end
            keep = keep.copy()
            keep[0] = False

        xs.append(sol.t[keep])
        us.append(sol.y[0][keep])
        dus.append(sol.y[1][keep])
        scales.append(np.full(int(np.count_nonzero(keep)), log_scale))

        if sol.status != 1:
            break

        size = abs(y_ev[0]) + abs(y_ev[1])
        if abs(x_ev - x) < MIN_STEP:
            raise StepUnderflow(f"rescaling stalled at x={x_ev}")
        y = y_ev / size
        log_scale += math.log(size)
        x = x_ev
        logger.debug(f"{ode.kind.value}: rescaled by e^{math.log(size):.1f} at x={x_ev:.6g}")

        if grid is None:
            # the restart point opens the next segment
            xs.append(np.array([x]))
            us.append(np.array([y[0]]))
            dus.append(np.array([y[1]]))
            scales.append(np.array([log_scale]))

    abscissae = np.concatenate(xs)
    u = np.concatenate(us)
    values = np.column_stack([u, np.concatenate(dus)])
    return Trajectory(
        abscissae=abscissae,
        values=values,
        log_scale=np.concatenate(scales),
        nodes=count_nodes(u),
    )


def prufer_angle(u: float, du: float, nodes: int, forward: bool = True) -> float:
    """Continuous phase: nodes*pi + angle of (u, u') in (0, pi) for forward runs, mirrored for backward runs."""
    s = -1.0 if nodes % 2 else 1.0
    phase = math.atan2(s * u, s * du)
    if phase < 0.0:
        phase += math.pi
    return nodes * math.pi + phase if forward else -nodes * math.pi + phase
