"""
Nested shooting solver for the separated two-parameter problem.

The inner problem fixes E and finds h*lambda so that the quasi-angular
solution regular at eta = -1 meets the midplane parity condition with q
nodes. The outer problem finds E so that the quasi-radial solutions regular
at xi = 1 and decaying at infinity join at xi* with n nodes. Both conditions
are Pruefer-phase targets, so each root is bracketed by continuity alone.
"""

import math
import logging
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.optimize import brentq

from twocenter.errors import (
    BracketFailure,
    ConfigurationError,
    NodeCountMismatch,
    NoRootInBracket,
    NumericalError,
)
from twocenter.models import (
    AngularSolve,
    CanonicalOde,
    Eigensolution,
    Endpoint,
    OdeKind,
    PhysicalConfig,
    QuantumNumbers,
    RadialMatch,
    SolverSettings,
    Trajectory,
)
from twocenter.services import asymptotics
from twocenter.services.ode_engine import (
    default_xi_max,
    frobenius_start,
    integrate,
    outer_turning_point,
    prufer_angle,
    start_coordinate,
    tail_start,
    to_local,
    to_physical,
)
from twocenter.services.params import scale_parameters

logger = logging.getLogger(__name__)

WAVE_SAMPLES = 401
ANGULAR_MAXITER = 100


# --- quasi-angular problem -------------------------------------------------

def _angular_ode(E: float, h_lambda: float, m: int, config: PhysicalConfig) -> CanonicalOde:
    return CanonicalOde.physical(OdeKind.ANGULAR, config, E, h_lambda, m)


def _angular_half(ode: CanonicalOde, st: SolverSettings, samples: Optional[int] = None) -> Trajectory:
    u, du, log_scale = frobenius_start(ode, Endpoint.LEFT, st.endpoint_offset)
    s0 = start_coordinate(Endpoint.LEFT, st.endpoint_offset)
    return integrate(
        ode, (s0, u, du), to_local(OdeKind.ANGULAR, 0.0), st.rel_tol, log_scale, st.overflow_guard, samples
    )


def _angular_phase(ode: CanonicalOde, st: SolverSettings) -> float:
    traj = _angular_half(ode, st)
    _, u, du, _ = traj.end
    return prufer_angle(u, du, traj.nodes)


def angular_separation(
    E: float,
    qn: QuantumNumbers,
    config: PhysicalConfig,
    st: Optional[SolverSettings] = None,
    guess: Optional[float] = None,
) -> AngularSolve:
    """h*lambda at energy E; works for any E, including E' <= 0."""
    st = st or SolverSettings()
    target = 0.5 * (qn.q + 1) * math.pi
    base = _angular_ode(E, 0.0, qn.m, config)
    evaluations = 0

    def mismatch(h_lambda: float) -> float:
        nonlocal evaluations
        evaluations += 1
        return _angular_phase(base.with_lambda(h_lambda), st) - target

    if guess is None:
        center = asymptotics.harmonic_lambda(qn, config, E)
        width = max(1.0, 0.25 * abs(center))
    else:
        center = guess
        width = max(0.5, 0.02 * abs(center))

    lo, hi = center - width, center + width
    f_lo, f_hi = mismatch(lo), mismatch(hi)
    steps = 0
    while f_lo > 0.0:
        hi, f_hi = lo, f_lo
        width *= st.bracket_expansion
        lo = lo - width
        f_lo = mismatch(lo)
        steps += 1
        if steps > st.max_outer_iters:
            raise BracketFailure(f"no angular sign change below h*lambda={hi}", (lo, hi))
    while f_hi < 0.0:
        lo, f_lo = hi, f_hi
        width *= st.bracket_expansion
        hi = hi + width
        f_hi = mismatch(hi)
        steps += 1
        if steps > st.max_outer_iters:
            raise BracketFailure(f"no angular sign change above h*lambda={lo}", (lo, hi))

    if f_lo == 0.0:
        root = lo
    elif f_hi == 0.0:
        root = hi
    else:
        root = brentq(mismatch, lo, hi, xtol=1e-12, rtol=1e-15, maxiter=ANGULAR_MAXITER)

    phase = _angular_phase(base.with_lambda(root), st)
    return AngularSolve(
        h_lambda=root,
        phase=phase,
        nodes=int(round(2.0 * phase / math.pi)) - 1,
        residual=abs(phase - target),
        evaluations=evaluations,
    )


def angular_lambda(
    E: float, qn: QuantumNumbers, config: PhysicalConfig, st: Optional[SolverSettings] = None
) -> float:
    """Canonical lambda of the quasi-angular equation with q interior nodes."""
    sp = scale_parameters(config, E)
    return angular_separation(E, qn, config, st).h_lambda / sp.h


# --- quasi-radial problem --------------------------------------------------

def matching_point(
    E: float, h_lambda: float, qn: QuantumNumbers, config: PhysicalConfig, st: SolverSettings
) -> float:
    """Outer turning point of the radial coefficient, scaled by ``st.match_scale``."""
    ode = CanonicalOde.physical(OdeKind.RADIAL, config, E, h_lambda, qn.m)
    xi_max = default_xi_max(ode, st.tail_depth, st.xi_max_cap)
    turning = outer_turning_point(ode, xi_max)
    offset = max(turning - 1.0, 100.0 * st.endpoint_offset)
    return 1.0 + offset * st.match_scale


def _radial_pieces(
    E: float,
    h_lambda: float,
    qn: QuantumNumbers,
    config: PhysicalConfig,
    st: SolverSettings,
    xi_match: float,
    samples: Optional[int] = None,
) -> Tuple[RadialMatch, Trajectory, Trajectory]:
    ode = CanonicalOde.physical(OdeKind.RADIAL, config, E, h_lambda, qn.m)
    xi_max = max(default_xi_max(ode, st.tail_depth, st.xi_max_cap), 1.0 + 2.0 * (xi_match - 1.0))

    offset = st.endpoint_offset * min(1.0, xi_match - 1.0)
    u, du, log_scale = frobenius_start(ode, Endpoint.RADIAL, offset)
    left = integrate(
        ode, (start_coordinate(Endpoint.RADIAL, offset), u, du), to_local(OdeKind.RADIAL, xi_match),
        st.rel_tol, log_scale, st.overflow_guard, samples,
    )

    u, du, log_scale = tail_start(ode, xi_max, st.tail_depth)
    right = integrate(
        ode, (to_local(OdeKind.RADIAL, xi_max), u, du), to_local(OdeKind.RADIAL, xi_match),
        st.rel_tol, log_scale, st.overflow_guard, samples,
    )

    _, ul, dul, _ = left.end
    _, ur, dur, _ = right.end
    theta_left = prufer_angle(ul, dul, left.nodes)
    theta_right = prufer_angle(ur, dur, right.nodes, forward=False)
    turns = (theta_left - theta_right) / math.pi

    wronskian = (ul * dur - dul * ur) / (math.hypot(ul, dul) * math.hypot(ur, dur))
    match = RadialMatch(
        value=turns - qn.n,
        wronskian=wronskian,
        nodes=int(round(turns)),
        xi_match=xi_match,
        xi_max=xi_max,
    )
    return match, left, right


def radial_mismatch(
    E: float,
    lambda_: float,
    qn: QuantumNumbers,
    config: PhysicalConfig,
    st: Optional[SolverSettings] = None,
    xi_match: Optional[float] = None,
) -> RadialMatch:
    """Matching of the quasi-radial equation at canonical lambda; sign change in E brackets eigenvalues."""
    st = st or SolverSettings()
    sp = scale_parameters(config, E)
    h_lambda = sp.h * lambda_
    if xi_match is None:
        xi_match = matching_point(E, h_lambda, qn, config, st)
    match, _, _ = _radial_pieces(E, h_lambda, qn, config, st, xi_match)
    return match


# --- wavefunctions ---------------------------------------------------------

def _log_abs(traj: Trajectory) -> Tuple[np.ndarray, np.ndarray]:
    u = traj.values[:, 0]
    with np.errstate(divide="ignore"):
        return np.sign(u), np.log(np.abs(u)) + traj.log_scale


def _normalized(x: np.ndarray, sign: np.ndarray, log_abs: np.ndarray) -> np.ndarray:
    values = sign * np.exp(log_abs - np.max(log_abs))
    norm = math.sqrt(trapezoid(values * values, x))
    return values / norm


def _radial_wave(left: Trajectory, right: Trajectory) -> Tuple[np.ndarray, np.ndarray]:
    _, ul, dul, sl = left.end
    _, ur, dur, sr = right.end
    if abs(ur) >= 1e-3 * max(abs(ur), abs(dur)) and ul != 0.0:
        shift = math.log(abs(ul)) + sl - math.log(abs(ur)) - sr
        flip = math.copysign(1.0, ul) * math.copysign(1.0, ur)
    else:
        shift = math.log(abs(dul)) + sl - math.log(abs(dur)) - sr
        flip = math.copysign(1.0, dul) * math.copysign(1.0, dur)

    sign_l, log_l = _log_abs(left)
    sign_r, log_r = _log_abs(right)
    xi = to_physical(OdeKind.RADIAL, np.concatenate([left.abscissae, right.abscissae[::-1][1:]]))
    sign = np.concatenate([sign_l, flip * sign_r[::-1][1:]])
    log_abs = np.concatenate([log_l, (log_r + shift)[::-1][1:]])
    return xi, _normalized(xi, sign, log_abs)


def _angular_wave(half: Trajectory, q: int) -> Tuple[np.ndarray, np.ndarray]:
    parity = -1.0 if q % 2 else 1.0
    sign, log_abs = _log_abs(half)
    half_eta = to_physical(OdeKind.ANGULAR, half.abscissae)
    eta = np.concatenate([half_eta, -half_eta[::-1][1:]])
    sign = np.concatenate([sign, parity * sign[::-1][1:]])
    log_abs = np.concatenate([log_abs, log_abs[::-1][1:]])
    return eta, _normalized(eta, sign, log_abs)


# --- full eigenstate -------------------------------------------------------

def energy_seed(qn: QuantumNumbers, config: PhysicalConfig) -> float:
    """Asymptotic starting energy: order 0 at Z = 0, multipole order 1 otherwise."""
    if config.Z == 0.0:
        return asymptotics.energy_asym(qn, config, config.R, order=0)
    return asymptotics.energy_asym(qn, config, config.R, order=1, literal=False)


def solve_state(
    qn: QuantumNumbers,
    config: PhysicalConfig,
    st: Optional[SolverSettings] = None,
    e_bracket: Optional[Tuple[float, float]] = None,
) -> Eigensolution:
    """Converged (E, lambda) with node counts (n, q) and normalized U(xi), V(eta)."""
    st = st or SolverSettings()
    if config.omega == 0.0:
        raise ConfigurationError("the shooting solver needs omega > 0 for the radial tail")

    if e_bracket is None:
        seed = energy_seed(qn, config)
        e_bracket = (seed - 2.0 * config.omega, seed + 2.0 * config.omega)
    lo, hi = sorted(e_bracket)
    seed = 0.5 * (lo + hi)

    seed_angular = angular_separation(seed, qn, config, st)
    xi_match = matching_point(seed, seed_angular.h_lambda, qn, config, st)
    logger.debug(f"R={config.R}: seed E={seed:.10g}, xi*={xi_match:.6g}")

    guess = [seed_angular.h_lambda]
    evaluations = 0

    def mismatch(E: float) -> float:
        nonlocal evaluations
        evaluations += 1
        angular = angular_separation(E, qn, config, st, guess=guess[0])
        guess[0] = angular.h_lambda
        match, _, _ = _radial_pieces(E, angular.h_lambda, qn, config, st, xi_match)
        return match.value

    f_lo, f_hi = mismatch(lo), mismatch(hi)
    width = hi - lo
    steps = 0
    while f_lo > 0.0 or f_hi < 0.0:
        steps += 1
        if steps > st.max_outer_iters:
            raise NoRootInBracket(f"no (n={qn.n}, q={qn.q}) state in E in [{lo}, {hi}]")
        width *= st.bracket_expansion
        if f_lo > 0.0:
            hi, f_hi = lo, f_lo
            lo = lo - width
            f_lo = mismatch(lo)
        else:
            lo, f_lo = hi, f_hi
            hi = hi + width
            f_hi = mismatch(hi)
        logger.debug(f"R={config.R}: widened energy bracket to [{lo:.10g}, {hi:.10g}]")

    xtol = 0.1 * st.match_tol * max(1.0, abs(seed))
    energy, result = brentq(
        mismatch, lo, hi, xtol=xtol, rtol=1e-15, maxiter=st.max_outer_iters, full_output=True, disp=False
    )
    if not result.converged:
        raise NoRootInBracket(f"energy iteration stopped without convergence: {result.flag}")

    angular = angular_separation(energy, qn, config, st, guess=guess[0])
    match, left, right = _radial_pieces(
        energy, angular.h_lambda, qn, config, st, xi_match, samples=WAVE_SAMPLES
    )
    nodes_radial = left.nodes + right.nodes
    if nodes_radial != qn.n or angular.nodes != qn.q or abs(match.value) >= 0.5:
        raise NodeCountMismatch(
            f"converged to nodes (n={nodes_radial}, q={angular.nodes}), requested (n={qn.n}, q={qn.q})"
        )

    xi, u = _radial_wave(left, right)
    eta, v = _angular_wave(_angular_half(_angular_ode(energy, angular.h_lambda, qn.m, config), st, WAVE_SAMPLES), qn.q)

    lambda_ = None
    if energy > config.floor:
        lambda_ = angular.h_lambda / scale_parameters(config, energy).h

    logger.info(
        f"R={config.R}: E={energy:.12g} h*lambda={angular.h_lambda:.10g} "
        f"({evaluations} energy evaluations)"
    )
    return Eigensolution(
        E=energy,
        lambda_=lambda_,
        h_lambda=angular.h_lambda,
        nodes_radial=nodes_radial,
        nodes_angular=angular.nodes,
        xi=xi,
        u=u,
        eta=eta,
        v=v,
        residuals={
            "angular_phase": angular.residual,
            "radial_phase": abs(match.value),
            "wronskian": abs(match.wronskian),
            "energy": xtol,
        },
        iterations=result.iterations,
        xi_match=xi_match,
        xi_max=match.xi_max,
    )


def energy_curve(
    qn: QuantumNumbers,
    config: PhysicalConfig,
    r_grid: List[float],
    st: Optional[SolverSettings] = None,
) -> List[Tuple[float, Optional[Eigensolution], str]]:
    """Continuation in R: each converged point seeds the next one's bracket.

    Failed points are kept as (R, None, message); the next point then
    re-seeds from the asymptotic energy.
    """
    st = st or SolverSettings()
    if any(b < a for a, b in zip(r_grid, r_grid[1:])):
        raise ConfigurationError("R grid must be sorted ascending")

    curve = []
    previous: Optional[Tuple[PhysicalConfig, Eigensolution]] = None
    for R in r_grid:
        point = config.at(R)
        bracket = None
        if previous is not None:
            prev_config, prev_solution = previous
            center = point.floor + (prev_solution.E - prev_config.floor)
            bracket = (center - config.omega, center + config.omega)

        try:
            solution = solve_state(qn, point, st, bracket)
        except NumericalError as e:
            if bracket is None:
                logger.warning(f"R={R}: {e}")
                curve.append((R, None, str(e)))
                previous = None
                continue
            logger.warning(f"R={R}: continuation failed ({e}); re-seeding from asymptotics")
            try:
                solution = solve_state(qn, point, st)
            except NumericalError as e2:
                logger.warning(f"R={R}: {e2}")
                curve.append((R, None, str(e2)))
                previous = None
                continue

        curve.append((R, solution, ""))
        previous = (point, solution)
    return curve
