"""
Brute-force reference: finite-volume discretization of the full equation in
(xi, eta) at fixed m, solved as a sparse generalized eigenproblem.

With psi = (xi^2-1)^(m/2) (1-eta^2)^(m/2) g e^{i m phi} the equation becomes

    -d_xi((xi^2-1)^(m+1) (1-eta^2)^m d_xi g) - d_eta((1-eta^2)^(m+1) (xi^2-1)^m d_eta g)
        + W P g = mu W (xi^2 - eta^2) g,

W = (xi^2-1)^m (1-eta^2)^m, P = -2ZR xi + gamma' (xi^2 (xi^2-1) + eta^2 (1-eta^2)),
mu = R^2 (E - omega^2 R^2 / 2) / 2. The radial coordinate is graded as
xi = 1 + (xi_max - 1) u^stretching on cell centres in u, eta on uniform cells;
the boundary factors vanish on xi = 1 and eta = +-1, and g = 0 at xi_max.
"""

import math
import logging
from typing import List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from twocenter.config import settings
from twocenter.errors import ConfigurationError, FactorizationFailure, IterationStall
from twocenter.models import GridSolution, GridSpec, OperatorPair, PhysicalConfig

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8


def grid_xi_max(config: PhysicalConfig, count: int = 6, depth: Optional[float] = None) -> float:
    """Truncation radius from the radial tail-depth rule at the highest requested oscillator level."""
    depth = 0.5 * settings.TAIL_DEPTH if depth is None else depth
    if config.omega <= 0.0:
        raise ConfigurationError("the grid oracle needs omega > 0")
    root = math.sqrt(config.gamma_prime)
    p_sq = 0.5 * config.R ** 2 * 2.0 * config.omega * (count + 1.5)
    xi_c_sq = max(1.0, p_sq / config.gamma_prime)
    return math.sqrt(xi_c_sq + 2.0 * depth / root)


def _tridiagonal(faces: np.ndarray) -> sp.csr_matrix:
    """-d(f d.) on cells from face coefficients f_0..f_N (zero flux where f = 0)."""
    main = faces[:-1] + faces[1:]
    off = -faces[1:-1]
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def default_shift(config: PhysicalConfig) -> float:
    """Energy safely below the spectrum: floor minus the united-atom binding 2Z^2."""
    return config.floor - 2.0 * config.Z ** 2 - 0.1


def assemble(config: PhysicalConfig, m: int, grid: Optional[GridSpec] = None) -> OperatorPair:
    grid = grid or GridSpec()
    if m < 0:
        raise ConfigurationError(f"m must be non-negative, got {m}")
    xi_max = grid.xi_max or grid_xi_max(config)
    span = xi_max - 1.0
    p = grid.stretching
    gp = config.gamma_prime

    du = 1.0 / grid.n_xi
    u_faces = np.linspace(0.0, 1.0, grid.n_xi + 1)
    u_c = 0.5 * (u_faces[:-1] + u_faces[1:])
    deta = 2.0 / grid.n_eta
    eta_faces = np.linspace(-1.0, 1.0, grid.n_eta + 1)
    eta_c = 0.5 * (eta_faces[:-1] + eta_faces[1:])

    def xi_of(u):
        return 1.0 + span * u ** p

    def dxi_of(u):
        return span * p * u ** (p - 1.0)

    # xi direction: (xi^2-1)^(m+1) / xi'(u) on faces; the outer face carries Dirichlet
    xf = xi_of(u_faces)
    with np.errstate(divide="ignore", invalid="ignore"):
        a_faces = np.where(u_faces > 0.0, (xf * xf - 1.0) ** (m + 1) / dxi_of(u_faces), 0.0)
    a_faces[-1] *= 2.0
    tu = _tridiagonal(a_faces) / du ** 2

    # eta direction: (1-eta^2)^(m+1), zero at both ends
    d_faces = (1.0 - eta_faces ** 2) ** (m + 1)
    teta = _tridiagonal(d_faces) / deta ** 2

    xc = xi_of(u_c)
    jac = dxi_of(u_c)
    xi_w = (xc * xc - 1.0) ** m
    eta_w = (1.0 - eta_c ** 2) ** m

    stiffness = sp.kron(tu, sp.diags(eta_w)) + sp.kron(sp.diags(xi_w * jac), teta)

    X, E = np.meshgrid(xc, eta_c, indexing="ij")
    weight = np.outer(xi_w * jac, eta_w)
    potential = -2.0 * config.Z * config.R * X + gp * (X * X * (X * X - 1.0) + E * E * (1.0 - E * E))
    H = (stiffness + sp.diags((weight * potential).ravel())).tocsc()
    H = (0.5 * (H + H.T)).tocsc()
    S = sp.diags((weight * (X * X - E * E)).ravel()).tocsc()

    return OperatorPair(H=H, S=S, xi=xc, eta=eta_c, config=config, m=m, grid=grid.model_copy(update={"xi_max": xi_max}))


def _eigenpairs(pair: OperatorPair, count: int, shift: float):
    sigma = pair.to_mu(shift)
    try:
        mus, vecs = eigsh(pair.H, k=count, M=pair.S, sigma=sigma, which="LM")
    except ArpackNoConvergence as e:
        raise IterationStall(f"shift-invert iteration stalled at sigma={sigma}: {e}") from e
    except RuntimeError as e:
        raise FactorizationFailure(f"H - sigma S could not be factorized at sigma={sigma}: {e}") from e

    order = np.argsort(mus)
    mus, vecs = mus[order], vecs[:, order]
    residuals = []
    for mu, v in zip(mus, vecs.T):
        sv = pair.S @ v
        residuals.append(float(np.linalg.norm(pair.H @ v - mu * sv) / np.linalg.norm(sv)))
    return mus, vecs, residuals


def lowest_eigenpairs(
    pair: OperatorPair,
    count: int = 2,
    shift: Optional[float] = None,
    companion: Optional[OperatorPair] = None,
) -> GridSolution:
    """Lowest ``count`` energies with a Richardson estimate from a half-resolution companion."""
    shift = default_shift(pair.config) if shift is None else shift
    if pair.grid.n_xi < 32 or pair.grid.n_eta < 32:
        raise ConfigurationError("the Richardson companion needs at least 32 cells per direction")
    companion = companion or assemble(pair.config, pair.m, pair.grid.halved())

    fine_mu, vecs, residuals = _eigenpairs(pair, count, shift)
    coarse_mu, _, _ = _eigenpairs(companion, count, shift)
    for r in residuals:
        if r > RESIDUAL_TOL * max(1.0, float(np.max(np.abs(fine_mu)))):
            logger.warning(f"grid eigenpair residual {r:.3g} above tolerance")

    fine = [pair.to_energy(mu) for mu in fine_mu]
    coarse = [companion.to_energy(mu) for mu in coarse_mu]
    extrapolated = [f + (f - c) / 3.0 for f, c in zip(fine, coarse)]
    errors = [max(abs(f - c) / 3.0, 1e-15 * max(1.0, abs(f))) for f, c in zip(fine, coarse)]

    order = np.argsort(extrapolated)
    shape = (pair.grid.n_xi, pair.grid.n_eta)
    return GridSolution(
        energies=[extrapolated[i] for i in order],
        vectors=[vecs[:, i].reshape(shape) for i in order],
        grid_error=[errors[i] for i in order],
        fine_energies=[fine[i] for i in order],
        coarse_energies=[coarse[i] for i in order],
        residuals=[residuals[i] for i in order],
    )


def solve_grid(
    config: PhysicalConfig, m: int, grid: Optional[GridSpec] = None, count: int = 2, shift: Optional[float] = None
) -> GridSolution:
    pair = assemble(config, m, grid)
    logger.info(
        f"Oracle grid R={config.R}, m={m}: {pair.grid.n_xi}x{pair.grid.n_eta} cells, xi_max={pair.grid.xi_max:.4g}"
    )
    return lowest_eigenpairs(pair, count, shift)


def fine_energies(config: PhysicalConfig, m: int, sizes: List[int], count: int = 1) -> List[List[float]]:
    """Plain grid energies (no extrapolation) for a refinement sequence of square grids."""
    xi_max = grid_xi_max(config)
    result = []
    for n in sizes:
        pair = assemble(config, m, GridSpec(n_xi=n, n_eta=n, xi_max=xi_max))
        mus, _, _ = _eigenpairs(pair, count, default_shift(config))
        result.append([pair.to_energy(mu) for mu in mus])
    return result
