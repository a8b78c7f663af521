import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from twocenter.config import settings


class OdeKind(str, Enum):
    RADIAL = "radial"
    ANGULAR = "angular"


class Endpoint(str, Enum):
    LEFT = "-1"
    RIGHT = "+1"
    RADIAL = "1+"


class RunMode(str, Enum):
    NUMERIC = "numeric"
    ASYMPTOTIC = "asymptotic"
    BOTH = "both"
    ORACLE = "oracle"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class PointStatus(str, Enum):
    PENDING = "pending"
    PROCESSING = "processing"
    COMPLETED = "completed"
    FAILED = "failed"


class PhysicalConfig(BaseModel):
    """Problem instance: equal charges Z at distance R inside an oscillator of strength omega."""

    model_config = ConfigDict(frozen=True)

    Z: float = Field(..., ge=0.0, description="Charge of each center")
    omega: float = Field(..., ge=0.0, description="Oscillator strength")
    R: float = Field(..., gt=0.0, description="Intercenter distance")
    coulomb_limit: bool = Field(False, description="Allow omega = 0 (diagnostic only)")

    @model_validator(mode="after")
    def _confinement_present(self):
        if self.omega == 0.0 and not self.coulomb_limit:
            raise ValueError("omega must be positive outside the Coulomb-limit diagnostic mode")
        return self

    @classmethod
    def coulomb(cls, Z: float, R: float) -> "PhysicalConfig":
        return cls(Z=Z, omega=0.0, R=R, coulomb_limit=True)

    @property
    def floor(self) -> float:
        """Confinement floor omega^2 R^2 / 2."""
        return 0.5 * self.omega ** 2 * self.R ** 2

    @property
    def gamma_prime(self) -> float:
        return 0.25 * self.omega ** 2 * self.R ** 4

    @property
    def a(self) -> float:
        return 2.0 * self.Z * self.R

    def at(self, R: float) -> "PhysicalConfig":
        return self.model_copy(update={"R": R})


class QuantumNumbers(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=0, description="Radial node count")
    q: int = Field(..., ge=0, description="Angular node count")
    m: int = Field(..., ge=0, description="Modulus of the magnetic quantum number")

    @property
    def k(self) -> float:
        return self.q + (self.m + 1) / 2.0

    @property
    def s(self) -> float:
        return 4 * self.n + math.sqrt(self.m ** 2 + 3) + 2

    @property
    def tau(self) -> float:
        return (1 - self.m ** 2) / 4.0

    @property
    def N(self) -> int:
        return 2 * self.n + self.q + self.m


class ScaledParams(BaseModel):
    """Etalon-variable parameters at one trial energy (E' > 0 only)."""

    model_config = ConfigDict(frozen=True)

    E_prime: float
    p: float
    h: float
    alpha: float
    gamma: float
    a: float
    gamma_prime: float

    @field_validator("E_prime")
    @classmethod
    def _positive_shift(cls, v: float) -> float:
        if not v > 0.0:
            raise ValueError("shifted energy E' must be positive")
        return v

    @property
    def gamma_ode(self) -> float:
        """Coefficient standing in the h^4*gamma slot of the canonical equations."""
        return self.gamma_prime / self.h ** 4


class SpheroidalPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    xi: float = Field(..., ge=1.0)
    eta: float = Field(..., ge=-1.0, le=1.0)
    phi: float = Field(0.0, ge=0.0, lt=2.0 * math.pi)

    @property
    def x(self) -> float:
        return 1.0 + self.eta

    @property
    def t(self) -> float:
        return self.xi - 1.0

    def r1(self, R: float) -> float:
        return 0.5 * R * (self.xi + self.eta)

    def r2(self, R: float) -> float:
        return 0.5 * R * (self.xi - self.eta)


class SeriesControl(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_terms: int = Field(default_factory=lambda: settings.SERIES_MAX_TERMS, ge=1)
    rel_tol: float = Field(default_factory=lambda: settings.SERIES_REL_TOL, gt=0.0)
    overflow_guard: float = Field(default_factory=lambda: settings.SERIES_OVERFLOW_GUARD, gt=1.0)


class CanonicalOde(BaseModel):
    """Quasi-radial or quasi-angular u'' + Q u = 0, stored through the products the coefficient needs.

    p_sq = h^2/4, h_lambda = h*lambda, h_alpha = h*alpha, confinement = h^4*gamma.
    Keeping products instead of h lets the same equation describe E' <= 0.
    """

    model_config = ConfigDict(frozen=True)

    kind: OdeKind
    p_sq: float
    h_lambda: float
    h_alpha: float = 0.0
    confinement: float = Field(..., ge=0.0)
    m: int = Field(..., ge=0)

    @classmethod
    def canonical(
        cls, kind: OdeKind, h: float, lam: float, alpha: float, gamma: float, m: int
    ) -> "CanonicalOde":
        return cls(
            kind=kind,
            p_sq=0.25 * h * h,
            h_lambda=h * lam,
            h_alpha=h * alpha,
            confinement=h ** 4 * gamma,
            m=m,
        )

    @classmethod
    def physical(
        cls, kind: OdeKind, config: PhysicalConfig, E: float, h_lambda: float, m: int
    ) -> "CanonicalOde":
        return cls(
            kind=kind,
            p_sq=0.25 * config.R ** 2 * 2.0 * (E - config.floor),
            h_lambda=h_lambda,
            h_alpha=config.a if kind == OdeKind.RADIAL else 0.0,
            confinement=config.gamma_prime,
            m=m,
        )

    def with_lambda(self, h_lambda: float) -> "CanonicalOde":
        return self.model_copy(update={"h_lambda": h_lambda})


class Trajectory(BaseModel):
    """Sampled (u, u') with a per-sample log-magnitude factor: true value = value * exp(log_scale).

    Abscissae are in the integrator's local coordinate.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    abscissae: np.ndarray
    values: np.ndarray
    log_scale: np.ndarray
    nodes: int = 0

    @model_validator(mode="after")
    def _monotone(self):
        steps = np.diff(self.abscissae)
        if len(steps) and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValueError("trajectory abscissae must be strictly monotone")
        if not np.all(np.isfinite(self.log_scale)):
            raise ValueError("trajectory rescaling factors must be finite")
        return self

    @property
    def end(self) -> tuple:
        """(x, u, u', log_scale) at the last sample."""
        return (
            float(self.abscissae[-1]),
            float(self.values[-1, 0]),
            float(self.values[-1, 1]),
            float(self.log_scale[-1]),
        )


class SolverSettings(BaseModel):
    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(default_factory=lambda: settings.REL_TOL, gt=0.0)
    match_tol: float = Field(default_factory=lambda: settings.MATCH_TOL, gt=0.0)
    max_outer_iters: int = Field(default_factory=lambda: settings.MAX_OUTER_ITERS, gt=0)
    bracket_expansion: float = Field(default_factory=lambda: settings.BRACKET_EXPANSION, gt=1.0)
    endpoint_offset: float = Field(default_factory=lambda: settings.ENDPOINT_OFFSET, gt=0.0, le=1e-3)
    overflow_guard: float = Field(default_factory=lambda: settings.OVERFLOW_GUARD, gt=1.0)
    tail_depth: float = Field(default_factory=lambda: settings.TAIL_DEPTH, gt=0.0)
    xi_max_cap: float = Field(default_factory=lambda: settings.XI_MAX_CAP, gt=1.0)
    match_scale: float = Field(1.0, gt=0.0, description="Multiplier on the matching offset xi* - 1")

    @model_validator(mode="after")
    def _tolerances(self):
        if self.match_tol < self.rel_tol:
            raise ValueError("match_tol must not be tighter than rel_tol")
        return self


class AngularSolve(BaseModel):
    """Converged quasi-angular separation constant at one trial energy."""

    model_config = ConfigDict(frozen=True)

    h_lambda: float
    phase: float = Field(..., description="Pruefer phase at the midplane")
    nodes: int
    residual: float
    evaluations: int


class RadialMatch(BaseModel):
    """Quasi-radial matching at xi*: value = (theta_left - theta_right)/pi - n vanishes at an eigenvalue."""

    model_config = ConfigDict(frozen=True)

    value: float
    wronskian: float
    nodes: int
    xi_match: float
    xi_max: float


class Eigensolution(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    E: float
    lambda_: Optional[float] = Field(None, description="Canonical lambda; None when E' <= 0")
    h_lambda: float
    nodes_radial: int
    nodes_angular: int
    xi: np.ndarray
    u: np.ndarray
    eta: np.ndarray
    v: np.ndarray
    residuals: Dict[str, float]
    iterations: int
    xi_match: float
    xi_max: float


class AsymptoticEval(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    order_included: int
    remainder_order: int
    beta: float = 0.0
    delta: float = 0.0

    @model_validator(mode="after")
    def _orders(self):
        if self.remainder_order <= self.order_included:
            raise ValueError("remainder order must exceed the included order")
        return self


class EnergyExpansion(BaseModel):
    model_config = ConfigDict(frozen=True)

    E0: float = Field(..., gt=0.0)
    E1: float
    E2: float
    omega_term_included: bool = True
    literal: bool = True


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_xi: int = Field(96, ge=16)
    n_eta: int = Field(96, ge=16)
    xi_max: Optional[float] = Field(None, gt=1.0)
    stretching: float = Field(2.0, ge=1.0)

    def halved(self) -> "GridSpec":
        return self.model_copy(update={"n_xi": self.n_xi // 2, "n_eta": self.n_eta // 2})


class OperatorPair(BaseModel):
    """Discrete (H, S) on cell centres; eigenvalues are mu = R^2 (E - floor) / 2."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    H: Any
    S: Any
    xi: np.ndarray
    eta: np.ndarray
    config: PhysicalConfig
    m: int
    grid: GridSpec

    def to_energy(self, mu: float) -> float:
        return 2.0 * mu / self.config.R ** 2 + self.config.floor

    def to_mu(self, E: float) -> float:
        return 0.5 * self.config.R ** 2 * (E - self.config.floor)


class FixtureRecord(BaseModel):
    """One oracle line: Z omega R m index E gridError."""

    model_config = ConfigDict(frozen=True)

    Z: float
    omega: float
    R: float
    m: int = Field(..., ge=0)
    index: int = Field(..., ge=0)
    E: float
    grid_error: float = Field(..., gt=0.0)


class GridSolution(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    energies: List[float]
    vectors: List[np.ndarray]
    grid_error: List[float]
    fine_energies: List[float]
    coarse_energies: List[float]
    residuals: List[float]

    @model_validator(mode="after")
    def _ordered(self):
        if any(b < a for a, b in zip(self.energies, self.energies[1:])):
            raise ValueError("grid energies must be sorted ascending")
        if any(not e > 0.0 for e in self.grid_error):
            raise ValueError("grid error estimates must be positive")
        return self


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: RunMode = RunMode.BOTH
    config: PhysicalConfig
    qn: QuantumNumbers
    r_min: float = Field(..., gt=0.0)
    r_max: float = Field(..., gt=0.0)
    r_steps: int = Field(..., ge=1)
    order: int = Field(0, ge=0, le=2)
    output_path: Path = Field(default_factory=lambda: settings.OUTPUT_DIR / "run.csv")
    format: OutputFormat = OutputFormat.CSV
    literal: bool = Field(default_factory=lambda: settings.LITERAL_FORMULAS)
    tol: float = Field(default_factory=lambda: settings.MATCH_TOL, gt=0.0)
    continuation: bool = True
    fixtures: Optional[Path] = None
    workers: int = Field(default_factory=lambda: settings.MAX_WORKERS, ge=1)

    @model_validator(mode="after")
    def _range(self):
        if self.r_max < self.r_min:
            raise ValueError("r_max must be >= r_min")
        return self

    def r_grid(self) -> List[float]:
        if self.r_steps == 1:
            return [float(self.r_min)]
        return [float(r) for r in np.linspace(self.r_min, self.r_max, self.r_steps)]


class ResultRow(BaseModel):
    R: float
    E_numeric: Optional[float] = None
    lambda_numeric: Optional[float] = None
    E_asym: Optional[float] = None
    lambda_eta_asym: Optional[float] = None
    lambda_xi_asym: Optional[float] = None
    resid_E: Optional[float] = None
    resid_lambda: Optional[float] = None
    nodes_radial: Optional[int] = None
    nodes_angular: Optional[int] = None
    solver_iterations: Optional[int] = None
    h_lambda_numeric: Optional[float] = None
    h_lambda_harmonic: Optional[float] = None
    corr_U: Optional[float] = None
    corr_V: Optional[float] = None
    nodes_U_asym: Optional[int] = None
    nodes_V_asym: Optional[int] = None
    status: PointStatus = PointStatus.COMPLETED
    message: str = ""


class SlopeEstimate(BaseModel):
    quantity: str
    slope: Optional[float] = None
    at_floor: bool = False
    points: int = 0

    def describe(self) -> str:
        if self.at_floor:
            return f"{self.quantity}: at tolerance floor"
        if self.slope is None:
            return f"{self.quantity}: n/a ({self.points} usable points)"
        return f"{self.quantity}: slope {self.slope:+.3f} over {self.points} points"


class EnergyDiagnosticRow(BaseModel):
    R: float
    gap: float = Field(..., description="E_numeric - omega^2 R^2/2 - E0")
    printed: Optional[float] = None
    multipole: float


class SignRow(BaseModel):
    R: float
    numeric: Optional[int] = None
    eta_asym: Optional[int] = None
    xi_asym: Optional[int] = None


class WaveComparison(BaseModel):
    """Asymptotic against numeric wavefunctions: |overlap| of the normalized shapes and asymptotic node counts."""

    corr_radial: Optional[float] = None
    corr_angular: Optional[float] = None
    nodes_radial: Optional[int] = None
    nodes_angular: Optional[int] = None


class WaveRow(WaveComparison):
    R: float


class Report(BaseModel):
    source: str
    slopes: List[SlopeEstimate]
    energy_table: List[EnergyDiagnosticRow] = []
    e1_fit: Optional[float] = None
    e2_fit: Optional[float] = None
    e1_printed: Optional[float] = None
    e2_printed: Optional[float] = None
    sign_table: List[SignRow] = []
    wave_table: List[WaveRow] = []
