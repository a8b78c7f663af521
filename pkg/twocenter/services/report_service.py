"""Residual-order summary of run outputs: convergence slopes, energy-coefficient and lambda-sign diagnostics."""

import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from twocenter.errors import InsufficientPoints, ZeroCharge
from twocenter.models import (
    EnergyDiagnosticRow,
    PhysicalConfig,
    PointStatus,
    QuantumNumbers,
    Report,
    ResultRow,
    SignRow,
    SlopeEstimate,
    WaveRow,
)
from twocenter.services import asymptotics
from twocenter.utils import helpers

logger = logging.getLogger(__name__)

MIN_POINTS = 3
FLOOR_TOL = 1e-8
SHAPE_CORRELATION = 0.99


def _sign(value: Optional[float]) -> Optional[int]:
    if value is None:
        return None
    return int(math.copysign(1, value)) if value != 0.0 else 0


def residual_slope(quantity: str, R: Sequence[float], resid: Sequence[Optional[float]], scale: Sequence[float]) -> SlopeEstimate:
    """Log-log slope; residuals all below FLOOR_TOL * scale count as converged to the floor."""
    pairs = [(r, e, s) for r, e, s in zip(R, resid, scale) if e is not None and math.isfinite(e)]
    if not pairs:
        return SlopeEstimate(quantity=quantity)
    if all(e <= FLOOR_TOL * max(1.0, abs(s)) for _, e, s in pairs):
        return SlopeEstimate(quantity=quantity, at_floor=True, points=len(pairs))

    usable = [(r, e) for r, e, _ in pairs if e > 0.0]
    if len(usable) < 2:
        return SlopeEstimate(quantity=quantity, points=len(usable))
    xs, ys = zip(*usable)
    return SlopeEstimate(quantity=quantity, slope=helpers.fit_slope(xs, ys), points=len(usable))


def _energy_table(rows: List[ResultRow], meta: dict) -> Report:
    partial = Report(source="", slopes=[])
    if not meta or "Z" not in meta:
        return partial

    qn = QuantumNumbers(n=meta["n"], q=meta["q"], m=meta["m"])
    omega, Z = meta["omega"], meta["Z"]
    if omega <= 0.0:
        return partial
    E0 = asymptotics.energy_e0(qn, omega)

    printed = None
    if Z > 0.0:
        any_config = PhysicalConfig(Z=Z, omega=omega, R=1.0)
        try:
            printed = asymptotics.energy_coefficients(qn, any_config, E0, literal=True)
        except ZeroCharge:
            printed = None

    table = []
    for row in rows:
        if row.E_numeric is None:
            continue
        gap = row.E_numeric - 0.5 * omega ** 2 * row.R ** 2 - E0
        table.append(EnergyDiagnosticRow(
            R=row.R,
            gap=gap,
            printed=None if printed is None else printed.E1 / row.R + printed.E2 / row.R ** 2,
            multipole=-4.0 * Z / row.R,
        ))

    e1_fit = e2_fit = None
    if len(table) >= 2:
        A = np.array([[1.0 / t.R, 1.0 / t.R ** 2] for t in table])
        b = np.array([t.gap for t in table])
        (e1_fit, e2_fit), *_ = np.linalg.lstsq(A, b, rcond=None)
        e1_fit, e2_fit = float(e1_fit), float(e2_fit)

    return Report(
        source="",
        slopes=[],
        energy_table=table,
        e1_fit=e1_fit,
        e2_fit=e2_fit,
        e1_printed=None if printed is None else printed.E1,
        e2_printed=None if printed is None else printed.E2,
    )


def build_report(rows: List[ResultRow], meta: dict, source: str = "") -> Report:
    done = [r for r in rows if r.status == PointStatus.COMPLETED]
    if len(done) < MIN_POINTS:
        raise InsufficientPoints(f"{source or 'input'}: {len(done)} completed R-points, need {MIN_POINTS}")

    R = [r.R for r in done]
    scale_E = [r.E_numeric if r.E_numeric is not None else 1.0 for r in done]
    scale_lam = [abs(r.lambda_numeric) if r.lambda_numeric is not None else 1.0 for r in done]
    harmonic = [
        abs(r.h_lambda_numeric - r.h_lambda_harmonic) / abs(r.h_lambda_numeric)
        if r.h_lambda_numeric and r.h_lambda_harmonic is not None else None
        for r in done
    ]
    slopes = [
        residual_slope("E", R, [r.resid_E for r in done], scale_E),
        residual_slope("lambda", R, [r.resid_lambda for r in done], scale_lam),
        residual_slope("h*lambda (harmonic, relative)", R, harmonic, [1.0] * len(done)),
    ]

    energy = _energy_table(done, meta)
    signs = [
        SignRow(R=r.R, numeric=_sign(r.lambda_numeric), eta_asym=_sign(r.lambda_eta_asym), xi_asym=_sign(r.lambda_xi_asym))
        for r in done
    ]
    waves = [
        WaveRow(R=r.R, corr_radial=r.corr_U, corr_angular=r.corr_V, nodes_radial=r.nodes_U_asym, nodes_angular=r.nodes_V_asym)
        for r in done
        if r.corr_U is not None or r.corr_V is not None
    ]
    return energy.model_copy(update={"source": source, "slopes": slopes, "sign_table": signs, "wave_table": waves})


def report(paths: Sequence[Path]) -> List[Report]:
    reports = []
    for path in paths:
        rows, meta = helpers.read_results(Path(path))
        reports.append(build_report(rows, meta, str(path)))
        logger.info(f"Report built for {path} ({len(rows)} rows)")
    return reports


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.10g}"


def _corr(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return f"{value:.6f}" + ("*" if value < SHAPE_CORRELATION else "")


def _count(value: Optional[int]) -> str:
    return "-" if value is None else str(value)


def render(rep: Report) -> str:
    lines = [f"== {rep.source}", "Convergence orders:"]
    lines += [f"  {s.describe()}" for s in rep.slopes]

    if rep.energy_table:
        lines.append("Energy coefficients (gap = E - omega^2 R^2/2 - E0):")
        lines.append(f"  printed E1={_fmt(rep.e1_printed)} E2={_fmt(rep.e2_printed)}; "
                     f"fitted E1={_fmt(rep.e1_fit)} E2={_fmt(rep.e2_fit)}; multipole E1=-4Z E2=0")
        lines.append(f"  {'R':>10} {'gap':>18} {'printed':>18} {'multipole':>18}")
        for t in rep.energy_table:
            lines.append(f"  {t.R:>10.5g} {_fmt(t.gap):>18} {_fmt(t.printed):>18} {_fmt(t.multipole):>18}")

    if rep.sign_table:
        lines.append("Lambda sign table (numeric / eta expansion / xi expansion):")
        for s in rep.sign_table:
            marks = ["?" if v is None else ("+" if v > 0 else "-" if v < 0 else "0") for v in (s.numeric, s.eta_asym, s.xi_asym)]
            lines.append(f"  R={s.R:<10.5g} {' / '.join(marks)}")

    if rep.wave_table:
        lines.append(f"Wavefunction shape vs asymptotics (|overlap|, asymptotic nodes; * below {SHAPE_CORRELATION}):")
        lines.append(f"  {'R':>10} {'U':>14} {'V':>14} {'nodes U':>8} {'nodes V':>8}")
        for w in rep.wave_table:
            lines.append(
                f"  {w.R:>10.5g} {_corr(w.corr_radial):>14} {_corr(w.corr_angular):>14} "
                f"{_count(w.nodes_radial):>8} {_count(w.nodes_angular):>8}"
            )
    return "\n".join(lines)
