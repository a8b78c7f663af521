import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

from twocenter.config import settings
from twocenter.errors import NonPositiveShiftedEnergy, NumericalError, TwoCenterError, ZeroCharge
from twocenter.models import (
    Eigensolution,
    FixtureRecord,
    GridSolution,
    OutputFormat,
    PhysicalConfig,
    PointStatus,
    QuantumNumbers,
    ResultRow,
    RunConfig,
    RunMode,
    SolverSettings,
)
from twocenter.services import asymptotics, eigensolver, oracle_grid
from twocenter.services.params import scale_parameters
from twocenter.services.task_manager import PointLedger
from twocenter.utils import helpers

logger = logging.getLogger(__name__)


def solve_point(qn: QuantumNumbers, st: SolverSettings, config: PhysicalConfig) -> Tuple[float, Optional[Eigensolution], str]:
    """One independent R-point; failures come back as messages so nothing unpicklable crosses processes"""
    try:
        return config.R, eigensolver.solve_state(qn, config, st), ""
    except NumericalError as e:
        logger.error(f"R={config.R}: {e}")
        return config.R, None, str(e)


def grid_point(m: int, config: PhysicalConfig) -> Tuple[float, Optional[GridSolution], str]:
    try:
        return config.R, oracle_grid.solve_grid(config, m, count=2), ""
    except NumericalError as e:
        logger.error(f"R={config.R}: oracle failed: {e}")
        return config.R, None, str(e)


class RunService:

    def _map(self, work: Callable, configs: Sequence[PhysicalConfig], workers: int) -> list:
        """Independent points in worker processes; one worker or one point stays in-process"""
        if workers <= 1 or len(configs) <= 1:
            return [work(config) for config in configs]
        with ProcessPoolExecutor(max_workers=min(workers, len(configs))) as pool:
            return list(pool.map(work, configs))

    def _solver_settings(self, rc: RunConfig) -> SolverSettings:
        rel_tol = min(settings.REL_TOL, rc.tol)
        return SolverSettings(match_tol=rc.tol, rel_tol=rel_tol)

    def _asymptotic_fields(self, rc: RunConfig, R: float, E_at: Optional[float]) -> dict:
        """E_asym at the requested order plus lambda expansions at E_at (defaults to E_asym)"""
        config = rc.config.at(R)
        fields = {}
        try:
            fields["E_asym"] = asymptotics.energy_asym(rc.qn, config, R, rc.order, rc.literal)
        except ZeroCharge:
            fields["E_asym"] = asymptotics.energy_asym(rc.qn, config, R, 0)
            logger.info(f"R={R}: Z=0 keeps the energy expansion at order 0")

        E = fields["E_asym"] if E_at is None else E_at
        try:
            sp = scale_parameters(config, E)
        except NonPositiveShiftedEnergy:
            logger.info(f"R={R}: E'<=0, no lambda expansions")
            return fields
        fields["lambda_eta_asym"] = asymptotics.lambda_eta_asym(rc.qn, sp).value
        fields["lambda_xi_asym"] = asymptotics.lambda_xi_asym(rc.qn, sp).value
        fields["h_lambda_harmonic"] = asymptotics.harmonic_lambda(rc.qn, config, E)
        return fields

    @staticmethod
    def _numeric_fields(solution: Eigensolution) -> dict:
        return {
            "E_numeric": solution.E,
            "lambda_numeric": solution.lambda_,
            "h_lambda_numeric": solution.h_lambda,
            "nodes_radial": solution.nodes_radial,
            "nodes_angular": solution.nodes_angular,
            "solver_iterations": solution.iterations,
        }

    def _numeric(self, rc: RunConfig, ledger: PointLedger):
        st = self._solver_settings(rc)
        grid = rc.r_grid()
        for R in grid:
            ledger.update_point(R, status=PointStatus.PROCESSING, message="Solving")

        if rc.continuation:
            results = eigensolver.energy_curve(rc.qn, rc.config, grid, st)
        else:
            results = self._map(partial(solve_point, rc.qn, st), [rc.config.at(R) for R in grid], rc.workers)

        for R, solution, message in results:
            if solution is None:
                ledger.update_point(R, status=PointStatus.FAILED, message=f"solver failed: {message}")
                continue
            fields = self._numeric_fields(solution)
            if rc.mode == RunMode.BOTH:
                fields.update(self._asymptotic_fields(rc, R, solution.E))
                fields["resid_E"] = abs(solution.E - fields["E_asym"])
                if solution.lambda_ is not None and fields.get("lambda_eta_asym") is not None:
                    fields["resid_lambda"] = abs(solution.lambda_ - fields["lambda_eta_asym"])
                fields.update(self._wave_fields(rc, solution, R))
            ledger.update_point(R, status=PointStatus.COMPLETED, message="ok", **fields)

    @staticmethod
    def _wave_fields(rc: RunConfig, solution: Eigensolution, R: float) -> dict:
        waves = asymptotics.compare_waves(solution, rc.qn, rc.config.at(R), rc.literal)
        return {
            "corr_U": waves.corr_radial,
            "corr_V": waves.corr_angular,
            "nodes_U_asym": waves.nodes_radial,
            "nodes_V_asym": waves.nodes_angular,
        }

    def _asymptotic(self, rc: RunConfig, ledger: PointLedger):
        for R in rc.r_grid():
            try:
                fields = self._asymptotic_fields(rc, R, None)
                ledger.update_point(R, status=PointStatus.COMPLETED, message="ok", **fields)
            except TwoCenterError as e:
                ledger.update_point(R, status=PointStatus.FAILED, message=str(e))

    def oracle_fixtures(
        self, config: PhysicalConfig, m: int, radii: Sequence[float], workers: int = 1, ledger: Optional[PointLedger] = None
    ) -> List[FixtureRecord]:
        """Two lowest grid energies with Richardson error bars at each R"""
        records = []
        for R, sol, message in self._map(partial(grid_point, m), [config.at(R) for R in radii], workers):
            if sol is None:
                if ledger is not None:
                    ledger.update_point(R, status=PointStatus.FAILED, message=message)
                continue
            for index, (E, err) in enumerate(zip(sol.energies, sol.grid_error)):
                records.append(FixtureRecord(Z=config.Z, omega=config.omega, R=R, m=m, index=index, E=E, grid_error=err))
            if ledger is not None:
                ledger.update_point(
                    R, status=PointStatus.COMPLETED, message="oracle",
                    E_numeric=sol.energies[0], resid_E=sol.grid_error[0],
                )
        return records

    def _oracle(self, rc: RunConfig, ledger: PointLedger) -> List[FixtureRecord]:
        records = self.oracle_fixtures(rc.config, rc.qn.m, rc.r_grid(), rc.workers, ledger)
        helpers.write_fixtures(records, rc.fixtures or settings.FIXTURE_PATH)
        return records

    def metadata(self, rc: RunConfig) -> dict:
        return {
            "mode": rc.mode.value,
            "Z": rc.config.Z,
            "omega": rc.config.omega,
            "n": rc.qn.n,
            "q": rc.qn.q,
            "m": rc.qn.m,
            "order": rc.order,
            "literal_formulas": rc.literal,
            "wave2_log_term": "ln 2" if rc.literal else "ln(2(t+1)/t)",
            "radial_prefactor": "y^(-1/2)" if rc.literal else "y'^(-1/2)",
            "energy_coefficients": "printed" if rc.literal else "multipole",
            "beta": settings.BETA,
            "delta": settings.DELTA,
            "tol": rc.tol,
            "continuation": rc.continuation,
        }

    def run(self, rc: RunConfig) -> Tuple[List[ResultRow], int]:
        """Compute every R-point, write the output file and return (rows, exit code)"""
        ledger = PointLedger()
        for R in rc.r_grid():
            ledger.create_point(R)

        logger.info(f"Run mode={rc.mode.value} over {rc.r_steps} R-points in [{rc.r_min}, {rc.r_max}]")
        if rc.mode in (RunMode.NUMERIC, RunMode.BOTH):
            self._numeric(rc, ledger)
        elif rc.mode == RunMode.ASYMPTOTIC:
            self._asymptotic(rc, ledger)
        else:
            self._oracle(rc, ledger)

        rows = ledger.rows()
        self.write(rows, rc)

        failed = ledger.failed()
        if failed:
            logger.error(f"{len(failed)} R-point(s) failed: {failed}")
            return rows, 2
        return rows, 0

    def write(self, rows: List[ResultRow], rc: RunConfig):
        path = Path(rc.output_path)
        meta = self.metadata(rc)
        if rc.format == OutputFormat.JSON:
            helpers.write_json(rows, path, meta)
        else:
            helpers.write_csv(rows, path)
            helpers.write_metadata(path, meta)


# Global service instance
run_service = RunService()
