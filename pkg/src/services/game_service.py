# src/services/game_service.py
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Tuple

from ..constants import ErrorMessages
from ..core import analysis, dynamics, pontryagin, stochastic, strategies
from ..exceptions import ScenarioValidationError
from ..models import DisturbanceStats, Trajectory
from ..schemas import CaptureTimeResult, CheckReport, CompareSummary, Scenario, TheoremReport
from ..utils import reporting

logger = logging.getLogger(__name__)

@dataclass
class SimulationOutcome:
    trajectory: Trajectory
    report: TheoremReport

@dataclass
class ComparisonOutcome:
    stats: DisturbanceStats
    summary: CompareSummary

class GameService:
    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.output_dir = Path(scenario.output.dir)

    def check(self) -> CheckReport:
        return analysis.check_conditions(self.scenario.params, self.scenario.q0)

    def build_strategies(self) -> Tuple[strategies.DefenderStrategy, strategies.AttackerStrategy, strategies.ArrivalProfile]:
        return (
            strategies.build_defender(self.scenario.defender, self.scenario.simulation.tol),
            strategies.build_attacker(self.scenario.attacker),
            strategies.build_arrival(self.scenario.arrival),
        )

    def simulate(self) -> SimulationOutcome:
        """
        Plays the scenario and checks the run against the theorem bounds.
        """
        logger.info(
            f"Simulating '{self.scenario.name}': defender={self.scenario.defender.kind}, "
            f"attacker={self.scenario.attacker.kind}, arrival={self.scenario.arrival.kind}"
        )
        trajectory = dynamics.simulate_game(self.scenario, *self.build_strategies())
        report = analysis.verify_theorem(
            trajectory, self.scenario.q0, self.scenario.params, self.scenario.simulation.tol
        )
        return SimulationOutcome(trajectory=trajectory, report=report)

    def solve(self) -> CaptureTimeResult:
        solver = self.scenario.solver
        return pontryagin.min_capture_time(
            self.scenario.q0,
            self.scenario.params,
            pontryagin.DirectionGrid(solver.n_dirs),
            solver.tol_T,
            n_quad=solver.n_quad,
            horizon=solver.horizon,
        )

    def compare(self) -> ComparisonOutcome:
        params = self.scenario.stochastic
        if params is None:
            raise ScenarioValidationError("stochastic", ErrorMessages.STOCHASTIC_SECTION_MISSING)
        paths = stochastic.simulate_replications(params)
        stats = stochastic.disturbance_stats(paths, stochastic.fluid_mean_path(params), params.alignment)
        summary = CompareSummary(
            n_runs=stats.n_runs,
            horizon_slots=params.horizon_slots,
            alignment=params.alignment,
            bounded_mean_estimate=stats.bounded_mean_estimate,
            variance_slope=stats.variance_slope,
            variance_intercept=stats.variance_intercept,
            variance_r2=stats.variance_r2,
            fit_points=stats.fit_points,
            max_abs_z=stats.max_abs_z,
        )
        return ComparisonOutcome(stats=stats, summary=summary)

    # --- Output ---

    def _path(self, suffix: str) -> Path:
        return self.output_dir / f"{self.scenario.output.basename}{suffix}"

    def export_simulation(self, outcome: SimulationOutcome) -> Dict[str, Path]:
        files = {
            "csv": reporting.write_trajectory_csv(outcome.trajectory, self._path(".csv")),
            "report": reporting.write_json_report(
                self._path(".report.json"),
                report=outcome.report.model_dump(mode="json"),
                termination=reporting.termination_payload(outcome.trajectory),
                scenario=self.scenario.model_dump(mode="json"),
            ),
        }
        if self.scenario.output.svg:
            files["svg"] = reporting.render_trajectory_svg(
                outcome.trajectory, self._path(".svg"), self.scenario.name, self.scenario.params.q1_max
            )
        logger.info(f"Wrote simulation outputs: {', '.join(str(p) for p in files.values())}")
        return files

    def export_comparison(self, outcome: ComparisonOutcome) -> Dict[str, Path]:
        files = {
            "csv": reporting.write_frame_csv(outcome.stats.to_frame(), self._path(".compare.csv")),
            "report": reporting.write_json_report(
                self._path(".compare.json"),
                summary=outcome.summary.model_dump(mode="json"),
                scenario=self.scenario.model_dump(mode="json"),
            ),
        }
        logger.info(f"Wrote comparison outputs: {', '.join(str(p) for p in files.values())}")
        return files
