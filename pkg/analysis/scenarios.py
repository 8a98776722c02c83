"""
Scenario overrides and single-scenario runs
"""
import logging
import os
import re
from dataclasses import dataclass, fields, replace
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from analysis.metrics import ScenarioMetrics, ScenarioReport, price_series_frame, unusable_report
from core.exceptions import ConfigError, ParameterError, PlanningError
from core.exporters import write_csv
from core.models import SystemSpec
from core.timeslices import ReducedTimeline
from formulation.assembler import build_problem
from formulation.problem import BuildOptions, PlanningProblem
from solver.engine import solve
from solver.mps import export_mps
from solver.simplex import SolverOptions
from solver.solution import Solution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScenarioSpec:
    """Overrides applied on top of the base instance; None leaves the catalog value"""
    co2_price: Optional[float] = None
    electrolyzer_capex: Optional[float] = None
    g2p_capex: Optional[float] = None
    pipeline_capex_multiplier: float = 1.0
    fcev_penetration_multiplier: float = 1.0
    coupling_enabled: bool = True

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> 'ScenarioSpec':
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"Unknown scenario fields {unknown}; expected a subset of {sorted(known)}")
        return cls(**{k: _coerce(k, v) for k, v in values.items()})

    def check(self):
        if self.pipeline_capex_multiplier < 0 or self.fcev_penetration_multiplier < 0:
            raise ParameterError("scenario multipliers must be non-negative")
        for name in ('co2_price', 'electrolyzer_capex', 'g2p_capex'):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ParameterError(f"{name} must be non-negative, got {value}")

    def coordinates(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}

    @property
    def key(self) -> str:
        return ','.join(f'{name}={_fmt(value)}' for name, value in self.coordinates().items())

    @property
    def slug(self) -> str:
        """Key rewritten as a file name"""
        return re.sub(r'[^A-Za-z0-9.-]+', '_', self.key.replace('=', '-'))

    def with_(self, **changes) -> 'ScenarioSpec':
        return replace(self, **{k: _coerce(k, v) for k, v in changes.items()})


def _coerce(name: str, value: Any) -> Any:
    if name == 'coupling_enabled':
        if isinstance(value, str):
            return value.strip().lower() in ('1', 'true', 'yes', 'on')
        return bool(value)
    return None if value is None else float(value)


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return repr(value) if isinstance(value, float) else str(value)


def apply_overrides(base: SystemSpec, s: ScenarioSpec) -> SystemSpec:
    """
    New SystemSpec with the scenario's overrides; ``base`` is left untouched

    Args:
        base: Validated base instance
        s: Scenario overrides

    Returns:
        SystemSpec sharing every unchanged object with ``base``
    """
    s.check()
    policy = {'coupling_enabled': s.coupling_enabled}
    if s.co2_price is not None:
        policy['co2_price'] = s.co2_price

    techs = []
    for tech in base.gen_techs:
        if tech.is_electrolyzer and s.electrolyzer_capex is not None:
            tech = replace(tech, capex_per_unit_power=s.electrolyzer_capex)
        elif tech.is_g2p and s.g2p_capex is not None:
            tech = replace(tech, capex_per_unit_power=s.g2p_capex)
        techs.append(tech)

    pipes = tuple(replace(p, capex_per_mile_per_unit=p.capex_per_mile_per_unit * s.pipeline_capex_multiplier)
                  for p in base.pipeline_types)
    zones = base.zones
    if s.fcev_penetration_multiplier != 1.0:
        zones = tuple(replace(z, demand_h2=np.asarray(z.demand_h2, dtype=float) * s.fcev_penetration_multiplier)
                      for z in base.zones)
    return replace(base, zones=zones, gen_techs=tuple(techs), pipeline_types=pipes).with_policy(**policy)


def scale_h2_demand(timeline: ReducedTimeline, multiplier: float) -> ReducedTimeline:
    if multiplier == 1.0:
        return timeline
    return replace(timeline, demand_h2={z: arr * multiplier for z, arr in timeline.demand_h2.items()})


class ScenarioRunner:
    """Builds, solves and reports scenarios over one base instance and one timeline"""

    def __init__(self, base: SystemSpec, timeline: ReducedTimeline, build_options: Optional[BuildOptions] = None,
                 solver_options: Optional[SolverOptions] = None, artifact_dir: Optional[str] = None,
                 export_mps: bool = False):
        """
        Args:
            base: Validated base instance
            timeline: Representative weeks shared by every scenario
            build_options: Storage linkage and SMR flexibility
            solver_options: Backend and tolerances
            artifact_dir: Where price series and MPS files go; nothing is written when None
            export_mps: Write one MPS file per scenario into ``artifact_dir``
        """
        self.base = base
        self.timeline = timeline
        self.build_options = build_options or BuildOptions()
        self.solver_options = solver_options or SolverOptions()
        self.artifact_dir = artifact_dir
        self.export_mps = export_mps

    def build(self, s: ScenarioSpec) -> Tuple[SystemSpec, ReducedTimeline, PlanningProblem]:
        spec = apply_overrides(self.base, s)
        timeline = scale_h2_demand(self.timeline, s.fcev_penetration_multiplier)
        return spec, timeline, build_problem(spec, timeline, self.build_options)

    def evaluate(self, s: ScenarioSpec) -> Tuple[ScenarioReport, PlanningProblem, Solution]:
        spec, timeline, problem = self.build(s)
        if self.artifact_dir and self.export_mps:
            export_mps(problem, os.path.join(self.artifact_dir, 'mps', s.slug + '.mps'))
        solution = solve(problem, self.solver_options)
        if not solution.is_optimal:
            logger.warning("Scenario %s: solver returned %s", s.key, solution.status)
            return unusable_report(s.key, solution.status, s.coordinates(), solution.message), problem, solution
        report = ScenarioMetrics(spec, timeline, problem, solution).report(s.key, s.coordinates())
        if self.artifact_dir:
            write_csv(price_series_frame(problem, solution),
                      os.path.join(self.artifact_dir, 'prices', s.slug + '.csv'), float_format='%.10g')
        logger.info("Scenario %s: objective %.6g, P2H %.4g MWh, PfH %.4g MWh",
                    s.key, report.objective, report.p2h_mwh, report.pfh_mwh)
        return report, problem, solution

    def run_scenario(self, s: ScenarioSpec) -> ScenarioReport:
        return self.evaluate(s)[0]


def run_scenario(base: SystemSpec, s: ScenarioSpec, timeline: ReducedTimeline,
                 build_options: Optional[BuildOptions] = None,
                 solver_options: Optional[SolverOptions] = None) -> ScenarioReport:
    """One-off scenario run; failures come back as an unusable report"""
    try:
        return ScenarioRunner(base, timeline, build_options, solver_options).run_scenario(s)
    except PlanningError as e:
        logger.error("Scenario %s failed: %s", s.key, e)
        return unusable_report(s.key, 'error', s.coordinates(), str(e))
