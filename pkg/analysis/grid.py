"""
Scenario grids: Cartesian products of overrides run concurrently, plus the
tidy and panel CSVs built from their reports.
"""
import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence

import pandas as pd

from analysis.coupling import CouplingComparison, compare_reports
from analysis.metrics import ScenarioReport, unusable_report
from analysis.regime import classify_ratio
from analysis.scenarios import ScenarioRunner, ScenarioSpec
from core.config import Config
from core.duckdb_manager import DuckDBManager
from core.exceptions import PlanningError
from core.exporters import write_csv, write_json

logger = logging.getLogger(__name__)


def expand_axes(axes: Mapping[str, Sequence[Any]], base: Optional[Mapping[str, Any]] = None) -> List[ScenarioSpec]:
    """
    Cartesian product of the axes on top of ``base`` overrides

    Axes vary in the order given, last axis fastest. Coordinates that collapse
    to the same scenario are kept once, with a warning.
    """
    base = dict(base or {})
    names = list(axes)
    out: List[ScenarioSpec] = []
    seen = set()
    for values in itertools.product(*(axes[n] for n in names)):
        s = ScenarioSpec.from_mapping({**base, **dict(zip(names, values))})
        if s.key in seen:
            logger.warning("Duplicate scenario %s dropped from the grid", s.key)
            continue
        seen.add(s.key)
        out.append(s)
    return out


@dataclass
class GridResult:
    scenarios: List[ScenarioSpec]
    reports: Dict[str, ScenarioReport] = field(default_factory=dict)
    comparisons: Dict[str, CouplingComparison] = field(default_factory=dict)
    failures: Dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures and all(r.usable for r in self.reports.values())

    def ordered_reports(self) -> List[ScenarioReport]:
        return [self.reports[s.key] for s in self.scenarios if s.key in self.reports]

    def tidy(self) -> pd.DataFrame:
        rows = [row for report in self.ordered_reports() for row in report.tidy_rows()]
        return pd.DataFrame(rows, columns=Config.TIDY_COLUMNS)

    def scenario_frame(self) -> pd.DataFrame:
        records = []
        for s in self.scenarios:
            report = self.reports.get(s.key)
            records.append({'scenario_key': s.key, **s.coordinates(),
                            'status': report.status if report else 'error',
                            'usable': bool(report and report.usable)})
        frame = pd.DataFrame.from_records(records)
        for name in ('co2_price', 'electrolyzer_capex', 'g2p_capex'):
            if name in frame:
                frame[name] = frame[name].astype(float)
        return frame

    def comparison_frame(self) -> pd.DataFrame:
        rows = [self.comparisons[s.key].as_dict() for s in self.scenarios if s.key in self.comparisons]
        return pd.DataFrame(rows)


def _evaluate(runner: ScenarioRunner, s: ScenarioSpec, decoupled: bool):
    try:
        coupled = runner.run_scenario(s)
        other = runner.run_scenario(s.with_(coupling_enabled=False)) if decoupled and s.coupling_enabled else None
        return coupled, other, None
    except PlanningError as e:
        return None, None, str(e)


def run_grid(runner: ScenarioRunner, axes: Mapping[str, Sequence[Any]], base: Optional[Mapping[str, Any]] = None,
             jobs: int = 1, decoupled_comparison: bool = False,
             reference: Optional[Mapping[str, Any]] = None) -> GridResult:
    """
    Evaluate every scenario of the grid

    Args:
        runner: Shared runner (base instance, timeline, options)
        axes: Axis name -> list of values
        base: Overrides applied to every grid point
        jobs: Worker threads
        decoupled_comparison: Also solve each coupled point without conversion
        reference: Overrides of the reference case that normalizes emission
            reductions; decoupled emissions are used when None

    Returns:
        GridResult keyed by scenario key; failed scenarios are recorded, not raised
    """
    scenarios = expand_axes(axes, base)
    result = GridResult(scenarios=scenarios)
    logger.info("Running %d scenarios on %d worker(s)", len(scenarios), jobs)

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [pool.submit(_evaluate, runner, s, decoupled_comparison) for s in scenarios]
        outcomes = [f.result() for f in futures]

    reference_emissions = None
    if decoupled_comparison and reference is not None:
        ref = runner.run_scenario(ScenarioSpec.from_mapping(dict(reference)))
        reference_emissions = ref.total_emissions if ref.usable else None

    # Fold in coordinate order regardless of completion order
    for s, (coupled, decoupled, error) in zip(scenarios, outcomes):
        if error is not None:
            logger.error("Scenario %s failed: %s", s.key, error)
            result.failures[s.key] = error
            result.reports[s.key] = unusable_report(s.key, 'error', s.coordinates(), error)
            continue
        result.reports[s.key] = coupled
        if not coupled.usable:
            result.failures[s.key] = f"solver status {coupled.status}"
        if decoupled is not None:
            result.comparisons[s.key] = compare_reports(coupled, decoupled, reference_emissions)
    logger.info("Grid finished: %d ok, %d failed", len(scenarios) - len(result.failures), len(result.failures))
    return result


# -- Outputs ----------------------------------------------------------------

def regime_frame(result: GridResult, factor: float = Config.REGIME_FACTOR) -> pd.DataFrame:
    rows = []
    for report in result.ordered_reports():
        if not report.usable:
            continue
        ratio = report.p2h_mwh / report.pfh_mwh if report.pfh_mwh > 0 else float('inf')
        rows.append({'scenario_key': report.key, **report.coordinates, 'p2h_mwh': report.p2h_mwh,
                     'pfh_mwh': report.pfh_mwh, 'ratio': ratio,
                     'regime': classify_ratio(report.p2h_mwh, report.pfh_mwh, factor)})
    return pd.DataFrame(rows)


def transport_frame(result: GridResult) -> pd.DataFrame:
    rows = []
    for report in result.ordered_reports():
        if not report.usable:
            continue
        total = sum(report.h2_transport.values())
        for mode, tonnes in sorted(report.h2_transport.items()):
            rows.append({'scenario_key': report.key, **report.coordinates, 'mode': mode, 'tonne_per_year': tonnes,
                         'share': tonnes / total if total > 0 else 0.0})
    return pd.DataFrame(rows)


def write_grid_outputs(result: GridResult, out_dir: str, pivots: Sequence[Mapping[str, str]] = ()) -> Dict[str, str]:
    """
    Write reports, tidy results, panels and pivots under ``out_dir``

    Returns:
        Artifact name -> path
    """
    paths: Dict[str, str] = {}
    for report in result.ordered_reports():
        s = next(s for s in result.scenarios if s.key == report.key)
        path = os.path.join(out_dir, 'reports', s.slug + '.json')
        write_json(report.as_dict(), path)
    paths['reports'] = os.path.join(out_dir, 'reports')

    tidy = result.tidy()
    scenarios = result.scenario_frame()
    for name, frame in (('results', tidy), ('scenarios', scenarios)):
        paths[name] = os.path.join(out_dir, f'{name}.csv')
        write_csv(frame, paths[name], float_format='%.10g')

    store = DuckDBManager()
    try:
        store.load_results(tidy, scenarios)
        mix = store.section_long(['capacity', 'generation'])
        panels = {
            'headline': store.metrics_wide(list(Config.HEADLINE_METRICS)),
            'cost_breakdown': store.metrics_wide(store.metric_names('cost.')),
            'mix': mix,
            'regime_map': regime_frame(result),
            'transport_by_mode': transport_frame(result),
        }
        if result.comparisons:
            panels['coupling'] = result.comparison_frame()
        for name, frame in panels.items():
            paths[name] = os.path.join(out_dir, 'panels', f'{name}.csv')
            write_csv(frame, paths[name], float_format='%.10g')
        for spec in pivots:
            wide = store.metric_pivot(spec['metric'], spec['rows'], spec['columns'])
            if wide.empty:
                continue
            name = f"pivot_{spec['metric']}"
            paths[name] = os.path.join(out_dir, 'pivots', f"{spec['metric']}.csv")
            write_csv(wide.reset_index(), paths[name], float_format='%.10g')
    finally:
        store.close()
    logger.info("Wrote grid outputs for %d scenarios to %s", len(result.scenarios), out_dir)
    return paths
