"""
eh2plan - command-line entry point

    python app.py validate --config data/toy/run.yaml
    python app.py reduce   --config data/toy/run.yaml --seed 7
    python app.py solve    --config data/toy/run.yaml --jobs 4 --decoupled-comparison

Exit codes: 0 ok, 1 violations or failed scenarios, 2 usage or configuration
error, 3 unreadable or corrupt input file.
"""
import argparse
import logging
import os
import sys
import time
from datetime import datetime, timezone
from typing import List, Optional, Tuple

from analysis.grid import run_grid, write_grid_outputs
from analysis.scenarios import ScenarioRunner
from core.config import Config, RunConfig, SOLVER_BACKENDS, STORAGE_LINKAGES, load_run_config
from core.data_loader import SpecLoader
from core.exceptions import ConfigError, DataError, PlanningError
from core.exporters import write_csv, write_json
from core.models import SystemSpec
from core.timeslices import (
    ReducedTimeline, build_timeline, read_timeline_bundle, reduction_diagnostics, write_timeline_bundle,
)
from core.validation import Violation, validate_spec, validate_timeline_settings
from formulation.problem import BuildOptions
from solver.engine import options_from_settings

logger = logging.getLogger('eh2plan')

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INPUT = 3

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: str):
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=LOG_FORMAT, stream=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', required=True, help='run YAML file')
    common.add_argument('--seed', type=int, help='clustering seed (overrides the run file)')
    common.add_argument('--jobs', type=int, help='scenarios solved in parallel')
    common.add_argument('--storage-linkage', choices=STORAGE_LINKAGES)
    common.add_argument('--solver-backend', choices=SOLVER_BACKENDS)
    common.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'])

    parser = argparse.ArgumentParser(prog=Config.APP_NAME, description='Power and hydrogen capacity expansion')
    parser.add_argument('--version', action='version', version=f'{Config.APP_NAME} {Config.APP_VERSION}')
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('validate', parents=[common], help='check the dataset and timeline settings')
    sub.add_parser('reduce', parents=[common], help='write the representative-week bundle')
    solve = sub.add_parser('solve', parents=[common], help='run the scenario grid')
    solve.add_argument('--export-mps', action='store_true', help='write one MPS file per scenario')
    solve.add_argument('--decoupled-comparison', action='store_true',
                       help='also solve every scenario without power/H2 conversion')
    return parser


def load_inputs(args) -> Tuple[RunConfig, SystemSpec, List[Violation]]:
    """Parse config and dataset and collect violations; raises before anything is written"""
    config = load_run_config(args.config, {
        'seed': args.seed,
        'jobs': args.jobs,
        'storage_linkage': args.storage_linkage,
        'solver_backend': args.solver_backend,
    })
    loader = SpecLoader()
    ok, message = loader.load(config.catalog)
    if not ok:
        raise loader.error
    logger.info(message)
    violations = validate_spec(loader.spec)
    violations += validate_timeline_settings(loader.spec, config.timeline.k_total, config.timeline.period_hours)
    return config, loader.spec, sorted(set(violations))


def report_violations(violations: List[Violation]) -> int:
    for v in violations:
        print(v)
    if violations:
        print(f"{len(violations)} violation(s)")
        return EXIT_FAILED
    return EXIT_OK


def obtain_timeline(config: RunConfig, spec: SystemSpec) -> ReducedTimeline:
    t = config.timeline
    if t.bundle and os.path.isdir(t.bundle):
        logger.info("Reading timeline bundle %s", t.bundle)
        return read_timeline_bundle(t.bundle)
    return build_timeline(spec, k_total=t.k_total, seed=t.seed, period_hours=t.period_hours,
                          max_iter=t.max_iter, tol=t.tol)


def cmd_validate(args) -> int:
    _, spec, violations = load_inputs(args)
    code = report_violations(violations)
    if code == EXIT_OK:
        print(f"{spec.name}: OK ({spec.catalog_summary()})")
    return code


def cmd_reduce(args) -> int:
    config, spec, violations = load_inputs(args)
    if violations:
        return report_violations(violations)
    timeline = obtain_timeline(config, spec)
    target = os.path.join(config.output_dir, 'timeline')
    write_timeline_bundle(timeline, target)
    write_csv(reduction_diagnostics(timeline, spec), os.path.join(target, 'diagnostics.csv'), float_format='%.10g')
    print(f"Wrote {timeline.n_weeks} weeks ({timeline.hours_represented():.1f} hours) to {target}")
    return EXIT_OK


def cmd_solve(args) -> int:
    started = datetime.now(timezone.utc)
    clock = time.perf_counter()
    config, spec, violations = load_inputs(args)
    if violations:
        return report_violations(violations)
    timeline = obtain_timeline(config, spec)

    runner = ScenarioRunner(
        spec, timeline,
        build_options=BuildOptions(storage_linkage=config.timeline.storage_linkage),
        solver_options=options_from_settings(config.solver),
        artifact_dir=config.output_dir,
        export_mps=args.export_mps,
    )
    result = run_grid(runner, config.scenario_axes, base=config.scenario_base, jobs=config.jobs,
                      decoupled_comparison=args.decoupled_comparison,
                      reference=config.reference_scenario or None)

    axes = list(config.scenario_axes)
    pivots = []
    if len(axes) >= 2:
        pivots = [{'metric': m, 'rows': axes[0], 'columns': axes[1]}
                  for m in ('p2h_mwh', 'pfh_mwh', 'cost.total', 'emissions.total')]
    paths = write_grid_outputs(result, config.output_dir, pivots)
    write_json({
        'command': 'solve',
        'config': config.path,
        'started_utc': started.isoformat(),
        'finished_utc': datetime.now(timezone.utc).isoformat(),
        'wall_time_s': round(time.perf_counter() - clock, 3),
        'scenarios': len(result.scenarios),
        'failures': result.failures,
        'version': Config.APP_VERSION,
    }, os.path.join(config.output_dir, 'run_info.json'))

    for report in result.ordered_reports():
        state = 'ok' if report.usable else report.status
        print(f"{report.key}: {state}, cost {report.total_cost:.6g} $/yr, "
              f"emissions {report.total_emissions:.6g} t, P2H {report.p2h_mwh:.4g} MWh, PfH {report.pfh_mwh:.4g} MWh")
    print(f"Results in {paths['results']}")
    return EXIT_OK if result.ok else EXIT_FAILED


COMMANDS = {'validate': cmd_validate, 'reduce': cmd_reduce, 'solve': cmd_solve}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except PlanningError as e:
        logger.error("%s failed: %s", args.command, e)
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
