"""
Application configuration for the e-H2 planning engine
"""
import os
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional

import yaml

from core.exceptions import ConfigError


class Config:
    APP_NAME = "eh2plan"
    APP_VERSION = "1.0.0"

    # Every CSV we emit starts with this line; readers reject other versions
    SCHEMA_VERSION = 1
    SCHEMA_HEADER_PREFIX = "# schema_version:"
    DEFAULT_CSV_ENCODING = "utf-8"

    # Physical constants
    H2_LHV_MWH_PER_TONNE = 33.33
    MMBTU_PER_MWH = 3.412
    GAS_CO2_TONNE_PER_MMBTU = 0.05306
    HOURS_PER_YEAR = 8760
    HOURS_PER_DAY = 24

    # Time-domain reduction
    DEFAULT_PERIOD_HOURS = 168
    DEFAULT_K_TOTAL = 30
    DEFAULT_SEED = 42
    KMEANS_MAX_ITER = 300
    KMEANS_TOL = 1e-6
    WEIGHT_CLOSURE_TOLERANCE_HOURS = 1.0

    # Linearized unit commitment defaults (the catalog may override)
    DEFAULT_MIN_STABLE_FRACTION = 0.3
    DEFAULT_RAMP_FRACTION = 1.0
    DEFAULT_RAMP_BY_TECH = {'nuclear': 0.5}

    # Network defaults
    DEFAULT_TRUCK_SPEED_MPH = 35.0
    DEFAULT_LINE_LIFETIME_YEARS = 60.0
    DEFAULT_LINE_COST_PER_MW_MILE = 1600.0
    DEFAULT_POWER_LOSS_PER_100_MILES = 0.01

    # Solver
    FEASIBILITY_TOL = 1e-7
    OPTIMALITY_TOL = 1e-7
    PIVOT_TOL = 1e-9
    MAX_ITERS = 200_000
    BLAND_AFTER_DEGENERATE = 50
    AUTO_NNZ_LIMIT = 200_000
    VERIFY_TOL = 1e-6
    VERIFY_REPORTED_ROWS = 20

    # Scenario analysis
    REGIME_FACTOR = 10.0
    ZERO_EXCHANGE_MWH = 1e-6
    UTILIZATION_PRESETS = {
        'levelized': 0.90,
        'smr_ccs_observed': 0.64,
        'ccgt_observed': 0.18,
    }

    # Series CSV layout
    SERIES_COLUMNS = ['zone_id', 'hour', 'value']
    SOLUTION_COLUMNS = ['column_name', 'value']
    TIDY_COLUMNS = ['scenario_key', 'metric', 'value']
    HEADLINE_METRICS = ('cost.total', 'emissions.total', 'p2h_mwh', 'pfh_mwh', 'exchange_share')


STORAGE_LINKAGES = ('cyclic_week', 'linked_chronological')
SOLVER_BACKENDS = ('reference', 'highs', 'auto')


@dataclass(frozen=True)
class TimelineSettings:
    k_total: int = Config.DEFAULT_K_TOTAL
    seed: int = Config.DEFAULT_SEED
    period_hours: int = Config.DEFAULT_PERIOD_HOURS
    storage_linkage: str = 'cyclic_week'
    max_iter: int = Config.KMEANS_MAX_ITER
    tol: float = Config.KMEANS_TOL
    bundle: Optional[str] = None


@dataclass(frozen=True)
class SolverSettings:
    backend: str = 'auto'
    tolerance: float = Config.FEASIBILITY_TOL
    max_iters: int = Config.MAX_ITERS
    scaling: bool = True
    auto_nnz_limit: int = Config.AUTO_NNZ_LIMIT


@dataclass(frozen=True)
class RunConfig:
    """Parsed run file: where the data lives and how to run it"""
    path: str
    catalog: str
    output_dir: str
    timeline: TimelineSettings = field(default_factory=TimelineSettings)
    solver: SolverSettings = field(default_factory=SolverSettings)
    scenario_axes: Dict[str, List[Any]] = field(default_factory=dict)
    scenario_base: Dict[str, Any] = field(default_factory=dict)
    reference_scenario: Dict[str, Any] = field(default_factory=dict)
    jobs: int = 1


def _resolve(base_dir: str, value: Optional[str]) -> Optional[str]:
    if value is None:
        return None
    return value if os.path.isabs(value) else os.path.normpath(os.path.join(base_dir, value))


def load_run_config(path: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Load and check a YAML run file

    Args:
        path: Path to the run YAML
        overrides: Optional CLI overrides (seed, jobs, storage_linkage, solver_backend)

    Returns:
        RunConfig with every referenced path resolved and checked
    """
    try:
        with open(path, 'r', encoding='utf-8') as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}")
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"Cannot read config {path}: {e}")

    if not raw:
        raise ConfigError(f"Config file is empty: {path}")
    if not isinstance(raw, dict):
        raise ConfigError(f"Config root must be a mapping: {path}")
    if 'catalog' not in raw:
        raise ConfigError(f"Config {path} has no 'catalog' entry")

    base_dir = os.path.dirname(os.path.abspath(path))
    overrides = overrides or {}

    timeline_raw = dict(raw.get('timeline') or {})
    for key in ('seed', 'storage_linkage'):
        if overrides.get(key) is not None:
            timeline_raw[key] = overrides[key]
    try:
        timeline = TimelineSettings(**timeline_raw)
    except TypeError as e:
        raise ConfigError(f"Bad timeline block in {path}: {e}")
    if timeline.storage_linkage not in STORAGE_LINKAGES:
        raise ConfigError(f"storage_linkage must be one of {STORAGE_LINKAGES}, got {timeline.storage_linkage!r}")
    if timeline.bundle:
        timeline = replace(timeline, bundle=_resolve(base_dir, timeline.bundle))

    solver_raw = dict(raw.get('solver') or {})
    if overrides.get('solver_backend'):
        solver_raw['backend'] = overrides['solver_backend']
    try:
        solver = SolverSettings(**solver_raw)
    except TypeError as e:
        raise ConfigError(f"Bad solver block in {path}: {e}")
    if solver.backend not in SOLVER_BACKENDS:
        raise ConfigError(f"solver backend must be one of {SOLVER_BACKENDS}, got {solver.backend!r}")

    scenarios = raw.get('scenarios') or {}
    axes = scenarios.get('axes') or {}
    for name, values in axes.items():
        if not isinstance(values, list) or not values:
            raise ConfigError(f"Scenario axis {name!r} must be a non-empty list")

    catalog = _resolve(base_dir, raw['catalog'])
    if not os.path.isfile(catalog):
        raise ConfigError(f"Catalog file not found: {catalog}")

    jobs = overrides.get('jobs') or raw.get('jobs', 1)
    if int(jobs) < 1:
        raise ConfigError("jobs must be >= 1")

    return RunConfig(
        path=os.path.abspath(path),
        catalog=catalog,
        output_dir=_resolve(base_dir, raw.get('output_dir', 'output')),
        timeline=timeline,
        solver=solver,
        scenario_axes={k: list(v) for k, v in axes.items()},
        scenario_base=dict(scenarios.get('base') or {}),
        reference_scenario=dict(scenarios.get('reference') or {}),
        jobs=int(jobs),
    )
