"""
Data loader module for importing technology catalogs and hourly series
"""
import logging
import math
import os
from dataclasses import fields
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd
import yaml

from core.config import Config
from core.exceptions import DataError
from core.exporters import read_series_csv
from core.models import (
    CapexBasis, Carrier, ExistingCapacity, Fuel, GenTech, PipelineType, Policy,
    Route, Sector, StorageTech, SystemSpec, TruckType, VreSupplyBin, Zone,
)
from core.synthetic import SyntheticProfileGenerator, parse_zone_params

logger = logging.getLogger(__name__)

_ENUM_FIELDS = {'sector': Sector, 'carrier': Carrier, 'fuel': Fuel, 'capex_basis': CapexBasis}


def _field_names(cls) -> set:
    return {f.name for f in fields(cls)}


def _build(cls, raw: Mapping[str, Any], where: str, path: str):
    """Construct a catalog dataclass from a YAML mapping, strictly"""
    if not isinstance(raw, Mapping):
        raise DataError(f"{where}: expected a mapping, got {type(raw).__name__}", path)
    allowed = _field_names(cls)
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise DataError(f"{where}: unknown keys {unknown}", path)
    values = dict(raw)
    for key, enum in _ENUM_FIELDS.items():
        if key in values and key in allowed:
            try:
                values[key] = enum(values[key])
            except ValueError:
                choices = [e.value for e in enum]
                raise DataError(f"{where}: {key} must be one of {choices}, got {values[key]!r}", path)
    if 'zones' in values and values['zones'] is not None:
        values['zones'] = tuple(int(z) for z in values['zones'])
    try:
        return cls(**values)
    except TypeError as e:
        raise DataError(f"{where}: {e}", path)


class SpecLoader:
    """Load a SystemSpec from a YAML catalog plus CSV or synthetic series"""

    def __init__(self):
        self.spec: Optional[SystemSpec] = None
        self.file_path: Optional[str] = None
        self.series: Dict[str, pd.DataFrame] = {}
        self.n_hours: int = 0
        self.errors: List[str] = []
        self.error: Optional[DataError] = None

    def load(self, file_path: str) -> Tuple[bool, str]:
        """
        Load and parse a catalog file

        Args:
            file_path: Path to the YAML catalog

        Returns:
            (success, message)
        """
        self.file_path = file_path
        self.errors = []
        self.error = None
        self.spec = None
        try:
            self.spec = self._load(file_path)
        except DataError as e:
            self.error = e
            self.errors.append(str(e))
            return False, str(e)
        summary = self.spec.catalog_summary()
        message = (f"Loaded {self.spec.name}: {summary['zones']} zones, "
                   f"{summary['gen_techs']} generation techs, {summary['hours']} hours")
        logger.info(message)
        return True, message

    def _load(self, path: str) -> SystemSpec:
        try:
            with open(path, 'r', encoding=Config.DEFAULT_CSV_ENCODING) as fh:
                raw = yaml.safe_load(fh)
        except FileNotFoundError:
            raise DataError("Catalog file not found", path)
        except (OSError, yaml.YAMLError) as e:
            raise DataError(f"Cannot parse catalog: {e}", path)
        if not isinstance(raw, dict):
            raise DataError("Catalog root must be a mapping", path)

        base_dir = os.path.dirname(os.path.abspath(path))
        self.series = self._load_series(raw, base_dir, path)

        zones_raw = raw.get('zones') or []
        if not zones_raw:
            raise DataError("Catalog declares no zones", path)
        try:
            zone_ids = [int(z['id']) for z in zones_raw]
        except (KeyError, TypeError, ValueError):
            raise DataError("Every zone needs an integer 'id'", path)
        self.n_hours = self._series_length(zone_ids, path)

        zones = []
        for z in zones_raw:
            zone_id = int(z['id'])
            zones.append(Zone(
                id=zone_id,
                name=str(z.get('name', f'zone{zone_id}')),
                allows_central_h2_production=bool(z.get('allows_central_h2_production', True)),
                demand_power=self._zone_series('demand_power', zone_id, path),
                demand_h2=self._zone_series('demand_h2', zone_id, path, optional=True),
            ))

        policy = _build(Policy, raw.get('policy') or {}, 'policy', path)
        routes = tuple(_build(Route, r, f'routes[{i}]', path) for i, r in enumerate(raw.get('routes') or []))
        gen_techs = tuple(_build(GenTech, t, f"gen_techs[{t.get('id', i)}]", path)
                          for i, t in enumerate(raw.get('gen_techs') or []))
        storage = tuple(_build(StorageTech, s, f"storage_techs[{s.get('id', i)}]", path)
                        for i, s in enumerate(raw.get('storage_techs') or []))
        trucks = []
        for i, t in enumerate(raw.get('truck_types') or []):
            values = dict(t)
            values.setdefault('avg_speed_mph', policy.truck_speed_mph)
            trucks.append(_build(TruckType, values, f"truck_types[{t.get('id', i)}]", path))
        pipelines = tuple(_build(PipelineType, p, f"pipeline_types[{p.get('id', i)}]", path)
                          for i, p in enumerate(raw.get('pipeline_types') or []))
        existing = tuple(_build(ExistingCapacity, e, f'existing[{i}]', path)
                         for i, e in enumerate(raw.get('existing') or []))
        bins = tuple(self._build_bin(b, i, path) for i, b in enumerate(raw.get('vre_bins') or []))

        return SystemSpec(
            name=str(raw.get('name', os.path.splitext(os.path.basename(path))[0])),
            zones=tuple(zones),
            routes=routes,
            gen_techs=gen_techs,
            vre_bins=bins,
            storage_techs=storage,
            truck_types=tuple(trucks),
            pipeline_types=pipelines,
            policy=policy,
            existing=existing,
        )

    def _load_series(self, raw: Mapping, base_dir: str, path: str) -> Dict[str, pd.DataFrame]:
        if raw.get('synthetic') and raw.get('series'):
            raise DataError("Catalog declares both 'series' and 'synthetic'; pick one", path)
        synthetic = raw.get('synthetic')
        if synthetic:
            try:
                zones = {int(k): parse_zone_params(v or {}) for k, v in (synthetic.get('zones') or {}).items()}
            except (KeyError, TypeError, ValueError) as e:
                raise DataError(f"Bad synthetic block: {e}", path)
            generator = SyntheticProfileGenerator(seed=synthetic.get('seed', Config.DEFAULT_SEED),
                                                  years=synthetic.get('years', 1))
            return generator.generate(zones)

        files = raw.get('series') or {}
        if 'demand_power' not in files:
            raise DataError("Catalog needs a 'series' entry for demand_power (or a 'synthetic' block)", path)
        out = {}
        for name, rel in files.items():
            csv_path = rel if os.path.isabs(rel) else os.path.join(base_dir, rel)
            out[name] = read_series_csv(csv_path)
            out[name].attrs['path'] = csv_path
        return out

    def _series_length(self, zone_ids: List[int], path: str) -> int:
        frame = self.series.get('demand_power')
        if frame is None:
            raise DataError("Series 'demand_power' is missing", path)
        counts = frame.groupby('zone_id').size()
        missing = [z for z in zone_ids if z not in counts.index]
        if missing:
            raise DataError(f"demand_power has no rows for zones {missing}", frame.attrs.get('path', path))
        lengths = set(int(counts[z]) for z in zone_ids)
        if len(lengths) != 1:
            raise DataError(f"demand_power row counts differ across zones: {sorted(lengths)}",
                            frame.attrs.get('path', path))
        return lengths.pop()

    def _zone_series(self, name: str, zone_id: int, path: str, optional: bool = False) -> np.ndarray:
        frame = self.series.get(name)
        if frame is None:
            if optional:
                return np.zeros(self.n_hours)
            raise DataError(f"Series {name!r} is missing", path)
        src = frame.attrs.get('path', path)
        rows = frame[frame['zone_id'] == zone_id]
        if rows.empty and optional:
            return np.zeros(self.n_hours)
        if len(rows) != self.n_hours:
            raise DataError(f"Series {name!r} zone {zone_id} has {len(rows)} rows, expected {self.n_hours}", src)
        rows = rows.sort_values('hour', kind='stable')
        hours = rows['hour'].to_numpy()
        if not np.array_equal(hours, np.arange(self.n_hours)):
            raise DataError(f"Series {name!r} zone {zone_id} hours must be exactly 0..{self.n_hours - 1}", src)
        values = rows['value'].to_numpy(dtype=float)
        values.setflags(write=False)
        return values

    def _build_bin(self, raw: Mapping[str, Any], i: int, path: str) -> VreSupplyBin:
        values = dict(raw)
        where = f"vre_bins[{i}]"
        series_name = values.pop('profile', None)
        scale = float(values.pop('profile_scale', 1.0))
        if series_name is None:
            raise DataError(f"{where}: 'profile' series name is required", path)
        if values.get('max_capacity_mw') is None:
            values['max_capacity_mw'] = math.inf
        values.setdefault('interconnection_cost_adder', 0.0)
        profile = self._zone_series(series_name, int(values.get('zone', 0)), path)
        if scale != 1.0:
            profile = np.clip(profile * scale, 0.0, 1.0)
            profile.setflags(write=False)
        values['profile'] = profile
        return _build(VreSupplyBin, values, where, path)


def load_spec(file_path: str) -> SystemSpec:
    """Load a catalog or raise the DataError describing why it failed"""
    loader = SpecLoader()
    ok, _ = loader.load(file_path)
    if not ok:
        raise loader.error
    return loader.spec
