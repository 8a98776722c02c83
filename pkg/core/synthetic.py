"""
Deterministic synthetic hourly profiles.

Stand-ins for measured load, refuelling demand and VRE availability when a
dataset declares a ``synthetic:`` block instead of CSV files. Output is a long
frame with the same ``zone_id,hour,value`` layout the CSV loader produces, one
frame per series name.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Mapping

import numpy as np
import pandas as pd
from scipy.signal import lfilter

from core.config import Config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZoneProfileParams:
    peak_load_mw: float = 1000.0
    h2_demand_tph: float = 0.0
    wind_mean_cf: float = 0.35
    wind_variability: float = 1.0
    solar_mean_cf: float = 0.18
    hydro_mean_cf: float = 0.0


_ZONE_KEYS = set(ZoneProfileParams.__dataclass_fields__)


class SyntheticProfileGenerator:
    """Generate load, H2 demand and capacity-factor series for a set of zones"""

    def __init__(self, seed: int, years: int = 1):
        self.seed = int(seed)
        self.years = int(years)
        self.n_hours = Config.HOURS_PER_YEAR * self.years
        hours = np.arange(self.n_hours)
        self._hour_of_day = hours % Config.HOURS_PER_DAY
        self._day_of_year = (hours // Config.HOURS_PER_DAY) % 365
        self._day_of_week = (hours // Config.HOURS_PER_DAY) % 7

    def _rng(self, zone_id: int, stream: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, int(zone_id), stream])

    def load(self, zone_id: int, p: ZoneProfileParams) -> np.ndarray:
        rng = self._rng(zone_id, 1)
        # Winter and summer peaks, evening daily peak, lighter weekends
        season = 0.85 + 0.15 * np.cos(4 * np.pi * (self._day_of_year - 20) / 365)
        daily = 0.8 + 0.2 * np.sin(np.pi * (self._hour_of_day - 6) / 14).clip(min=0)
        weekly = np.where(self._day_of_week >= 5, 0.92, 1.0)
        noise = 1.0 + 0.03 * rng.standard_normal(self.n_hours)
        shape = season * daily * weekly * noise
        return p.peak_load_mw * shape / shape.max()

    def h2_demand(self, zone_id: int, p: ZoneProfileParams) -> np.ndarray:
        if p.h2_demand_tph <= 0:
            return np.zeros(self.n_hours)
        rng = self._rng(zone_id, 2)
        # Refuelling concentrates in daytime hours
        daily = 0.6 + 0.8 * np.exp(-((self._hour_of_day - 13) ** 2) / 18.0)
        noise = 1.0 + 0.05 * rng.standard_normal(self.n_hours)
        shape = (daily * noise).clip(min=0)
        return p.h2_demand_tph * shape / shape.mean()

    def wind(self, zone_id: int, p: ZoneProfileParams) -> np.ndarray:
        rng = self._rng(zone_id, 3)
        phi = 0.97
        shocks = rng.standard_normal(self.n_hours) * np.sqrt(1 - phi ** 2)
        ar = lfilter([1.0], [1.0, -phi], shocks)
        season = 0.25 * np.cos(2 * np.pi * (self._day_of_year - 15) / 365)
        z = p.wind_variability * (1.2 * ar + season)
        offset = np.log(p.wind_mean_cf / (1 - p.wind_mean_cf))
        return 1.0 / (1.0 + np.exp(-(z + offset)))

    def solar(self, zone_id: int, p: ZoneProfileParams) -> np.ndarray:
        rng = self._rng(zone_id, 4)
        day_length = 12 + 3 * np.cos(2 * np.pi * (self._day_of_year - 172) / 365)
        sunrise = 12 - day_length / 2
        elevation = np.sin(np.pi * (self._hour_of_day + 0.5 - sunrise) / day_length).clip(min=0)
        n_days = self.n_hours // Config.HOURS_PER_DAY
        clouds = np.repeat(rng.uniform(0.35, 1.0, n_days), Config.HOURS_PER_DAY)
        raw = elevation * clouds
        if raw.mean() <= 0:
            return raw
        return (raw * p.solar_mean_cf / raw.mean()).clip(0, 1)

    def hydro(self, zone_id: int, p: ZoneProfileParams) -> np.ndarray:
        if p.hydro_mean_cf <= 0:
            return np.zeros(self.n_hours)
        season = 1.0 + 0.4 * np.cos(2 * np.pi * (self._day_of_year - 110) / 365)
        return (p.hydro_mean_cf * season).clip(0, 1)

    def generate(self, zones: Mapping[int, ZoneProfileParams]) -> Dict[str, pd.DataFrame]:
        """
        Build every series for every zone

        Args:
            zones: Profile parameters keyed by zone id

        Returns:
            Dict of series name -> long frame with zone_id, hour, value
        """
        builders = {
            'demand_power': self.load,
            'demand_h2': self.h2_demand,
            'wind': self.wind,
            'solar': self.solar,
            'hydro': self.hydro,
        }
        out: Dict[str, pd.DataFrame] = {}
        hours = np.arange(self.n_hours)
        for name, build in builders.items():
            frames = []
            for zone_id in sorted(zones):
                frames.append(pd.DataFrame({
                    'zone_id': zone_id,
                    'hour': hours,
                    'value': build(zone_id, zones[zone_id]),
                }))
            out[name] = pd.concat(frames, ignore_index=True)
        logger.debug("Generated %d synthetic series for %d zones over %d hours",
                     len(out), len(zones), self.n_hours)
        return out


def parse_zone_params(raw: Mapping) -> ZoneProfileParams:
    unknown = set(raw) - _ZONE_KEYS
    if unknown:
        raise KeyError(f"unknown synthetic zone parameters: {sorted(unknown)}")
    return ZoneProfileParams(**{k: float(v) for k, v in raw.items()})
