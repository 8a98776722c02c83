"""
Invariant checks over a parsed SystemSpec.

Findings come back as a sorted list of Violation records; nothing here raises.
"""
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from core.config import Config
from core.models import Carrier, Fuel, SystemSpec


@dataclass(frozen=True, order=True)
class Violation:
    code: str
    location: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.location}: {self.message}"


def _finite(value: Optional[float]) -> bool:
    return value is not None and math.isfinite(value)


class SpecValidator:
    """Collects every violation of the data model invariants"""

    def __init__(self, spec: SystemSpec):
        self.spec = spec
        self.violations: List[Violation] = []

    def _add(self, code: str, location: str, message: str):
        self.violations.append(Violation(code, location, message))

    def run(self) -> List[Violation]:
        self.violations = []
        self._check_zones()
        self._check_routes()
        self._check_gen_techs()
        self._check_vre_bins()
        self._check_storage()
        self._check_trucks()
        self._check_pipelines()
        self._check_policy()
        self._check_existing()
        # Sorted output makes the result independent of catalog order
        return sorted(set(self.violations))

    def _check_zones(self):
        zones = self.spec.zones
        if not zones:
            self._add('zone.none', 'zones', 'at least one zone is required')
            return
        ids = sorted(z.id for z in zones)
        if len(set(ids)) != len(ids):
            self._add('zone.duplicate_id', 'zones', f'zone ids are not unique: {ids}')
        elif ids != list(range(1, len(ids) + 1)):
            self._add('zone.ids_not_contiguous', 'zones', f'zone ids must be 1..{len(ids)}, got {ids}')

        n_hours = len(zones[0].demand_power)
        for z in zones:
            for label, series in (('demand_power', z.demand_power), ('demand_h2', z.demand_h2)):
                where = f'zone {z.id} {label}'
                if len(series) != n_hours:
                    self._add('series.length_mismatch', where, f'{len(series)} hours, expected {n_hours}')
                    continue
                if not np.all(np.isfinite(series)):
                    hour = int(np.flatnonzero(~np.isfinite(series))[0])
                    self._add('series.non_finite', f'{where} hour {hour}', 'value is not finite')
                negative = np.flatnonzero(series < 0)
                for hour in negative:
                    self._add('series.negative_demand', f'{where} hour {int(hour)}',
                              f'demand {float(series[hour])} is negative')

    def _check_routes(self):
        zone_ids = set(self.spec.zone_ids)
        seen = {}
        for r in self.spec.routes:
            where = f'route {r.from_zone}-{r.to_zone}'
            if r.from_zone not in zone_ids or r.to_zone not in zone_ids:
                self._add('route.unknown_zone', where, 'route references an unknown zone')
            if r.from_zone == r.to_zone:
                self._add('route.self_loop', where, 'route must join two distinct zones')
            elif not r.distance_miles > 0:
                self._add('route.distance', where, f'distance must be positive, got {r.distance_miles}')
            if r.existing_power_capacity_mw < 0:
                self._add('route.negative_capacity', where, 'existing power capacity is negative')
            if r.key in seen and seen[r.key] != r.distance_miles:
                self._add('route.asymmetric', where,
                          f'distance {r.distance_miles} differs from reverse entry {seen[r.key]}')
            seen.setdefault(r.key, r.distance_miles)

    def _check_gen_techs(self):
        ids = [t.id for t in self.spec.gen_techs]
        for dup in sorted({i for i in ids if ids.count(i) > 1}):
            self._add('tech.duplicate_id', f'tech {dup}', 'technology id is not unique')
        for t in self.spec.gen_techs:
            where = f'tech {t.id}'
            if not t.lifetime_years > 0:
                self._add('tech.lifetime', where, f'lifetime must be positive, got {t.lifetime_years}')
            if t.efficiency_lhv is not None and not 0 < t.efficiency_lhv <= 1:
                self._add('tech.efficiency', where, f'efficiency_lhv must lie in (0, 1], got {t.efficiency_lhv}')
            if t.heat_rate is not None and not t.heat_rate > 0:
                self._add('tech.heat_rate', where, f'heat_rate must be positive, got {t.heat_rate}')
            for label, value in (('capex', t.capex_per_unit_power), ('fom', t.fom_per_year), ('vom', t.vom)):
                if not _finite(value) or value < 0:
                    self._add('tech.negative_cost', where, f'{label} must be finite and >= 0, got {value}')
            if t.is_vre:
                if t.emissions_intensity not in (None, 0, 0.0) or t.heat_rate is not None or t.fuel is not Fuel.NONE:
                    self._add('tech.vre_fuel', where, 'VRE technologies carry no fuel or emissions')
            if t.uc_modelled:
                if not t.unit_size > 0:
                    self._add('tech.uc_unit_size', where, 'unit commitment needs unit_size > 0')
                ms = t.min_stable_fraction
                if ms is not None and not 0 <= ms <= 1:
                    self._add('tech.uc_min_stable', where, f'min_stable_fraction must lie in [0, 1], got {ms}')
            if t.ramp_fraction_per_hour is not None and t.ramp_fraction_per_hour < 0:
                self._add('tech.ramp', where, 'ramp_fraction_per_hour must be >= 0')
            if not 0 <= t.capture_rate < 1:
                self._add('tech.capture_rate', where, f'capture_rate must lie in [0, 1), got {t.capture_rate}')
            if t.is_electrolyzer and t.efficiency_lhv is None:
                self._add('tech.efficiency', where, 'electrolyzer needs efficiency_lhv')
            if t.is_g2p and t.efficiency_lhv is None:
                self._add('tech.efficiency', where, 'hydrogen-fired generator needs efficiency_lhv')
            if t.burns_gas and t.heat_rate is None and t.efficiency_lhv is None:
                self._add('tech.fuel', where, 'gas-fired technology needs heat_rate or efficiency_lhv')
            if t.burns_gas and self.spec.policy.gas_price is None:
                self._add('policy.gas_price', where, 'gas-fired technology present but no gas price set')

    def _check_vre_bins(self):
        tech_ids = {t.id for t in self.spec.gen_techs if t.is_vre or t.energy_budget}
        zone_ids = set(self.spec.zone_ids)
        n_hours = self.spec.n_hours
        for b in self.spec.vre_bins:
            where = f'vre bin {b.tech_id}/{b.zone}/{b.bin_id}'
            if b.tech_id not in tech_ids:
                self._add('vre.unknown_tech', where, 'bin references an unknown VRE technology')
            if b.zone not in zone_ids:
                self._add('vre.unknown_zone', where, 'bin references an unknown zone')
            if b.max_capacity_mw < 0:
                self._add('vre.max_capacity', where, 'max capacity is negative')
            if b.min_capacity_mw > b.max_capacity_mw:
                self._add('vre.min_capacity', where, 'minimum build exceeds maximum capacity')
            if len(b.profile) != n_hours:
                self._add('series.length_mismatch', where, f'{len(b.profile)} hours, expected {n_hours}')
                continue
            bad = np.flatnonzero(~((b.profile >= 0) & (b.profile <= 1)))
            if bad.size:
                hour = int(bad[0])
                self._add('vre.profile_range', f'{where} hour {hour}',
                          f'capacity factor {float(b.profile[hour])} outside [0, 1]')

    def _check_storage(self):
        for s in self.spec.storage_techs:
            where = f'storage {s.id}'
            if not 0 < s.round_trip_efficiency <= 1:
                self._add('storage.efficiency', where,
                          f'round_trip_efficiency must lie in (0, 1], got {s.round_trip_efficiency}')
            if s.boiloff_per_day < 0:
                self._add('storage.boiloff', where, 'boiloff must be >= 0')
            elif s.boiloff_per_day > 0 and s.carrier is not Carrier.HYDROGEN_LIQUID:
                self._add('storage.boiloff_carrier', where, 'boiloff only for liquid carrier')
            if not s.lifetime_years > 0:
                self._add('storage.lifetime', where, 'lifetime must be positive')
            if min(s.capex_power_or_flow, s.capex_energy, s.charge_electricity) < 0:
                self._add('storage.negative_cost', where, 'costs and charge electricity must be >= 0')

    def _check_trucks(self):
        for t in self.spec.truck_types:
            where = f'truck {t.id}'
            if not t.carrier.is_hydrogen:
                self._add('truck.carrier', where, 'trucks carry gaseous or liquid hydrogen')
            if not t.payload_tonne > 0:
                self._add('truck.payload', where, 'payload must be positive')
            if not t.avg_speed_mph > 0:
                self._add('truck.speed', where, 'average speed must be positive')
            if t.boiloff_per_day < 0:
                self._add('truck.boiloff', where, 'boiloff must be >= 0')
            elif t.boiloff_per_day > 0 and t.carrier is not Carrier.HYDROGEN_LIQUID:
                self._add('truck.boiloff_carrier', where, 'boiloff only for liquid carrier')
            if min(t.capex_per_truck, t.opex_per_mile, t.loading_station_capex, t.loading_electricity) < 0:
                self._add('truck.negative_cost', where, 'costs and loading electricity must be >= 0')

    def _check_pipelines(self):
        for p in self.spec.pipeline_types:
            where = f'pipeline {p.id}'
            values = (p.capex_per_mile_per_unit, p.compression_capex_per_mile, p.compression_capex_fixed,
                      p.compression_electricity_per_tonne_mile, p.compression_electricity_per_tonne)
            if min(values) < 0:
                self._add('pipeline.negative_cost', where, 'cost and energy coefficients must be >= 0')
            if not p.flow_capacity_tonne_per_hour_per_unit > 0:
                self._add('pipeline.capacity', where, 'unit flow capacity must be positive')
            if not 0 <= p.linepack_fraction <= 1:
                self._add('pipeline.linepack', where, 'linepack_fraction must lie in [0, 1]')

    def _check_policy(self):
        p = self.spec.policy
        if not p.discount_rate > 0:
            self._add('policy.discount_rate', 'policy', f'discount rate must be positive, got {p.discount_rate}')
        prices = {'co2_price': p.co2_price, 'co2_transport_cost': p.co2_transport_cost,
                  'voll_power': p.voll_power, 'voll_h2': p.voll_h2,
                  'power_line_cost_per_mw_mile': p.power_line_cost_per_mw_mile}
        if p.gas_price is not None:
            prices['gas_price'] = p.gas_price
        for name, value in prices.items():
            if not _finite(value) or value < 0:
                self._add('policy.negative_price', 'policy', f'{name} must be finite and >= 0, got {value}')
        if not 0 <= p.power_loss_per_100_miles < 1:
            self._add('policy.line_loss', 'policy', 'power_loss_per_100_miles must lie in [0, 1)')
        if not p.truck_speed_mph > 0:
            self._add('policy.truck_speed', 'policy', 'truck_speed_mph must be positive')

    def _check_existing(self):
        known = {t.id for t in self.spec.gen_techs} | {s.id for s in self.spec.storage_techs}
        zone_ids = set(self.spec.zone_ids)
        for e in self.spec.existing:
            where = f'existing {e.tech_id}/{e.zone}'
            if e.tech_id not in known:
                self._add('existing.unknown_tech', where, 'existing capacity references an unknown technology')
            if e.zone not in zone_ids:
                self._add('existing.unknown_zone', where, 'existing capacity references an unknown zone')
            if e.power < 0 or e.energy < 0:
                self._add('existing.negative', where, 'existing capacity must be >= 0')


def validate_spec(spec: SystemSpec) -> List[Violation]:
    """
    Check every data model invariant

    Args:
        spec: Fully parsed planning instance

    Returns:
        Sorted list of violations, empty when the spec is valid
    """
    return SpecValidator(spec).run()


def validate_timeline_settings(spec: SystemSpec, k_total: int, period_hours: int) -> List[Violation]:
    """Checks that the reduction and the truck model can work on this data"""
    out = []
    if period_hours <= 0 or period_hours > Config.HOURS_PER_YEAR:
        return [Violation('timeline.period_hours', 'timeline', f'period_hours must lie in 1..8760, got {period_hours}')]
    n_years = spec.n_hours // Config.HOURS_PER_YEAR
    if n_years < 1:
        out.append(Violation('timeline.short_series', 'timeline',
                             f'{spec.n_hours} hours of data; at least one full year is required'))
    available = n_years * (Config.HOURS_PER_YEAR // period_hours)
    if k_total > available:
        out.append(Violation('timeline.too_few_candidates', 'timeline',
                             f'k_total={k_total} exceeds the {available} candidate weeks'))
    if k_total < 2:
        out.append(Violation('timeline.k_total', 'timeline', 'k_total must leave room for extreme and clustered weeks'))
    for truck in spec.truck_types:
        for r in spec.routes:
            if not r.h2_transport_allowed or truck.avg_speed_mph <= 0:
                continue
            if math.ceil(r.distance_miles / truck.avg_speed_mph) >= period_hours:
                out.append(Violation('timeline.truck_travel', f'truck {truck.id} route {r.key}',
                                     f'travel time does not fit in a {period_hours}-hour week'))
    return sorted(set(out))
