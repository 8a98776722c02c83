"""
Domain data model for zones, technologies, networks and policy.

All types are frozen after construction. Hourly series are numpy arrays and
are never written to in place; scenario overrides build new objects through
``dataclasses.replace``.
"""
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np


class Sector(str, Enum):
    POWER = 'power'
    HYDROGEN = 'hydrogen'


class Carrier(str, Enum):
    ELECTRICITY = 'electricity'
    HYDROGEN_GAS = 'hydrogen_gas'
    HYDROGEN_LIQUID = 'hydrogen_liquid'

    @property
    def is_hydrogen(self) -> bool:
        return self is not Carrier.ELECTRICITY


class Fuel(str, Enum):
    NONE = 'none'
    NATURAL_GAS = 'natural_gas'
    HYDROGEN = 'hydrogen'
    ELECTRICITY = 'electricity'


class CapexBasis(str, Enum):
    OUTPUT = 'output'
    ELECTRIC_INPUT = 'electric_input'


UNBOUNDED = math.inf


@dataclass(frozen=True, eq=False)
class Zone:
    id: int
    name: str
    allows_central_h2_production: bool
    demand_power: np.ndarray
    demand_h2: np.ndarray


@dataclass(frozen=True)
class Route:
    from_zone: int
    to_zone: int
    distance_miles: float
    existing_power_capacity_mw: float = 0.0
    power_expansion_allowed: bool = False
    h2_transport_allowed: bool = True

    @property
    def key(self) -> Tuple[int, int]:
        return (min(self.from_zone, self.to_zone), max(self.from_zone, self.to_zone))

    @property
    def carries_power(self) -> bool:
        return self.existing_power_capacity_mw > 0 or self.power_expansion_allowed


@dataclass(frozen=True)
class GenTech:
    id: str
    sector: Sector
    capex_per_unit_power: float
    fom_per_year: float
    vom: float
    lifetime_years: float
    heat_rate: Optional[float] = None
    efficiency_lhv: Optional[float] = None
    emissions_intensity: Optional[float] = None
    is_vre: bool = False
    uc_modelled: bool = False
    unit_size: float = 0.0
    min_stable_fraction: Optional[float] = None
    ramp_fraction_per_hour: Optional[float] = None
    electricity_input_per_output: float = 0.0
    fuel: Fuel = Fuel.NONE
    capex_basis: CapexBasis = CapexBasis.OUTPUT
    capture_rate: float = 0.0
    is_central: bool = False
    startup_cost: float = 0.0
    energy_budget: bool = False
    zones: Optional[Tuple[int, ...]] = None

    @property
    def is_electrolyzer(self) -> bool:
        return self.sector is Sector.HYDROGEN and self.fuel is Fuel.ELECTRICITY

    @property
    def is_g2p(self) -> bool:
        return self.sector is Sector.POWER and self.fuel is Fuel.HYDROGEN

    @property
    def is_conversion(self) -> bool:
        """True for technologies that couple the two carriers"""
        return self.is_electrolyzer or self.is_g2p

    @property
    def burns_gas(self) -> bool:
        return self.fuel is Fuel.NATURAL_GAS

    def allowed_in(self, zone: Zone) -> bool:
        if self.zones is not None and zone.id not in self.zones:
            return False
        if self.is_central and not zone.allows_central_h2_production:
            return False
        return True


@dataclass(frozen=True, eq=False)
class VreSupplyBin:
    tech_id: str
    zone: int
    bin_id: int
    max_capacity_mw: float
    interconnection_cost_adder: float
    profile: np.ndarray
    min_capacity_mw: float = 0.0
    existing_capacity_mw: float = 0.0

    @property
    def key(self) -> Tuple[str, int, int]:
        return (self.tech_id, self.zone, self.bin_id)


@dataclass(frozen=True)
class StorageTech:
    id: str
    carrier: Carrier
    capex_power_or_flow: float
    capex_energy: float
    round_trip_efficiency: float = 1.0
    charge_electricity: float = 0.0
    lifetime_years: float = 30.0
    boiloff_per_day: float = 0.0
    fom_per_year: float = 0.0
    zones: Optional[Tuple[int, ...]] = None

    def allowed_in(self, zone: Zone) -> bool:
        return self.zones is None or zone.id in self.zones


@dataclass(frozen=True)
class TruckType:
    id: str
    carrier: Carrier
    payload_tonne: float
    capex_per_truck: float
    opex_per_mile: float
    loading_station_capex: float
    loading_electricity: float
    avg_speed_mph: float = 35.0
    boiloff_per_day: float = 0.0
    lifetime_years: float = 15.0


@dataclass(frozen=True)
class PipelineType:
    id: str
    flow_capacity_tonne_per_hour_per_unit: float
    capex_per_mile_per_unit: float
    compression_capex_per_mile: float = 0.0
    compression_capex_fixed: float = 0.0
    compression_electricity_per_tonne_mile: float = 0.0
    compression_electricity_per_tonne: float = 0.0
    lifetime_years: float = 40.0
    linepack_fraction: float = 0.0


@dataclass(frozen=True)
class Policy:
    co2_price: float = 0.0
    co2_transport_cost: float = 20.0
    gas_price: Optional[float] = 5.4
    discount_rate: float = 0.07
    voll_power: float = 20_000.0
    voll_h2: float = 1_000.0
    coupling_enabled: bool = True
    power_line_cost_per_mw_mile: float = 1600.0
    power_loss_per_100_miles: float = 0.01
    line_lifetime_years: float = 60.0
    truck_speed_mph: float = 35.0
    startup_cost_enabled: bool = True


@dataclass(frozen=True)
class ExistingCapacity:
    tech_id: str
    zone: int
    power: float = 0.0
    energy: float = 0.0


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """The full planning instance"""
    name: str
    zones: Tuple[Zone, ...]
    routes: Tuple[Route, ...] = ()
    gen_techs: Tuple[GenTech, ...] = ()
    vre_bins: Tuple[VreSupplyBin, ...] = ()
    storage_techs: Tuple[StorageTech, ...] = ()
    truck_types: Tuple[TruckType, ...] = ()
    pipeline_types: Tuple[PipelineType, ...] = ()
    policy: Policy = field(default_factory=Policy)
    existing: Tuple[ExistingCapacity, ...] = ()

    @property
    def n_hours(self) -> int:
        return len(self.zones[0].demand_power) if self.zones else 0

    @property
    def zone_ids(self) -> List[int]:
        return [z.id for z in self.zones]

    def zone(self, zone_id: int) -> Zone:
        for z in self.zones:
            if z.id == zone_id:
                return z
        raise KeyError(f"Unknown zone {zone_id}")

    def gen_tech(self, tech_id: str) -> GenTech:
        for t in self.gen_techs:
            if t.id == tech_id:
                return t
        raise KeyError(f"Unknown generation technology {tech_id!r}")

    def route(self, i: int, j: int) -> Optional[Route]:
        key = (min(i, j), max(i, j))
        for r in self.routes:
            if r.key == key:
                return r
        return None

    def distance(self, i: int, j: int) -> float:
        r = self.route(i, j)
        if r is None:
            raise KeyError(f"No route between zones {i} and {j}")
        return r.distance_miles

    def existing_power(self, tech_id: str, zone_id: int) -> float:
        return sum(e.power for e in self.existing if e.tech_id == tech_id and e.zone == zone_id)

    def existing_energy(self, tech_id: str, zone_id: int) -> float:
        return sum(e.energy for e in self.existing if e.tech_id == tech_id and e.zone == zone_id)

    def bins_in(self, zone_id: int) -> Iterator[VreSupplyBin]:
        return (b for b in self.vre_bins if b.zone == zone_id)

    def with_policy(self, **changes) -> 'SystemSpec':
        return replace(self, policy=replace(self.policy, **changes))

    def catalog_summary(self) -> Dict[str, int]:
        return {
            'zones': len(self.zones),
            'routes': len(self.routes),
            'gen_techs': len(self.gen_techs),
            'vre_bins': len(self.vre_bins),
            'storage_techs': len(self.storage_techs),
            'truck_types': len(self.truck_types),
            'pipeline_types': len(self.pipeline_types),
            'hours': self.n_hours,
        }
