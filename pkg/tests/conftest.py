"""
Shared builders for small, hand-checkable planning instances
"""
import math
import os

import numpy as np
import pytest

from core.config import Config
from core.models import (
    CapexBasis, Carrier, Fuel, GenTech, PipelineType, Policy, Route, Sector, StorageTech, SystemSpec, TruckType,
    VreSupplyBin, Zone,
)
from core.timeslices import ReducedTimeline

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')

WIND = GenTech(id='wind', sector=Sector.POWER, capex_per_unit_power=1086, fom_per_year=35, vom=0,
               lifetime_years=30, is_vre=True)
CCGT = GenTech(id='ccgt', sector=Sector.POWER, capex_per_unit_power=817, fom_per_year=11, vom=3,
               lifetime_years=30, heat_rate=6, fuel=Fuel.NATURAL_GAS)
CCGT_CCS = GenTech(id='ccgt_ccs', sector=Sector.POWER, capex_per_unit_power=1798, fom_per_year=34, vom=7,
                   lifetime_years=30, heat_rate=7, fuel=Fuel.NATURAL_GAS, capture_rate=0.9)
SMR = GenTech(id='smr', sector=Sector.HYDROGEN, capex_per_unit_power=910, fom_per_year=0, vom=0,
              lifetime_years=25, efficiency_lhv=0.76, emissions_intensity=8.9, fuel=Fuel.NATURAL_GAS,
              is_central=True)
SMR_CCS = GenTech(id='smr_ccs', sector=Sector.HYDROGEN, capex_per_unit_power=1280, fom_per_year=0, vom=0,
                  lifetime_years=25, efficiency_lhv=0.69, emissions_intensity=1.0, capture_rate=0.9,
                  fuel=Fuel.NATURAL_GAS, is_central=True)
ELECTROLYZER = GenTech(id='electrolyzer', sector=Sector.HYDROGEN, capex_per_unit_power=450, fom_per_year=0,
                       vom=0, lifetime_years=10, efficiency_lhv=0.74, emissions_intensity=0.0,
                       fuel=Fuel.ELECTRICITY, capex_basis=CapexBasis.ELECTRIC_INPUT)
FUEL_CELL = GenTech(id='fuel_cell', sector=Sector.POWER, capex_per_unit_power=1264, fom_per_year=0, vom=0,
                    lifetime_years=10, efficiency_lhv=0.60, emissions_intensity=0.0, fuel=Fuel.HYDROGEN)


def flat(value: float, hours: int) -> np.ndarray:
    arr = np.full(hours, float(value))
    arr.setflags(write=False)
    return arr


def make_zone(zone_id: int, hours: int, power_mw: float = 0.0, h2_tph: float = 0.0,
              central: bool = True) -> Zone:
    return Zone(id=zone_id, name=f'z{zone_id}', allows_central_h2_production=central,
                demand_power=flat(power_mw, hours), demand_h2=flat(h2_tph, hours))


def wind_bin(zone_id: int, hours: int, cf: float = 0.4, max_mw: float = math.inf) -> VreSupplyBin:
    return VreSupplyBin(tech_id='wind', zone=zone_id, bin_id=1, max_capacity_mw=max_mw,
                        interconnection_cost_adder=0.0, profile=flat(cf, hours))


def single_week(spec: SystemSpec, period_hours: int) -> ReducedTimeline:
    """One representative week standing for the whole year"""
    return ReducedTimeline.from_slices(spec, [0], period_hours,
                                       weights=[Config.HOURS_PER_YEAR / period_hours])


def h2_switching_spec(hours: int = 6, co2_price: float = 0.0, with_g2p: bool = False) -> SystemSpec:
    """
    One zone, flat 1 t/h refuelling demand and a small flat power load.

    Wind at a flat 0.4 capacity factor is the only electricity source, so
    every H2 route runs at full utilization and the cheapest one is easy to
    work out by hand.
    """
    techs = [WIND, SMR, SMR_CCS, ELECTROLYZER] + ([FUEL_CELL] if with_g2p else [])
    return SystemSpec(
        name='switching',
        zones=(make_zone(1, hours, power_mw=10.0, h2_tph=1.0),),
        gen_techs=tuple(techs),
        vre_bins=(wind_bin(1, hours),),
        policy=Policy(co2_price=co2_price),
    )


def delivery_spec(hours: int = 24) -> SystemSpec:
    """
    SMR in zone 1 serving a flat 1 t/h demand in zone 2, 100 miles away,
    by gas truck or pipeline. No electricity is involved.
    """
    truck = TruckType(id='gas_truck', carrier=Carrier.HYDROGEN_GAS, payload_tonne=1.0, capex_per_truck=100_000,
                      opex_per_mile=1.5, loading_station_capex=0.0, loading_electricity=0.0,
                      avg_speed_mph=35.0, lifetime_years=15)
    pipe = PipelineType(id='pipe', flow_capacity_tonne_per_hour_per_unit=1.0, capex_per_mile_per_unit=600_000,
                        lifetime_years=40)
    return SystemSpec(
        name='delivery',
        zones=(make_zone(1, hours), make_zone(2, hours, h2_tph=1.0, central=False)),
        routes=(Route(from_zone=1, to_zone=2, distance_miles=100.0),),
        gen_techs=(SMR,),
        truck_types=(truck,),
        pipeline_types=(pipe,),
        policy=Policy(co2_price=0.0),
    )


def drawdown_spec():
    """Demand in the first half of the day, wind only in the second half"""
    load = np.array([10.0] * 12 + [0.0] * 12)
    zone = Zone(id=1, name='z1', allows_central_h2_production=True, demand_power=load, demand_h2=np.zeros(24))
    wind = VreSupplyBin(tech_id='wind', zone=1, bin_id=1, max_capacity_mw=math.inf, interconnection_cost_adder=0.0,
                        profile=np.array([0.0] * 12 + [1.0] * 12))
    battery = StorageTech(id='battery', carrier=Carrier.ELECTRICITY, capex_power_or_flow=120, capex_energy=126,
                          lifetime_years=15)
    return SystemSpec(name='drawdown', zones=(zone,), gen_techs=(WIND,), vre_bins=(wind,), storage_techs=(battery,))


@pytest.fixture
def switching_spec():
    return h2_switching_spec()


@pytest.fixture
def toy_catalog_path():
    return os.path.join(DATA_DIR, 'toy', 'catalog.yaml')


PEAKER = GenTech(id='ocgt', sector=Sector.POWER, capex_per_unit_power=900, fom_per_year=12, vom=5,
                 lifetime_years=30, heat_rate=10, fuel=Fuel.NATURAL_GAS)


def regime_spec(co2_price: float = 100.0) -> SystemSpec:
    """
    Calm first half of the day, windy second half; a 1 t/h H2 load and a
    10 MW power peak in hours 0-2.

    Two MW of existing flat wind are free, so some electrolysis pays at any
    electrolyzer capex. New wind only blows in the windy half, so bulk
    electrolysis beats SMR with capture up to about 700 $/kW. The fuel cell,
    burning tank-shifted H2, beats the peaker below about 850 $/kW.
    """
    hours = 24
    calm = np.arange(hours) < 12
    load = np.where(np.arange(hours) < 3, 10.0, 0.0)
    zone = Zone(id=1, name='z1', allows_central_h2_production=True, demand_power=load,
                demand_h2=np.ones(hours))
    wind = GenTech(id='wind', sector=Sector.POWER, capex_per_unit_power=500, fom_per_year=13, vom=0,
                   lifetime_years=30, is_vre=True)
    bins = (
        VreSupplyBin(tech_id='wind', zone=1, bin_id=1, max_capacity_mw=math.inf, interconnection_cost_adder=0.0,
                     profile=np.where(calm, 0.0, 1.0)),
        VreSupplyBin(tech_id='wind', zone=1, bin_id=2, max_capacity_mw=2.0, interconnection_cost_adder=0.0,
                     profile=np.ones(hours), existing_capacity_mw=2.0),
    )
    tank = StorageTech(id='h2_tank', carrier=Carrier.HYDROGEN_GAS, capex_power_or_flow=0, capex_energy=100_000,
                       lifetime_years=20)
    return SystemSpec(
        name='regimes',
        zones=(zone,),
        gen_techs=(wind, PEAKER, SMR_CCS, ELECTROLYZER, FUEL_CELL),
        vre_bins=bins,
        storage_techs=(tank,),
        policy=Policy(co2_price=co2_price),
    )
