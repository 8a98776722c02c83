import math

import pytest

from conftest import CCGT, CCGT_CCS, ELECTROLYZER, FUEL_CELL, SMR, SMR_CCS, WIND
from core.coefficients import (
    annual_capacity_cost, annuitize, captured_per_output, capex_per_capacity_unit,
    derive_operating_coefficients, electricity_input_for_h2, emissions_per_output, h2_input_for_power,
    levelized_cost, line_delivery_fraction, storage_retention_per_hour, travel_hours, truck_delivery_fraction,
)
from core.exceptions import ParameterError
from core.models import Carrier, Policy, StorageTech, TruckType


def test_capital_recovery_factor():
    assert annuitize(1000.0, 30, 0.07) == pytest.approx(80.59, abs=0.01)
    assert annuitize(1000.0, 10, 0.0) == pytest.approx(100.0)


@pytest.mark.parametrize('lifetime, rate', [(0, 0.07), (-5, 0.07), (20, -0.01)])
def test_annuitize_rejects_bad_inputs(lifetime, rate):
    with pytest.raises(ParameterError):
        annuitize(1000.0, lifetime, rate)


def test_electrolysis_and_g2p_conversions():
    assert electricity_input_for_h2(ELECTROLYZER, 1.0) == pytest.approx(45.04, abs=0.01)
    assert h2_input_for_power(FUEL_CELL, 1.0) == pytest.approx(1.0 / (0.60 * 33.33))


def test_smr_fuel_cost_at_reference_gas_price():
    coeffs = derive_operating_coefficients(SMR, Policy(co2_price=0.0, gas_price=5.4))
    assert coeffs.fuel == pytest.approx(808.0, abs=0.5)
    assert coeffs.co2_cost == 0.0
    assert coeffs.emissions == 8.9


def test_carbon_price_and_capture_costs():
    policy = Policy(co2_price=100.0, co2_transport_cost=20.0)
    coeffs = derive_operating_coefficients(SMR_CCS, policy)
    assert captured_per_output(SMR_CCS) == pytest.approx(9.0)
    assert coeffs.co2_transport_cost == pytest.approx(180.0)
    assert coeffs.co2_cost == pytest.approx(100.0)
    assert coeffs.marginal_cost == pytest.approx(coeffs.fuel + 280.0)


def test_gas_plant_emissions_follow_fuel_burn():
    assert emissions_per_output(CCGT) == pytest.approx(6 * 0.05306)
    assert emissions_per_output(CCGT_CCS) == pytest.approx(7 * 0.05306 * 0.1)
    assert emissions_per_output(WIND) == 0.0


def test_electrolyzer_capex_quoted_per_electric_kw():
    per_tph = capex_per_capacity_unit(ELECTROLYZER)
    assert per_tph == pytest.approx(450 * 45.04 * 1000, rel=1e-3)
    # about $330 per tonne of fixed cost at full utilization
    assert annual_capacity_cost(ELECTROLYZER, Policy()) / 8760 == pytest.approx(329.5, abs=1.0)


def test_wind_levelized_cost_at_flat_profile():
    assert levelized_cost(WIND, Policy(), 0.4) == pytest.approx(34.96, abs=0.05)


def test_levelized_cost_rejects_zero_utilization():
    with pytest.raises(ParameterError):
        levelized_cost(SMR, Policy(), 0.0)


def test_gas_tech_without_gas_price():
    with pytest.raises(ParameterError):
        derive_operating_coefficients(SMR, Policy(gas_price=None))


def test_boiloff_and_travel():
    tank = StorageTech(id='lh2', carrier=Carrier.HYDROGEN_LIQUID, capex_power_or_flow=0, capex_energy=1,
                       boiloff_per_day=0.03)
    assert storage_retention_per_hour(tank) ** 24 == pytest.approx(0.97)
    truck = TruckType(id='lt', carrier=Carrier.HYDROGEN_LIQUID, payload_tonne=4, capex_per_truck=1,
                      opex_per_mile=1, loading_station_capex=0, loading_electricity=0, boiloff_per_day=0.03)
    assert travel_hours(100, 35) == 3
    assert travel_hours(70, 35) == 2
    assert truck_delivery_fraction(truck, 12) == pytest.approx(0.985)
    assert line_delivery_fraction(250, Policy()) == pytest.approx(0.975)
    assert math.isclose(truck_delivery_fraction(truck, 0), 1.0)


@pytest.mark.parametrize('lifetime, rate, expected', [(10, 0.07, 142.38), (20, 0.0, 50.0)])
def test_annuity_reference_values(lifetime, rate, expected):
    assert annuitize(1000.0, lifetime, rate) == pytest.approx(expected, abs=0.01)


def test_ccgt_fuel_and_vom():
    coeffs = derive_operating_coefficients(CCGT, Policy(co2_price=0.0, gas_price=5.4))
    assert coeffs.fuel + coeffs.vom == pytest.approx(35.4)


def test_liquid_truck_loses_cargo_on_the_road():
    truck = TruckType(id='lt', carrier=Carrier.HYDROGEN_LIQUID, payload_tonne=4, capex_per_truck=1,
                      opex_per_mile=1, loading_station_capex=0, loading_electricity=0, boiloff_per_day=0.03)
    assert travel_hours(317, 35) == 10
    assert 4 * truck_delivery_fraction(truck, 10) == pytest.approx(3.95, abs=0.01)
