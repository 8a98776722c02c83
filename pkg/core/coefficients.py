"""
Cost and emission coefficients derived from raw catalog parameters.

Capacities are MW on the power side and tonne/h on the H2 side. Every
conversion between the two goes through an efficiency, and every $/kW figure
is turned into $/MW or $/(tonne/h) here and nowhere else.
"""
import math
from dataclasses import dataclass
from typing import Dict

from core.config import Config
from core.exceptions import ParameterError
from core.models import CapexBasis, GenTech, Policy, Sector, StorageTech, TruckType, PipelineType


@dataclass(frozen=True)
class OperatingCoefficients:
    """Per-output marginal cost components and emission rates"""
    vom: float
    fuel: float
    co2_cost: float
    co2_transport_cost: float
    emissions: float
    captured: float

    @property
    def marginal_cost(self) -> float:
        return self.vom + self.fuel + self.co2_cost + self.co2_transport_cost

    def as_dict(self) -> Dict[str, float]:
        return {
            'vom': self.vom,
            'fuel': self.fuel,
            'co2': self.co2_cost,
            'co2_transport': self.co2_transport_cost,
            'emissions': self.emissions,
            'captured': self.captured,
        }


def annuitize(capex: float, lifetime_years: float, discount_rate: float) -> float:
    """
    Spread an overnight cost over the asset life with the capital recovery factor

    Args:
        capex: Overnight cost per unit
        lifetime_years: Economic life, > 0
        discount_rate: Annual rate, >= 0

    Returns:
        Equivalent cost per unit-year
    """
    if lifetime_years is None or not lifetime_years > 0:
        raise ParameterError(f"lifetime must be positive, got {lifetime_years}")
    if discount_rate < 0:
        raise ParameterError(f"discount rate must be non-negative, got {discount_rate}")
    if discount_rate == 0:
        return capex / lifetime_years
    r = discount_rate
    return capex * r / (1.0 - (1.0 + r) ** (-lifetime_years))


def electricity_input_for_h2(tech: GenTech, h2_out: float) -> float:
    """MWh of electricity an electrolyzer draws to produce ``h2_out`` tonnes"""
    eff = tech.efficiency_lhv
    if eff is None or not 0 < eff <= 1:
        raise ParameterError(f"{tech.id}: efficiency_lhv must lie in (0, 1], got {eff}")
    return h2_out * Config.H2_LHV_MWH_PER_TONNE / eff


def h2_input_for_power(tech: GenTech, mwh_out: float) -> float:
    """Tonnes of H2 a G2P plant burns to deliver ``mwh_out``"""
    eff = tech.efficiency_lhv
    if eff is None or not 0 < eff <= 1:
        raise ParameterError(f"{tech.id}: efficiency_lhv must lie in (0, 1], got {eff}")
    return mwh_out / (eff * Config.H2_LHV_MWH_PER_TONNE)


def electricity_per_output(tech: GenTech) -> float:
    """Electricity drawn per unit output: electrolysis input plus auxiliary loads"""
    if tech.is_electrolyzer:
        return electricity_input_for_h2(tech, 1.0)
    return tech.electricity_input_per_output


def fuel_mmbtu_per_output(tech: GenTech) -> float:
    """Natural gas burned per MWh (power) or per tonne (H2); zero for non gas techs"""
    if not tech.burns_gas:
        return 0.0
    if tech.sector is Sector.POWER:
        if tech.heat_rate is None:
            raise ParameterError(f"{tech.id}: gas-fired power tech needs a heat_rate")
        return tech.heat_rate
    if tech.heat_rate is not None:
        return tech.heat_rate
    if tech.efficiency_lhv is None or not 0 < tech.efficiency_lhv <= 1:
        raise ParameterError(f"{tech.id}: gas-fired H2 tech needs heat_rate or efficiency_lhv")
    return Config.H2_LHV_MWH_PER_TONNE / tech.efficiency_lhv * Config.MMBTU_PER_MWH


def emissions_per_output(tech: GenTech) -> float:
    """Emitted tonne CO2 per output, from the catalog or from the fuel burn"""
    if tech.emissions_intensity is not None:
        return tech.emissions_intensity
    return fuel_mmbtu_per_output(tech) * Config.GAS_CO2_TONNE_PER_MMBTU * (1.0 - tech.capture_rate)


def captured_per_output(tech: GenTech) -> float:
    if tech.capture_rate <= 0:
        return 0.0
    if tech.capture_rate >= 1:
        raise ParameterError(f"{tech.id}: capture_rate must be below 1")
    return emissions_per_output(tech) * tech.capture_rate / (1.0 - tech.capture_rate)


def derive_operating_coefficients(tech: GenTech, policy: Policy) -> OperatingCoefficients:
    """
    Marginal cost and emission rate per unit output

    Args:
        tech: Generation or H2 production technology
        policy: Prices applied to fuel and carbon

    Returns:
        OperatingCoefficients with each cost component reported separately
    """
    mmbtu = fuel_mmbtu_per_output(tech)
    if mmbtu > 0 and policy.gas_price is None:
        raise ParameterError(f"{tech.id}: burns natural gas but the policy has no gas_price")
    fuel = mmbtu * (policy.gas_price or 0.0)
    emissions = emissions_per_output(tech)
    captured = captured_per_output(tech)
    return OperatingCoefficients(
        vom=tech.vom,
        fuel=fuel,
        co2_cost=emissions * policy.co2_price,
        co2_transport_cost=captured * policy.co2_transport_cost,
        emissions=emissions,
        captured=captured,
    )


def capex_per_capacity_unit(tech: GenTech) -> float:
    """Overnight cost per MW (power) or per tonne/h (H2) of output capacity"""
    if tech.sector is Sector.POWER:
        return tech.capex_per_unit_power * 1000.0
    if tech.capex_basis is CapexBasis.ELECTRIC_INPUT:
        return tech.capex_per_unit_power * electricity_input_for_h2(tech, 1.0) * 1000.0
    return tech.capex_per_unit_power * Config.H2_LHV_MWH_PER_TONNE * 1000.0


def fom_per_capacity_unit(tech: GenTech) -> float:
    if tech.sector is Sector.POWER:
        return tech.fom_per_year * 1000.0
    if tech.capex_basis is CapexBasis.ELECTRIC_INPUT:
        return tech.fom_per_year * electricity_input_for_h2(tech, 1.0) * 1000.0
    return tech.fom_per_year * Config.H2_LHV_MWH_PER_TONNE * 1000.0


def annual_capacity_cost(tech: GenTech, policy: Policy, adder_per_kw: float = 0.0) -> float:
    """Annuitized capex plus FOM per unit of output capacity per year"""
    capex = capex_per_capacity_unit(tech) + adder_per_kw * 1000.0
    return annuitize(capex, tech.lifetime_years, policy.discount_rate) + fom_per_capacity_unit(tech)


def storage_capacity_costs(storage: StorageTech, policy: Policy) -> Dict[str, float]:
    """Annual cost per unit of power/flow capacity and per unit of energy capacity"""
    if storage.carrier.is_hydrogen:
        power_scale = energy_scale = 1.0
    else:
        power_scale = energy_scale = 1000.0
    power = annuitize(storage.capex_power_or_flow * power_scale, storage.lifetime_years, policy.discount_rate)
    power += storage.fom_per_year * power_scale
    energy = annuitize(storage.capex_energy * energy_scale, storage.lifetime_years, policy.discount_rate)
    return {'power': power, 'energy': energy}


def storage_efficiency_per_side(storage: StorageTech) -> float:
    return math.sqrt(storage.round_trip_efficiency)


def storage_retention_per_hour(storage: StorageTech) -> float:
    """Fraction of inventory kept after one hour of boiloff"""
    if storage.boiloff_per_day <= 0:
        return 1.0
    return (1.0 - storage.boiloff_per_day) ** (1.0 / Config.HOURS_PER_DAY)


def travel_hours(distance_miles: float, speed_mph: float) -> int:
    return int(math.ceil(distance_miles / speed_mph))


def truck_delivery_fraction(truck: TruckType, hours: int) -> float:
    """Share of a full load still on board after ``hours`` on the road"""
    return 1.0 - truck.boiloff_per_day * hours / Config.HOURS_PER_DAY


def truck_annual_cost(truck: TruckType, policy: Policy) -> float:
    return annuitize(truck.capex_per_truck, truck.lifetime_years, policy.discount_rate)


def loading_station_annual_cost(truck: TruckType, policy: Policy) -> float:
    return annuitize(truck.loading_station_capex, truck.lifetime_years, policy.discount_rate)


def pipeline_annual_cost(pipe: PipelineType, distance_miles: float, policy: Policy,
                         capex_multiplier: float = 1.0) -> float:
    """Annual cost of one pipeline unit over a route, compression included"""
    capex = (capex_multiplier * pipe.capex_per_mile_per_unit * distance_miles
             + pipe.compression_capex_per_mile * distance_miles
             + pipe.compression_capex_fixed)
    return annuitize(capex, pipe.lifetime_years, policy.discount_rate)


def pipeline_electricity_per_tonne(pipe: PipelineType, distance_miles: float) -> float:
    return pipe.compression_electricity_per_tonne_mile * distance_miles + pipe.compression_electricity_per_tonne


def line_annual_cost_per_mw(distance_miles: float, policy: Policy) -> float:
    capex = policy.power_line_cost_per_mw_mile * distance_miles
    return annuitize(capex, policy.line_lifetime_years, policy.discount_rate)


def line_delivery_fraction(distance_miles: float, policy: Policy) -> float:
    return 1.0 - policy.power_loss_per_100_miles * distance_miles / 100.0


def levelized_cost(tech: GenTech, policy: Policy, utilization: float) -> float:
    """
    Levelized cost per unit output at a fixed utilization, carbon price excluded

    Args:
        tech: Technology to evaluate
        policy: Supplies gas price, discount rate and CO2 transport cost
        utilization: Capacity factor in (0, 1]

    Returns:
        $/MWh for power techs, $/tonne for H2 techs
    """
    if not 0 < utilization <= 1:
        raise ParameterError(f"utilization must lie in (0, 1], got {utilization}")
    coeffs = derive_operating_coefficients(tech, policy)
    fixed = annual_capacity_cost(tech, policy) / (Config.HOURS_PER_YEAR * utilization)
    return fixed + coeffs.vom + coeffs.fuel + coeffs.co2_transport_cost
