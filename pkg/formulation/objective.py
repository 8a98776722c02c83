"""
Annual system cost: annuitized investment plus weighted operating cost.

Each term is recorded under a "<sector>.<item>" category so reports can
split total cost between the power and H2 sectors.
"""
import logging

from core.coefficients import (
    annual_capacity_cost, derive_operating_coefficients, line_annual_cost_per_mw,
    loading_station_annual_cost, pipeline_annual_cost, storage_capacity_costs, truck_annual_cost,
)
from core.models import Sector
from formulation.base_builder import FamilyBuilder
from formulation.variables import VarKind

logger = logging.getLogger(__name__)


def sector_of(tech) -> str:
    return 'power' if tech.sector is Sector.POWER else 'h2'


class ObjectiveBuilder(FamilyBuilder):
    family = 'objective'

    def _build(self):
        policy = self.spec.policy
        add = self.problem.add_cost

        for (tech_id, _), col in self.index.items(VarKind.GEN_CAPACITY):
            tech = self.spec.gen_tech(tech_id)
            add(col, annual_capacity_cost(tech, policy), f'{sector_of(tech)}.capex')
        for key, col in self.index.items(VarKind.VRE_BIN_CAPACITY):
            tech = self.spec.gen_tech(key[0])
            b = next(b for b in self.spec.vre_bins if b.key == key)
            add(col, annual_capacity_cost(tech, policy, b.interconnection_cost_adder), 'power.capex')

        for coords, output in self.index.items(VarKind.GEN_OUTPUT):
            tech = self.spec.gen_tech(coords[0])
            sector = sector_of(tech)
            coeffs = derive_operating_coefficients(tech, policy)
            for w in self.weeks():
                weight = self.weight(w)
                for item, value in (('vom', coeffs.vom), ('fuel', coeffs.fuel), ('co2', coeffs.co2_cost),
                                    ('co2_transport', coeffs.co2_transport_cost)):
                    if value:
                        add(output[w], weight * value, f'{sector}.{item}')

        if policy.startup_cost_enabled:
            for coords, start in self.index.items(VarKind.STARTUP):
                tech = self.spec.gen_tech(coords[0])
                if tech.startup_cost and tech.unit_size > 0:
                    per_mw = tech.startup_cost / tech.unit_size
                    for w in self.weeks():
                        add(start[w], self.weight(w) * per_mw, f'{sector_of(tech)}.startup')

        for (storage_id, zone_id), col in self.index.items(VarKind.STORAGE_POWER):
            storage = next(s for s in self.spec.storage_techs if s.id == storage_id)
            sector = 'h2' if storage.carrier.is_hydrogen else 'power'
            costs = storage_capacity_costs(storage, policy)
            add(col, costs['power'], f'{sector}.storage')
            add(self.index.scalar(VarKind.STORAGE_ENERGY, (storage_id, zone_id)), costs['energy'], f'{sector}.storage')

        for (truck_id,), col in self.index.items(VarKind.TRUCK_COUNT):
            truck = next(t for t in self.spec.truck_types if t.id == truck_id)
            add(col, truck_annual_cost(truck, policy), 'h2.trucks')
        for (truck_id, _), col in self.index.items(VarKind.LOADING_CAPACITY):
            truck = next(t for t in self.spec.truck_types if t.id == truck_id)
            add(col, loading_station_annual_cost(truck, policy), 'h2.trucks')
        for (truck_id, a, b, _), dep in self.index.items(VarKind.TRUCK_DEPARTURE):
            truck = next(t for t in self.spec.truck_types if t.id == truck_id)
            per_trip = truck.opex_per_mile * self.spec.distance(a, b)
            if per_trip:
                for w in self.weeks():
                    add(dep[w], self.weight(w) * per_trip, 'h2.truck_opex')

        for (pipe_id, i, j), col in self.index.items(VarKind.PIPELINE_UNITS):
            pipe = next(p for p in self.spec.pipeline_types if p.id == pipe_id)
            add(col, pipeline_annual_cost(pipe, self.spec.distance(i, j), policy), 'h2.pipelines')

        for (i, j), col in self.index.items(VarKind.LINE_CAPACITY_ADD):
            add(col, line_annual_cost_per_mw(self.spec.distance(i, j), policy), 'power.lines')

        for _, nse in self.index.items(VarKind.NSE_POWER):
            for w in self.weeks():
                add(nse[w], self.weight(w) * policy.voll_power, 'power.nse')
        for _, nse in self.index.items(VarKind.NSE_H2):
            for w in self.weeks():
                # voll_h2 is quoted per kg
                add(nse[w], self.weight(w) * policy.voll_h2 * 1000.0, 'h2.nse')


def add_objective_and_policy(problem, spec, timeline):
    ObjectiveBuilder(problem, spec, timeline).build()
