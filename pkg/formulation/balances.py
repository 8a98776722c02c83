"""
Nodal supply-demand balances for electricity and hydrogen
"""
import logging
from typing import List

from core.coefficients import (
    electricity_per_output, h2_input_for_power, line_delivery_fraction,
    pipeline_electricity_per_tonne, travel_hours, truck_delivery_fraction,
)
from core.models import Sector
from formulation.base_builder import FamilyBuilder
from formulation.indexing import h2_routes
from formulation.variables import VarKind

logger = logging.getLogger(__name__)


class PowerBalanceBuilder(FamilyBuilder):
    """
    One equality per (zone, week, hour):

    generation + discharge - charge + delivered imports - exports + nse
      - electrolysis and auxiliary loads - conditioning electricity = demand
    """

    family = 'power_balance'

    def _build(self):
        policy = self.spec.policy
        for zone in self.spec.zones:
            for w in self.weeks():
                terms = []
                for tech, _, cols in self.gen_outputs(zone):
                    if tech.sector is Sector.POWER:
                        terms.append((cols[w], 1.0))
                    load = electricity_per_output(tech)
                    if load:
                        terms.append((cols[w], -load))

                for s in self.storages(zone):
                    charge = self.index.block(VarKind.CHARGE, (s.id, zone.id))[w]
                    if s.carrier.is_hydrogen:
                        if s.charge_electricity:
                            terms.append((charge, -s.charge_electricity))
                        continue
                    discharge = self.index.block(VarKind.DISCHARGE, (s.id, zone.id))[w]
                    terms += [(discharge, 1.0), (charge, -1.0)]

                for (a, b), cols in self.index.items(VarKind.LINE_FLOW):
                    if b == zone.id:
                        miles = self.spec.distance(a, b)
                        terms.append((cols[w], line_delivery_fraction(miles, policy)))
                    elif a == zone.id:
                        terms.append((cols[w], -1.0))

                for (truck_id, z), cols in self.index.items(VarKind.TRUCK_LOAD):
                    if z != zone.id:
                        continue
                    truck = next(t for t in self.spec.truck_types if t.id == truck_id)
                    if truck.loading_electricity:
                        terms.append((cols[w], -truck.payload_tonne * truck.loading_electricity))

                for (pipe_id, a, b), cols in self.index.items(VarKind.PIPELINE_FLOW):
                    if a != zone.id:
                        continue
                    pipe = next(p for p in self.spec.pipeline_types if p.id == pipe_id)
                    elec = pipeline_electricity_per_tonne(pipe, self.spec.distance(a, b))
                    if elec:
                        terms.append((cols[w], -elec))

                terms.append((self.index.block(VarKind.NSE_POWER, (zone.id,))[w], 1.0))
                rows = self.problem.add_rows(terms, 'E', self.timeline.demand(zone.id, w),
                                             self.family, (zone.id,), week=w, n=self.P)
                self.problem.set_row_weight(rows, self.weight(w))


class H2BalanceBuilder(FamilyBuilder):
    """
    One equality per (zone, week, hour) when the H2 sector is active:

    production + discharge - charge + payload * (unloads - loads)
      - transit boiloff on arriving full trucks + pipeline deliveries in
      - pipeline flow out + nse - G2P fuel = H2 demand
    """

    family = 'h2_balance'

    def _build(self):
        if not self.h2_active:
            return
        routes = h2_routes(self.spec)
        for zone in self.spec.zones:
            for w in self.weeks():
                terms = []
                for tech, _, cols in self.gen_outputs(zone):
                    if tech.sector is Sector.HYDROGEN:
                        terms.append((cols[w], 1.0))
                    elif tech.is_g2p:
                        terms.append((cols[w], -h2_input_for_power(tech, 1.0)))

                for s in self.storages(zone):
                    if not s.carrier.is_hydrogen:
                        continue
                    terms.append((self.index.block(VarKind.DISCHARGE, (s.id, zone.id))[w], 1.0))
                    terms.append((self.index.block(VarKind.CHARGE, (s.id, zone.id))[w], -1.0))

                terms += self._truck_terms(zone.id, w, routes)
                terms += self._pipeline_terms(zone.id, w)
                terms.append((self.index.block(VarKind.NSE_H2, (zone.id,))[w], 1.0))
                rows = self.problem.add_rows(terms, 'E', self.timeline.h2_demand(zone.id, w),
                                             self.family, (zone.id,), week=w, n=self.P)
                self.problem.set_row_weight(rows, self.weight(w))

    def _truck_terms(self, zone_id: int, w: int, routes) -> List:
        terms = []
        for truck in self.spec.truck_types:
            unload = self.index.block(VarKind.TRUCK_UNLOAD, (truck.id, zone_id))
            if unload is None:
                continue
            load = self.index.block(VarKind.TRUCK_LOAD, (truck.id, zone_id))
            terms += [(unload[w], truck.payload_tonne), (load[w], -truck.payload_tonne)]
            if truck.boiloff_per_day <= 0:
                continue
            for i, j, miles in routes:
                for a, b in ((i, j), (j, i)):
                    if b != zone_id:
                        continue
                    tau = travel_hours(miles, truck.avg_speed_mph)
                    lost = truck.payload_tonne * (1.0 - truck_delivery_fraction(truck, tau))
                    dep = self.index.block(VarKind.TRUCK_DEPARTURE, (truck.id, a, b, 'full'))[w]
                    terms.append((self.previous(dep, tau), -lost))
        return terms

    def _pipeline_terms(self, zone_id: int, w: int) -> List:
        terms = []
        for (pipe_id, a, b), flow in self.index.items(VarKind.PIPELINE_FLOW):
            delivery = self.index.block(VarKind.PIPELINE_DELIVERY, (pipe_id, a, b))
            if a == zone_id:
                terms.append((flow[w], -1.0))
            if b == zone_id:
                terms.append(((delivery if delivery is not None else flow)[w], 1.0))
        return terms


def add_power_balance(problem, spec, timeline):
    PowerBalanceBuilder(problem, spec, timeline).build()


def add_h2_balance(problem, spec, timeline):
    H2BalanceBuilder(problem, spec, timeline).build()
