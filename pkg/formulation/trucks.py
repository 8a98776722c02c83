"""
Truck fleet dynamics: trucks are mobile storage with full and empty states.

Travel time on a route is ceil(distance / speed) hours. Trucks departing
near the end of a week arrive at (h + tau) mod P, and fleet states wrap
within the week.
"""
import logging

from core.coefficients import travel_hours
from formulation.base_builder import FamilyBuilder
from formulation.indexing import TRUCK_STATES, h2_routes
from formulation.variables import VarKind

logger = logging.getLogger(__name__)


class TruckBuilder(FamilyBuilder):
    family = 'trucks'

    def _build(self):
        routes = h2_routes(self.spec)
        directed = [(a, b, miles) for i, j, miles in routes for a, b in ((i, j), (j, i))]
        for truck in self.spec.truck_types:
            fleet = self.index.scalar(VarKind.TRUCK_COUNT, (truck.id,))
            if fleet is None:
                continue
            tau = {(a, b): travel_hours(miles, truck.avg_speed_mph) for a, b, miles in directed}
            for w in self.weeks():
                self._conservation(truck, fleet, directed, w)
                self._transit(truck, directed, tau, w)
                for zone in self.spec.zones:
                    self._zone_balance(truck, zone.id, directed, tau, w)
                    self._loading_limits(truck, zone.id, w)

    def _conservation(self, truck, fleet, directed, w):
        terms = [(fleet, -1.0)]
        for zone in self.spec.zones:
            for state in TRUCK_STATES:
                terms.append((self.index.block(VarKind.TRUCKS_AT_ZONE, (truck.id, zone.id, state))[w], 1.0))
        for a, b, _ in directed:
            for state in TRUCK_STATES:
                terms.append((self.index.block(VarKind.TRUCKS_IN_TRANSIT, (truck.id, a, b, state))[w], 1.0))
        self.problem.add_rows(terms, 'E', 0.0, 'truck_conservation', (truck.id,), week=w, n=self.P)

    def _transit(self, truck, directed, tau, w):
        """In-transit count equals the departures of the last tau hours"""
        for a, b, _ in directed:
            for state in TRUCK_STATES:
                transit = self.index.block(VarKind.TRUCKS_IN_TRANSIT, (truck.id, a, b, state))[w]
                dep = self.index.block(VarKind.TRUCK_DEPARTURE, (truck.id, a, b, state))[w]
                terms = [(transit, 1.0)] + [(self.previous(dep, d), -1.0) for d in range(tau[(a, b)])]
                self.problem.add_rows(terms, 'E', 0.0, 'truck_transit', (truck.id, a, b, state),
                                      week=w, n=self.P)

    def _zone_balance(self, truck, zone_id, directed, tau, w):
        load = self.index.block(VarKind.TRUCK_LOAD, (truck.id, zone_id))[w]
        unload = self.index.block(VarKind.TRUCK_UNLOAD, (truck.id, zone_id))[w]
        for state in TRUCK_STATES:
            at = self.index.block(VarKind.TRUCKS_AT_ZONE, (truck.id, zone_id, state))[w]
            terms = [(at, 1.0), (self.previous(at), -1.0)]
            for a, b, _ in directed:
                dep = self.index.block(VarKind.TRUCK_DEPARTURE, (truck.id, a, b, state))[w]
                if a == zone_id:
                    terms.append((dep, 1.0))
                if b == zone_id:
                    terms.append((self.previous(dep, tau[(a, b)]), -1.0))
            # Loading turns empty trucks full, unloading the reverse
            sign = -1.0 if state == 'full' else 1.0
            terms += [(load, sign), (unload, -sign)]
            self.problem.add_rows(terms, 'E', 0.0, 'truck_zone_balance', (truck.id, zone_id, state),
                                  week=w, n=self.P)

    def _loading_limits(self, truck, zone_id, w):
        station = self.index.scalar(VarKind.LOADING_CAPACITY, (truck.id, zone_id))
        for kind, family in ((VarKind.TRUCK_LOAD, 'loading_limit'), (VarKind.TRUCK_UNLOAD, 'unloading_limit')):
            cols = self.index.block(kind, (truck.id, zone_id))[w]
            self.problem.add_rows([(cols, truck.payload_tonne), (station, -1.0)], 'L', 0.0,
                                  family, (truck.id, zone_id), week=w, n=self.P)


def add_truck_dynamics(problem, spec, timeline):
    TruckBuilder(problem, spec, timeline).build()
