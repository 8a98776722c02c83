"""
Allocation of every decision variable for a spec and timeline
"""
import logging
import math
from typing import List, Tuple

import numpy as np

from core.coefficients import travel_hours
from core.exceptions import BuildError
from core.models import GenTech, Sector, SystemSpec
from core.timeslices import ReducedTimeline
from formulation.problem import BuildOptions
from formulation.variables import VariableIndex, VarKind

logger = logging.getLogger(__name__)

TRUCK_STATES = ('full', 'empty')


def uc_applies(tech: GenTech, options: BuildOptions) -> bool:
    """Linearized commitment for thermal plants; gas H2 plants only when not flexible"""
    if not tech.uc_modelled:
        return False
    return tech.sector is Sector.POWER or not options.smr_flexible


def included_gen_techs(spec: SystemSpec) -> List[GenTech]:
    """Technologies that get columns; conversion techs drop out of decoupled builds"""
    if spec.policy.coupling_enabled:
        return list(spec.gen_techs)
    return [t for t in spec.gen_techs if not t.is_conversion]


def hydrogen_active(spec: SystemSpec) -> bool:
    """Whether the H2 balance exists at all for this build"""
    if any(float(np.max(z.demand_h2, initial=0.0)) > 0 for z in spec.zones):
        return True
    techs = included_gen_techs(spec)
    if any(t.sector is Sector.HYDROGEN or t.is_g2p for t in techs):
        return True
    if any(s.carrier.is_hydrogen for s in spec.storage_techs):
        return True
    return bool(h2_routes(spec)) and bool(spec.truck_types or spec.pipeline_types)


def h2_routes(spec: SystemSpec) -> List[Tuple[int, int, float]]:
    """Undirected routes open to H2 transport as (i, j, miles) with i < j"""
    return [(r.key[0], r.key[1], r.distance_miles) for r in spec.routes
            if r.h2_transport_allowed and r.from_zone != r.to_zone]


def index_variables(spec: SystemSpec, timeline: ReducedTimeline,
                    options: BuildOptions = None) -> Tuple[VariableIndex, bool]:
    """
    Allocate the complete column space

    Args:
        spec: Validated planning instance
        timeline: Representative weeks
        options: Build options (storage linkage, SMR flexibility)

    Returns:
        (index, whether the H2 sector is active)
    """
    options = options or BuildOptions()
    W, P = timeline.n_weeks, timeline.period_hours
    idx = VariableIndex()
    h2 = hydrogen_active(spec)

    for tech in included_gen_techs(spec):
        if tech.sector is Sector.HYDROGEN and not h2:
            continue
        for zone in spec.zones:
            if not tech.allowed_in(zone):
                continue
            if tech.is_vre or tech.energy_budget:
                for b in spec.bins_in(zone.id):
                    if b.tech_id != tech.id:
                        continue
                    lb = max(0.0, b.min_capacity_mw - b.existing_capacity_mw)
                    ub = max(0.0, b.max_capacity_mw - b.existing_capacity_mw)
                    idx.add(VarKind.VRE_BIN_CAPACITY, b.key, lb=lb, ub=ub)
                    idx.add_block(VarKind.GEN_OUTPUT, b.key, W, P)
                continue
            coords = (tech.id, zone.id)
            idx.add(VarKind.GEN_CAPACITY, coords)
            idx.add_block(VarKind.GEN_OUTPUT, coords, W, P)
            if uc_applies(tech, options):
                for kind in (VarKind.COMMIT_LEVEL, VarKind.STARTUP, VarKind.SHUTDOWN):
                    idx.add_block(kind, coords, W, P)

    for storage in spec.storage_techs:
        if storage.carrier.is_hydrogen and not h2:
            continue
        for zone in spec.zones:
            if not storage.allowed_in(zone):
                continue
            coords = (storage.id, zone.id)
            idx.add(VarKind.STORAGE_POWER, coords)
            idx.add(VarKind.STORAGE_ENERGY, coords)
            idx.add_block(VarKind.CHARGE, coords, W, P)
            idx.add_block(VarKind.DISCHARGE, coords, W, P)
            idx.add_block(VarKind.INVENTORY, coords, W, P + 1)
            if options.storage_linkage == 'linked_chronological':
                for n in range(len(timeline.assignment)):
                    idx.add(VarKind.SOC_START, coords + (n,))
                for w in sorted({int(w) for w in timeline.assignment if w >= 0}):
                    idx.add(VarKind.SWING_UP, coords + (w,))
                    idx.add(VarKind.SWING_DOWN, coords + (w,))

    routes = h2_routes(spec) if h2 else []
    for truck in spec.truck_types if routes else ():
        idx.add(VarKind.TRUCK_COUNT, (truck.id,))
        for i, j, miles in routes:
            tau = travel_hours(miles, truck.avg_speed_mph)
            if tau >= P:
                raise BuildError(f"truck {truck.id} needs {tau} h between zones {i} and {j}; "
                                 f"the {P}-hour week is too short")
        for zone in spec.zones:
            idx.add(VarKind.LOADING_CAPACITY, (truck.id, zone.id))
            for state in TRUCK_STATES:
                idx.add_block(VarKind.TRUCKS_AT_ZONE, (truck.id, zone.id, state), W, P)
            idx.add_block(VarKind.TRUCK_LOAD, (truck.id, zone.id), W, P)
            idx.add_block(VarKind.TRUCK_UNLOAD, (truck.id, zone.id), W, P)
        for i, j, _ in routes:
            for a, b in ((i, j), (j, i)):
                for state in TRUCK_STATES:
                    idx.add_block(VarKind.TRUCK_DEPARTURE, (truck.id, a, b, state), W, P)
                    idx.add_block(VarKind.TRUCKS_IN_TRANSIT, (truck.id, a, b, state), W, P)

    for pipe in spec.pipeline_types if routes else ():
        for i, j, _ in routes:
            idx.add(VarKind.PIPELINE_UNITS, (pipe.id, i, j))
            for a, b in ((i, j), (j, i)):
                idx.add_block(VarKind.PIPELINE_FLOW, (pipe.id, a, b), W, P)
                if pipe.linepack_fraction > 0:
                    idx.add_block(VarKind.PIPELINE_DELIVERY, (pipe.id, a, b), W, P)
            if pipe.linepack_fraction > 0:
                idx.add_block(VarKind.LINEPACK, (pipe.id, i, j), W, P)

    for route in spec.routes:
        if not route.carries_power or route.from_zone == route.to_zone:
            continue
        i, j = route.key
        if route.power_expansion_allowed:
            idx.add(VarKind.LINE_CAPACITY_ADD, (i, j))
            flow_ub = math.inf
        else:
            flow_ub = route.existing_power_capacity_mw
        for a, b in ((i, j), (j, i)):
            idx.add_block(VarKind.LINE_FLOW, (a, b), W, P, ub=flow_ub)

    for zone in spec.zones:
        demand = np.vstack([timeline.demand(zone.id, w) for w in range(W)])
        idx.add_block(VarKind.NSE_POWER, (zone.id,), W, P, ub=demand)
    if h2:
        for zone in spec.zones:
            demand = np.vstack([timeline.h2_demand(zone.id, w) for w in range(W)])
            idx.add_block(VarKind.NSE_H2, (zone.id,), W, P, ub=demand)

    logger.debug("Indexed %d columns: %s", idx.n_vars, idx.summary())
    return idx, h2
