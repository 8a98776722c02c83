"""
Assembly of the full planning problem in a fixed family order
"""
import logging
import time
from typing import Optional

from core.models import SystemSpec
from core.timeslices import ReducedTimeline
from formulation.balances import add_h2_balance, add_power_balance
from formulation.indexing import index_variables
from formulation.networks import add_network_investment_and_flows
from formulation.objective import add_objective_and_policy
from formulation.problem import BuildOptions, PlanningProblem
from formulation.storage import add_storage_dynamics
from formulation.trucks import add_truck_dynamics
from formulation.unit_commitment import add_capacity_limits, add_unit_commitment

logger = logging.getLogger(__name__)

FAMILY_ORDER = (
    add_power_balance,
    add_h2_balance,
    add_capacity_limits,
    add_storage_dynamics,
    add_truck_dynamics,
    add_unit_commitment,
    add_network_investment_and_flows,
    add_objective_and_policy,
)


def build_problem(spec: SystemSpec, timeline: ReducedTimeline,
                  options: Optional[BuildOptions] = None) -> PlanningProblem:
    """
    Index variables, add every constraint family and the objective, then check

    Args:
        spec: Validated planning instance
        timeline: Representative weeks
        options: Storage linkage and SMR flexibility

    Returns:
        A checked PlanningProblem
    """
    started = time.perf_counter()
    options = options or BuildOptions()
    index, h2_active = index_variables(spec, timeline, options)
    problem = PlanningProblem(index, options)
    problem.meta['h2_active'] = h2_active
    problem.meta['coupling_enabled'] = spec.policy.coupling_enabled
    problem.meta['period_hours'] = timeline.period_hours
    for add_family in FAMILY_ORDER:
        add_family(problem, spec, timeline)
    problem.check()
    logger.info("Built problem for %s: %d rows, %d columns, %d nonzeros in %.2fs",
                spec.name, problem.n_rows, problem.n_vars, problem.nnz, time.perf_counter() - started)
    return problem
