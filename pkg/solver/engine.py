"""
Backend selection for solving a PlanningProblem
"""
import logging
from typing import Optional

from core.config import SOLVER_BACKENDS, SolverSettings
from core.exceptions import SolverError
from solver.external import solve_with_highs
from solver.simplex import SolverOptions, solve_reference
from solver.solution import Solution

logger = logging.getLogger(__name__)


def options_from_settings(settings: SolverSettings) -> SolverOptions:
    return SolverOptions(tolerance=settings.tolerance, max_iters=settings.max_iters, scaling=settings.scaling,
                         backend=settings.backend, auto_nnz_limit=settings.auto_nnz_limit)


def choose_backend(problem, options: SolverOptions) -> str:
    if options.backend not in SOLVER_BACKENDS:
        raise SolverError(f"unknown solver backend {options.backend!r}")
    if options.backend != 'auto':
        return options.backend
    return 'highs' if problem.nnz > options.auto_nnz_limit else 'reference'


def solve(problem, options: Optional[SolverOptions] = None) -> Solution:
    """
    Solve with the configured backend

    'auto' uses the reference simplex for small problems and HiGHS once the
    matrix has more than ``auto_nnz_limit`` nonzeros.
    """
    options = options or SolverOptions()
    backend = choose_backend(problem, options)
    logger.info("Solving %d x %d problem (%d nonzeros) with %s backend",
                problem.n_rows, problem.n_vars, problem.nnz, backend)
    if backend == 'highs':
        return solve_with_highs(problem, options.max_iters)
    return solve_reference(problem, options)
