"""
HiGHS backend through scipy.optimize.linprog
"""
import logging
import time
from typing import Optional, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sp
from scipy.optimize import linprog

from core.config import Config
from core.exceptions import SolverError
from solver.solution import Solution

logger = logging.getLogger(__name__)

_LINPROG_STATUS = {0: 'optimal', 1: 'iteration_limit', 2: 'infeasible', 3: 'unbounded'}


def solve_arrays_with_highs(A: sp.csr_matrix, c: np.ndarray, senses: np.ndarray, rhs: np.ndarray,
                            lb: np.ndarray, ub: np.ndarray, max_iters: Optional[int] = None) -> Solution:
    """
    Solve min c.x over sense-annotated rows with HiGHS

    Greater-or-equal rows are negated into the inequality block, so their duals
    are the negated marginals. Duals follow the d(objective)/d(rhs) convention
    of the reference solver.
    """
    started = time.perf_counter()
    A = sp.csr_matrix(A)
    senses = np.asarray(senses)
    rhs = np.asarray(rhs, dtype=float)
    le = np.flatnonzero(senses == 'L')
    ge = np.flatnonzero(senses == 'G')
    eq = np.flatnonzero(senses == 'E')
    ineq = np.concatenate([le, ge])
    sign = np.concatenate([np.ones(le.size), -np.ones(ge.size)])

    A_ub = sp.diags(sign) @ A[ineq] if ineq.size else None
    b_ub = sign * rhs[ineq] if ineq.size else None
    A_eq = A[eq] if eq.size else None
    b_eq = rhs[eq] if eq.size else None
    options = {'presolve': True}
    if max_iters:
        options['maxiter'] = int(max_iters)

    res = linprog(np.asarray(c, dtype=float), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=np.column_stack([lb, ub]), method='highs', options=options)
    if res.status not in _LINPROG_STATUS:
        raise SolverError(f"HiGHS failed: {res.message}")
    status = _LINPROG_STATUS[res.status]

    n, m = A.shape[1], A.shape[0]
    x = np.asarray(res.x, dtype=float) if res.x is not None else np.full(n, np.nan)
    duals = np.zeros(m)
    if status == 'optimal':
        if ineq.size:
            duals[ineq] = sign * np.asarray(res.ineqlin.marginals)
        if eq.size:
            duals[eq] = np.asarray(res.eqlin.marginals)
    objective = float(res.fun) if res.fun is not None else float('nan')
    logger.info("HiGHS: %s, objective %.6g", status, objective)
    return Solution(
        status=status,
        objective=objective,
        primal=x,
        duals=duals,
        iterations=int(getattr(res, 'nit', 0) or 0),
        wall_time=time.perf_counter() - started,
        backend='highs',
        message=str(res.message),
    )


def solve_with_highs(problem, max_iters: Optional[int] = None) -> Solution:
    return solve_arrays_with_highs(problem.A, problem.c, problem.senses, problem.rhs,
                                   problem.lb, problem.ub, max_iters)


def solve_mps_with_highs(mps_path: str, solution_path: str) -> Tuple[Solution, str]:
    """
    Solve an exported MPS file and write the column_name,value solution CSV

    Returns:
        (solution, path of the solution file)
    """
    from solver.mps import read_mps

    model = read_mps(mps_path)
    solution = solve_arrays_with_highs(model.A, model.c, model.senses, model.rhs, model.lb, model.ub)
    if not solution.is_optimal:
        raise SolverError(f"{mps_path}: HiGHS returned {solution.status}")
    frame = pd.DataFrame({Config.SOLUTION_COLUMNS[0]: model.col_names,
                          Config.SOLUTION_COLUMNS[1]: solution.primal})
    frame.to_csv(solution_path, index=False, float_format='%.17g')
    logger.info("Wrote %d column values to %s", len(frame), solution_path)
    return solution, solution_path
