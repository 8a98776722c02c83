"""
Independent check of a primal solution against the assembled problem
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from core.config import Config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RowViolation:
    row: int
    annotation: str
    family: str
    residual: float


@dataclass
class VerificationReport:
    max_residual: float
    max_bound_violation: float
    objective: float
    reported_objective: float
    violated_rows: Dict[str, int] = field(default_factory=dict)
    worst_rows: List[RowViolation] = field(default_factory=list)
    tolerance: float = Config.VERIFY_TOL

    @property
    def objective_gap(self) -> float:
        return abs(self.objective - self.reported_objective) / max(1.0, abs(self.objective))

    @property
    def passed(self) -> bool:
        return (self.max_residual <= self.tolerance and self.max_bound_violation <= self.tolerance
                and self.objective_gap <= self.tolerance)

    def as_dict(self) -> Dict[str, object]:
        return {
            'max_residual': self.max_residual,
            'max_bound_violation': self.max_bound_violation,
            'objective': self.objective,
            'reported_objective': self.reported_objective,
            'objective_gap': self.objective_gap,
            'violated_rows': dict(self.violated_rows),
            'worst_rows': [{'row': v.row, 'annotation': v.annotation, 'residual': v.residual}
                           for v in self.worst_rows],
            'passed': self.passed,
        }


def row_residuals(problem, x: np.ndarray) -> np.ndarray:
    """Per-row violation scaled by max(1, |rhs|); zero for satisfied rows"""
    activity = problem.A @ x
    rhs = problem.rhs
    senses = problem.senses
    gap = activity - rhs
    viol = np.where(senses == 'L', np.maximum(gap, 0.0),
                    np.where(senses == 'G', np.maximum(-gap, 0.0), np.abs(gap)))
    return viol / np.maximum(1.0, np.abs(rhs))


def verify_solution(problem, solution, tolerance: float = Config.VERIFY_TOL,
                    max_rows: int = Config.VERIFY_REPORTED_ROWS) -> VerificationReport:
    """
    Recompute row residuals, bound violations and the objective from x alone

    Args:
        problem: The PlanningProblem the solution claims to solve
        solution: Any Solution, including one imported from an external solver
        tolerance: Relative threshold for counting a row as violated
        max_rows: How many of the worst violated rows to name

    Returns:
        VerificationReport with violated rows counted per constraint family and
        the worst ones identified by their annotation
    """
    x = np.asarray(solution.primal, dtype=float)
    residuals = row_residuals(problem, x) if problem.n_rows else np.zeros(0)
    lb, ub = problem.lb, problem.ub
    bound_viol = np.maximum(np.maximum(lb - x, 0.0), np.maximum(x - ub, 0.0))
    bound_viol = np.where(np.isnan(bound_viol), 0.0, bound_viol)

    bad = np.flatnonzero(residuals > tolerance)
    violated: Dict[str, int] = {}
    for r in bad:
        family = problem.annotations[int(r)].family
        violated[family] = violated.get(family, 0) + 1
    # worst first, row number breaks ties
    order = bad[np.lexsort((bad, -residuals[bad]))][:max_rows]
    worst = [RowViolation(int(r), str(problem.annotations[int(r)]), problem.annotations[int(r)].family,
                          float(residuals[r])) for r in order]

    report = VerificationReport(
        max_residual=float(residuals.max(initial=0.0)),
        max_bound_violation=float(bound_viol.max(initial=0.0)),
        objective=problem.objective_value(x),
        reported_objective=float(solution.objective),
        violated_rows=violated,
        worst_rows=worst,
        tolerance=tolerance,
    )
    if report.passed:
        logger.info("Solution verified: max residual %.2e", report.max_residual)
    else:
        logger.warning("Solution check failed: residual %.2e, bound violation %.2e, worst rows %s",
                       report.max_residual, report.max_bound_violation,
                       ', '.join(v.annotation for v in worst[:5]))
    return report
