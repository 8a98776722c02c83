"""
Solver result container
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from formulation.problem import PlanningProblem
from formulation.variables import Coords, VarKind

STATUSES = ('optimal', 'infeasible', 'unbounded', 'iteration_limit')


@dataclass
class Solution:
    status: str
    objective: float = float('nan')
    primal: np.ndarray = field(default_factory=lambda: np.zeros(0))
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations: int = 0
    wall_time: float = 0.0
    backend: str = 'reference'
    trace: List[Dict[str, float]] = field(default_factory=list)
    message: str = ''

    @property
    def is_optimal(self) -> bool:
        return self.status == 'optimal'

    def value(self, problem: PlanningProblem, kind: VarKind, coords: Coords,
              week: Optional[int] = None, hour: Optional[int] = None) -> float:
        col = problem.index.get(kind, coords, week, hour)
        if col is None:
            raise KeyError(f"{kind.value}{tuple(coords)} is not present in this problem")
        return float(self.primal[col])

    def block(self, problem: PlanningProblem, kind: VarKind, coords: Coords) -> Optional[np.ndarray]:
        """Values of an hourly block as a (weeks, hours) array"""
        cols = problem.index.block(kind, coords)
        return None if cols is None else self.primal[cols]

    def prices(self, problem: PlanningProblem, family: str) -> Dict[int, float]:
        """Balance-row duals divided by week weight: $/MWh or $/tonne per row"""
        out = {}
        if self.duals.size == 0:
            return out
        for row in problem.rows_of(family):
            weight = problem.row_weights.get(int(row), 1.0)
            out[int(row)] = float(self.duals[row]) / weight if weight else float('nan')
        return out

    def summary(self) -> Dict[str, object]:
        return {
            'status': self.status,
            'objective': self.objective,
            'iterations': self.iterations,
            'wall_time_s': round(self.wall_time, 3),
            'backend': self.backend,
        }
