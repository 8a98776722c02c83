"""
Base analyzer with shared access to a solved planning problem
"""
from typing import Dict, Iterator, Tuple

import numpy as np

from core.models import SystemSpec
from core.timeslices import ReducedTimeline
from formulation.problem import PlanningProblem
from formulation.variables import Coords, VarKind
from solver.solution import Solution


class BaseAnalyzer:
    """Reads primal values out of a Solution by variable kind"""

    def __init__(self, spec: SystemSpec, timeline: ReducedTimeline, problem: PlanningProblem, solution: Solution):
        """
        Initialize analyzer with a solved problem

        Args:
            spec: The instance the problem was built from
            timeline: Representative weeks used in the build
            problem: Assembled problem
            solution: Solution of ``problem``
        """
        self.spec = spec
        self.timeline = timeline
        self.problem = problem
        self.solution = solution
        self.index = problem.index
        self.x = np.asarray(solution.primal, dtype=float)
        self.weights = np.asarray(timeline.weights, dtype=float)

    def _scalar(self, kind: VarKind, coords: Coords) -> float:
        col = self.index.scalar(kind, coords)
        return 0.0 if col is None else float(self.x[col])

    def _annual(self, block: np.ndarray) -> float:
        """Weighted annual total of a (weeks, hours) column block"""
        values = self.x[block]
        return float(self.weights @ values.sum(axis=1))

    def _annual_items(self, kind: VarKind) -> Iterator[Tuple[Coords, float]]:
        for coords, cols in self.index.items(kind):
            yield coords, self._annual(cols)

    def _annual_demand(self, series: Dict[int, np.ndarray]) -> float:
        return float(sum(self.weights @ arr.sum(axis=1) for arr in series.values()))

    def annual_power_demand(self) -> float:
        return self._annual_demand(self.timeline.demand_power)

    def annual_h2_demand(self) -> float:
        return self._annual_demand(self.timeline.demand_h2)

    @staticmethod
    def _ratio(numerator: float, denominator: float) -> float:
        return numerator / denominator if denominator else float('nan')
