"""
Base class shared by the constraint-family builders
"""
import logging
from typing import Iterator, List, Tuple

import numpy as np

from core.models import GenTech, StorageTech, SystemSpec, Zone
from core.timeslices import ReducedTimeline
from formulation.problem import PlanningProblem
from formulation.variables import VarKind

logger = logging.getLogger(__name__)


class FamilyBuilder:
    """Adds one constraint family to a PlanningProblem"""

    family = ''

    def __init__(self, problem: PlanningProblem, spec: SystemSpec, timeline: ReducedTimeline):
        """
        Args:
            problem: Problem whose variables are already indexed
            spec: Planning instance
            timeline: Representative weeks
        """
        self.problem = problem
        self.index = problem.index
        self.options = problem.options
        self.spec = spec
        self.timeline = timeline
        self.P = timeline.period_hours
        self.W = timeline.n_weeks

    def build(self):
        rows_before = self.problem.n_rows
        self._build()
        logger.debug("%s: added %d rows", self.family or type(self).__name__, self.problem.n_rows - rows_before)

    def _build(self):
        raise NotImplementedError

    # -- Shared helpers ----------------------------------------------------

    @property
    def h2_active(self) -> bool:
        return bool(self.problem.meta.get('h2_active'))

    def weeks(self) -> range:
        return range(self.W)

    def weight(self, week: int) -> float:
        return float(self.timeline.weights[week])

    def previous(self, block_row: np.ndarray, lag: int = 1) -> np.ndarray:
        """Hourly columns shifted by ``lag`` hours with within-week wraparound"""
        return np.roll(block_row, lag)

    def gen_outputs(self, zone: Zone) -> Iterator[Tuple[GenTech, Tuple, np.ndarray]]:
        """(tech, coords, output block) for every output column set in a zone"""
        for coords, cols in self.index.items(VarKind.GEN_OUTPUT):
            if coords[1] != zone.id:
                continue
            yield self.spec.gen_tech(coords[0]), coords, cols

    def storages(self, zone: Zone) -> List[StorageTech]:
        return [s for s in self.spec.storage_techs
                if self.index.has(VarKind.CHARGE, (s.id, zone.id))]
