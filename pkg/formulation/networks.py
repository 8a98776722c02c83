"""
Power line and H2 pipeline capacity limits and linepack
"""
import logging

from core.models import PipelineType
from formulation.base_builder import FamilyBuilder
from formulation.variables import VarKind

logger = logging.getLogger(__name__)


class NetworkBuilder(FamilyBuilder):
    family = 'networks'

    def _build(self):
        self._lines()
        for pipe in self.spec.pipeline_types:
            self._pipelines(pipe)

    def _lines(self):
        for (a, b), flow in self.index.items(VarKind.LINE_FLOW):
            added = self.index.scalar(VarKind.LINE_CAPACITY_ADD, (min(a, b), max(a, b)))
            if added is None:
                continue  # fixed lines are bounded on the flow columns
            existing = self.spec.route(a, b).existing_power_capacity_mw
            for w in self.weeks():
                self.problem.add_rows([(flow[w], 1.0), (added, -1.0)], 'L', existing,
                                      'line_limit', (a, b), week=w, n=self.P)

    def _pipelines(self, pipe: PipelineType):
        cap = pipe.flow_capacity_tonne_per_hour_per_unit
        for (pipe_id, i, j), units in self.index.items(VarKind.PIPELINE_UNITS):
            if pipe_id != pipe.id:
                continue
            fwd = self.index.block(VarKind.PIPELINE_FLOW, (pipe.id, i, j))
            back = self.index.block(VarKind.PIPELINE_FLOW, (pipe.id, j, i))
            pack = self.index.block(VarKind.LINEPACK, (pipe.id, i, j))
            for w in self.weeks():
                self.problem.add_rows([(fwd[w], 1.0), (back[w], 1.0), (units, -cap)], 'L', 0.0,
                                      'pipeline_limit', (pipe.id, i, j), week=w, n=self.P)
                if pack is None:
                    continue
                d_fwd = self.index.block(VarKind.PIPELINE_DELIVERY, (pipe.id, i, j))[w]
                d_back = self.index.block(VarKind.PIPELINE_DELIVERY, (pipe.id, j, i))[w]
                self.problem.add_rows([(d_fwd, 1.0), (d_back, 1.0), (units, -cap)], 'L', 0.0,
                                      'pipeline_delivery_limit', (pipe.id, i, j), week=w, n=self.P)
                # Linepack: hydrogen injected but not yet delivered
                self.problem.add_rows([(pack[w], 1.0), (self.previous(pack[w]), -1.0),
                                       (fwd[w], -1.0), (back[w], -1.0), (d_fwd, 1.0), (d_back, 1.0)],
                                      'E', 0.0, 'linepack_balance', (pipe.id, i, j), week=w, n=self.P)
                self.problem.add_rows([(pack[w], 1.0), (units, -pipe.linepack_fraction * cap)], 'L', 0.0,
                                      'linepack_limit', (pipe.id, i, j), week=w, n=self.P)


def add_network_investment_and_flows(problem, spec, timeline):
    NetworkBuilder(problem, spec, timeline).build()
