"""
Capacity limits on dispatchable output and linearized unit commitment.

Commitment, startup and shutdown are continuous and measured in capacity
units (MW or tonne/h). Ramp limits follow the usual clustered-unit form:
a unit starting up may jump to max(min_stable, ramp), a unit shutting down
may drop from min_stable.
"""
import logging

import numpy as np

from core.config import Config
from formulation.base_builder import FamilyBuilder
from formulation.indexing import uc_applies
from formulation.variables import VarKind

logger = logging.getLogger(__name__)


def min_stable_fraction(tech) -> float:
    if tech.min_stable_fraction is not None:
        return tech.min_stable_fraction
    return Config.DEFAULT_MIN_STABLE_FRACTION


def ramp_fraction(tech) -> float:
    if tech.ramp_fraction_per_hour is not None:
        return tech.ramp_fraction_per_hour
    return Config.DEFAULT_RAMP_BY_TECH.get(tech.id, Config.DEFAULT_RAMP_FRACTION)


class CapacityLimitBuilder(FamilyBuilder):
    """Output bounded by installed capacity, or by availability for profile techs"""

    family = 'capacity'

    def _build(self):
        for zone in self.spec.zones:
            for tech, coords, output in self.gen_outputs(zone):
                if tech.is_vre or tech.energy_budget:
                    self._profile_limits(tech, coords, output)
                elif not uc_applies(tech, self.options):
                    cap = self.index.scalar(VarKind.GEN_CAPACITY, coords)
                    existing = self.spec.existing_power(tech.id, zone.id)
                    for w in self.weeks():
                        self.problem.add_rows([(output[w], 1.0), (cap, -1.0)], 'L', existing,
                                              'gen_capacity_limit', coords, week=w, n=self.P)

    def _profile_limits(self, tech, coords, output):
        cap = self.index.scalar(VarKind.VRE_BIN_CAPACITY, coords)
        existing = next(b.existing_capacity_mw for b in self.spec.vre_bins if b.key == coords)
        for w in self.weeks():
            cf = np.asarray(self.timeline.profile(coords, w), dtype=float)
            if tech.energy_budget:
                self.problem.add_rows([(output[w], 1.0), (cap, -1.0)], 'L', existing,
                                      'gen_capacity_limit', coords, week=w, n=self.P)
                self.problem.add_row(np.append(output[w], cap), np.append(np.ones(self.P), -cf.sum()),
                                     'L', existing * cf.sum(), 'energy_budget', coords, week=w)
            else:
                self.problem.add_rows([(output[w], 1.0), (cap, -cf)], 'L', existing * cf,
                                      'vre_availability', coords, week=w, n=self.P)


class UnitCommitmentBuilder(FamilyBuilder):
    family = 'unit_commitment'

    def _build(self):
        for zone in self.spec.zones:
            for tech, coords, output in self.gen_outputs(zone):
                if tech.is_vre or tech.energy_budget or not uc_applies(tech, self.options):
                    continue
                cap = self.index.scalar(VarKind.GEN_CAPACITY, coords)
                existing = self.spec.existing_power(tech.id, zone.id)
                commit = self.index.block(VarKind.COMMIT_LEVEL, coords)
                start = self.index.block(VarKind.STARTUP, coords)
                stop = self.index.block(VarKind.SHUTDOWN, coords)
                ms = min_stable_fraction(tech)
                r = ramp_fraction(tech)
                for w in self.weeks():
                    out, u, su, sd = output[w], commit[w], start[w], stop[w]
                    add = self.problem.add_rows
                    add([(u, 1.0), (cap, -1.0)], 'L', existing, 'commit_limit', coords, week=w, n=self.P)
                    add([(u, 1.0), (self.previous(u), -1.0), (su, -1.0), (sd, 1.0)], 'E', 0.0,
                        'commit_transition', coords, week=w, n=self.P)
                    add([(out, 1.0), (u, -1.0)], 'L', 0.0, 'max_committed_output', coords, week=w, n=self.P)
                    if ms > 0:
                        add([(u, ms), (out, -1.0)], 'L', 0.0, 'min_stable_output', coords, week=w, n=self.P)
                    if r < 1.0:
                        prev = self.previous(out)
                        jump = max(ms, r)
                        add([(out, 1.0), (prev, -1.0), (u, -r), (su, r - jump), (sd, ms)], 'L', 0.0,
                            'ramp_up', coords, week=w, n=self.P)
                        add([(prev, 1.0), (out, -1.0), (u, -r), (su, r + ms), (sd, -jump)], 'L', 0.0,
                            'ramp_down', coords, week=w, n=self.P)


def add_capacity_limits(problem, spec, timeline):
    CapacityLimitBuilder(problem, spec, timeline).build()


def add_unit_commitment(problem, spec, timeline):
    UnitCommitmentBuilder(problem, spec, timeline).build()
