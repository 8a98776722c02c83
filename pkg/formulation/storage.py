"""
Stationary storage inventory dynamics and capacity limits.

Inventory is tracked at P + 1 points per week (start of each hour plus the
end of the week). With cyclic linkage the week ends where it started. With
chronological linkage a start-of-week state of charge is carried through the
reference year, each week adding the net change of its representative, and
per-week swing bounds keep every chronological hour inside the energy capacity.
"""
import logging

import numpy as np

from core.coefficients import storage_efficiency_per_side, storage_retention_per_hour
from formulation.base_builder import FamilyBuilder
from formulation.variables import VarKind

logger = logging.getLogger(__name__)


class StorageBuilder(FamilyBuilder):
    family = 'storage'

    def _build(self):
        linked = self.options.storage_linkage == 'linked_chronological'
        mapped = set(int(w) for w in self.timeline.assignment if w >= 0) if linked else set()
        for zone in self.spec.zones:
            for s in self.storages(zone):
                coords = (s.id, zone.id)
                power = self.index.scalar(VarKind.STORAGE_POWER, coords)
                energy = self.index.scalar(VarKind.STORAGE_ENERGY, coords)
                charge = self.index.block(VarKind.CHARGE, coords)
                discharge = self.index.block(VarKind.DISCHARGE, coords)
                inventory = self.index.block(VarKind.INVENTORY, coords)
                eta = storage_efficiency_per_side(s)
                keep = storage_retention_per_hour(s)
                existing_power = self.spec.existing_power(s.id, zone.id)
                existing_energy = self.spec.existing_energy(s.id, zone.id)

                for w in self.weeks():
                    inv = inventory[w]
                    self.problem.add_rows(
                        [(inv[1:], 1.0), (inv[:-1], -keep), (charge[w], -eta), (discharge[w], 1.0 / eta)],
                        'E', 0.0, 'storage_inventory', coords, week=w, n=self.P)
                    self.problem.add_rows([(charge[w], 1.0), (power, -1.0)], 'L', existing_power,
                                          'storage_charge_limit', coords, week=w, n=self.P)
                    self.problem.add_rows([(discharge[w], 1.0), (power, -1.0)], 'L', existing_power,
                                          'storage_discharge_limit', coords, week=w, n=self.P)
                    self.problem.add_rows([(inv, 1.0), (energy, -1.0)], 'L', existing_energy,
                                          'storage_energy_limit', coords, week=w, n=self.P + 1)
                    if not linked or w not in mapped:
                        self.problem.add_row([inv[0], inv[-1]], [1.0, -1.0], 'E', 0.0,
                                             'storage_cyclic', coords, week=w)

                if linked:
                    self._link_chronologically(coords, inventory, energy, existing_energy, keep)

    def _link_chronologically(self, coords, inventory: np.ndarray, energy: int, existing_energy: float,
                              keep: float):
        """
        Carry a start-of-period state of charge through the reference year

        Each period repeats the trajectory of its representative week on top of
        the carried level. Per representative week, SWING_UP and SWING_DOWN bound
        how far that trajectory rises above and falls below its starting level,
        so every chronological hour stays within [0, energy capacity].
        """
        assignment = self.timeline.assignment
        n_periods = len(assignment)
        decay = keep ** self.P
        hourly = keep ** np.arange(self.P + 1)
        soc = [self.index.scalar(VarKind.SOC_START, coords + (n,)) for n in range(n_periods)]

        for w in sorted({int(w) for w in assignment if w >= 0}):
            inv = inventory[w]
            up = self.index.scalar(VarKind.SWING_UP, coords + (w,))
            down = self.index.scalar(VarKind.SWING_DOWN, coords + (w,))
            # inv[h] - keep^h inv[0] is the change the week adds on top of a decayed start
            self.problem.add_rows([(up, 1.0), (inv[1:], -1.0), (inv[0], hourly[1:])], 'G', 0.0,
                                  'storage_swing_up', coords, week=w, n=self.P)
            self.problem.add_rows([(down, 1.0), (inv[1:], 1.0), (inv[0], -hourly[1:])], 'G', 0.0,
                                  'storage_swing_down', coords, week=w, n=self.P)

        for n in range(n_periods):
            w = int(assignment[n])
            nxt = soc[(n + 1) % n_periods]
            if w < 0:
                self.problem.add_row([nxt, soc[n]], [1.0, -decay], 'E', 0.0, 'storage_linkage', coords + (n,))
                continue
            self.problem.add_row([nxt, soc[n], inventory[w, -1], inventory[w, 0]],
                                 [1.0, -decay, -1.0, decay], 'E', 0.0, 'storage_linkage', coords + (n,))
            up = self.index.scalar(VarKind.SWING_UP, coords + (w,))
            down = self.index.scalar(VarKind.SWING_DOWN, coords + (w,))
            self.problem.add_row([soc[n], up, energy], [1.0, 1.0, -1.0], 'L', existing_energy,
                                 'soc_ceiling', coords + (n,))
            self.problem.add_row([soc[n], down], [decay, -1.0], 'G', 0.0, 'soc_floor', coords + (n,))


def add_storage_dynamics(problem, spec, timeline):
    StorageBuilder(problem, spec, timeline).build()
