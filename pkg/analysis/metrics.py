"""
Headline metrics of one solved scenario
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from analysis.base_analyzer import BaseAnalyzer
from core.coefficients import electricity_input_for_h2, emissions_per_output
from core.config import Config
from core.models import Carrier, Sector
from formulation.objective import sector_of
from formulation.variables import VarKind
from solver.verify import row_residuals

logger = logging.getLogger(__name__)


@dataclass
class ScenarioReport:
    """Everything reported for one scenario; flat dicts so it serializes as-is"""
    key: str
    status: str
    usable: bool
    objective: float = float('nan')
    coordinates: Dict[str, object] = field(default_factory=dict)
    capacity: Dict[str, float] = field(default_factory=dict)
    storage_capacity: Dict[str, float] = field(default_factory=dict)
    storage_by_carrier: Dict[str, float] = field(default_factory=dict)
    generation: Dict[str, float] = field(default_factory=dict)
    capacity_factor: Dict[str, float] = field(default_factory=dict)
    emissions: Dict[str, float] = field(default_factory=dict)
    cost: Dict[str, float] = field(default_factory=dict)
    p2h_mwh: float = 0.0
    pfh_mwh: float = 0.0
    exchange_share: float = 0.0
    vre_curtailment: float = 0.0
    nse: Dict[str, float] = field(default_factory=dict)
    h2_transport: Dict[str, float] = field(default_factory=dict)
    levelized: Dict[str, float] = field(default_factory=dict)
    prices: Dict[str, Dict[str, float]] = field(default_factory=dict)
    closure: Dict[str, float] = field(default_factory=dict)
    h2_supply_share: Dict[str, float] = field(default_factory=dict)
    solve_stats: Dict[str, object] = field(default_factory=dict)
    message: str = ''

    @property
    def total_cost(self) -> float:
        return self.cost.get('total', self.objective)

    @property
    def total_emissions(self) -> float:
        return self.emissions.get('total', 0.0)

    @property
    def vre_generation(self) -> float:
        return self.generation_by_group().get('vre', 0.0)

    def generation_by_group(self) -> Dict[str, float]:
        groups = self.solve_stats.get('tech_groups', {})
        out: Dict[str, float] = {}
        for tech_id, value in self.generation.items():
            group = groups.get(tech_id, 'other')
            out[group] = out.get(group, 0.0) + value
        return out

    def as_dict(self) -> Dict[str, object]:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def tidy_rows(self) -> List[Tuple[str, str, float]]:
        """(scenario_key, metric, value) rows, metric names dot-separated"""
        rows = [(self.key, 'usable', float(self.usable)), (self.key, 'objective', self.objective)]
        for section in ('capacity', 'storage_capacity', 'storage_by_carrier', 'generation', 'capacity_factor',
                        'emissions', 'cost', 'nse', 'h2_transport', 'levelized', 'closure', 'h2_supply_share'):
            for name, value in sorted(getattr(self, section).items()):
                rows.append((self.key, f'{section}.{name}', float(value)))
        for name in ('p2h_mwh', 'pfh_mwh', 'exchange_share', 'vre_curtailment'):
            rows.append((self.key, name, float(getattr(self, name))))
        for carrier, stats in sorted(self.prices.items()):
            for name, value in sorted(stats.items()):
                rows.append((self.key, f'price.{carrier}.{name}', float(value)))
        return rows


def unusable_report(key: str, status: str, coordinates: Dict[str, object], message: str = '') -> ScenarioReport:
    return ScenarioReport(key=key, status=status, usable=False, coordinates=dict(coordinates), message=message)


def tech_group(tech) -> str:
    if tech.is_vre:
        return 'vre'
    if tech.is_g2p:
        return 'g2p'
    if tech.is_electrolyzer:
        return 'electrolyzer'
    if tech.sector is Sector.HYDROGEN:
        return 'h2_' + ('ccs' if tech.capture_rate > 0 else 'fossil')
    if tech.energy_budget:
        return 'hydro'
    if tech.burns_gas:
        return 'gas_ccs' if tech.capture_rate > 0 else 'gas'
    return tech.id


class ScenarioMetrics(BaseAnalyzer):
    """Computes a ScenarioReport from an optimal solution"""

    def report(self, key: str, coordinates: Dict[str, object]) -> ScenarioReport:
        capacity = self._capacities()
        generation = self._generation()
        report = ScenarioReport(
            key=key,
            status=self.solution.status,
            usable=True,
            objective=self.solution.objective,
            coordinates=dict(coordinates),
            capacity=capacity,
            generation=generation,
            capacity_factor={t: self._ratio(generation.get(t, 0.0), cap * Config.HOURS_PER_YEAR)
                             for t, cap in capacity.items() if cap > 0},
            emissions=self._emissions(),
            cost=self._costs(),
            nse=self._nse(),
            h2_transport=self._h2_transport(),
            prices=self._prices(),
            closure=self._closure(),
            # wall time goes to the run_info sidecar so reports stay reproducible
            solve_stats={**{k: v for k, v in self.solution.summary().items() if k != 'wall_time_s'},
                         'tech_groups': {t.id: tech_group(t) for t in self.spec.gen_techs}},
        )
        report.storage_capacity, report.storage_by_carrier = self._storage()
        report.p2h_mwh, report.pfh_mwh = self._exchange()
        demand = self.annual_power_demand()
        report.exchange_share = self._ratio(report.p2h_mwh + report.pfh_mwh, demand) if demand else 0.0
        report.vre_curtailment = self._curtailment()
        report.levelized = {
            'lcoe': self._ratio(report.cost.get('power.total', 0.0), demand),
            'lcoh': self._ratio(report.cost.get('h2.total', 0.0), self.annual_h2_demand()),
        }
        report.h2_supply_share = self._h2_supply_share(generation)
        residual = max(report.closure.values(), default=0.0)
        if residual > Config.VERIFY_TOL:
            logger.warning("%s: balance residual %.2e exceeds tolerance", key, residual)
        return report

    # -- Sections ---------------------------------------------------------

    def _capacities(self) -> Dict[str, float]:
        out: Dict[str, float] = {}
        for (tech_id, zone_id), col in self.index.items(VarKind.GEN_CAPACITY):
            out[tech_id] = out.get(tech_id, 0.0) + float(self.x[col]) + self.spec.existing_power(tech_id, zone_id)
        for key, col in self.index.items(VarKind.VRE_BIN_CAPACITY):
            b = next(b for b in self.spec.vre_bins if b.key == key)
            out[key[0]] = out.get(key[0], 0.0) + float(self.x[col]) + b.existing_capacity_mw
        return out

    def _generation(self) -> Dict[str, float]:
        out: Dict[str, float] = {}
        for coords, value in self._annual_items(VarKind.GEN_OUTPUT):
            out[coords[0]] = out.get(coords[0], 0.0) + value
        return out

    def _emissions(self) -> Dict[str, float]:
        out = {'power': 0.0, 'h2': 0.0}
        for coords, value in self._annual_items(VarKind.GEN_OUTPUT):
            tech = self.spec.gen_tech(coords[0])
            out[sector_of(tech)] += value * emissions_per_output(tech)
        out['total'] = out['power'] + out['h2']
        return out

    def _costs(self) -> Dict[str, float]:
        out = self.problem.cost_breakdown(self.x)
        for sector in ('power', 'h2'):
            out[f'{sector}.total'] = sum(v for k, v in out.items() if k.startswith(sector + '.'))
        out['total'] = out['power.total'] + out['h2.total']
        return out

    def _storage(self) -> Tuple[Dict[str, float], Dict[str, float]]:
        per_tech: Dict[str, float] = {}
        per_carrier: Dict[str, float] = {c.value: 0.0 for c in Carrier}
        for (storage_id, zone_id), col in self.index.items(VarKind.STORAGE_ENERGY):
            storage = next(s for s in self.spec.storage_techs if s.id == storage_id)
            energy = float(self.x[col]) + self.spec.existing_energy(storage_id, zone_id)
            per_tech[storage_id] = per_tech.get(storage_id, 0.0) + energy
            per_carrier[storage.carrier.value] += energy
        return per_tech, per_carrier

    def _exchange(self) -> Tuple[float, float]:
        """Electricity into electrolysis and out of G2P, MWh/yr"""
        p2h = pfh = 0.0
        for coords, value in self._annual_items(VarKind.GEN_OUTPUT):
            tech = self.spec.gen_tech(coords[0])
            if tech.is_electrolyzer:
                p2h += electricity_input_for_h2(tech, value)
            elif tech.is_g2p:
                pfh += value
        return p2h, pfh

    def _curtailment(self) -> float:
        available = used = 0.0
        for key, col in self.index.items(VarKind.VRE_BIN_CAPACITY):
            tech = self.spec.gen_tech(key[0])
            if not tech.is_vre:
                continue
            b = next(b for b in self.spec.vre_bins if b.key == key)
            cap = float(self.x[col]) + b.existing_capacity_mw
            cf = np.asarray(self.timeline.profiles[key], dtype=float)
            available += cap * float(self.weights @ cf.sum(axis=1))
            used += self._annual(self.index.block(VarKind.GEN_OUTPUT, key))
        return self._ratio(max(available - used, 0.0), available) if available > 0 else 0.0

    def _nse(self) -> Dict[str, float]:
        power = sum(v for _, v in self._annual_items(VarKind.NSE_POWER))
        h2 = sum(v for _, v in self._annual_items(VarKind.NSE_H2))
        return {'power_mwh': power, 'h2_tonne': h2}

    def _h2_transport(self) -> Dict[str, float]:
        out = {'truck_gas': 0.0, 'truck_liquid': 0.0, 'pipeline': 0.0}
        for truck in self.spec.truck_types:
            mode = 'truck_liquid' if truck.carrier is Carrier.HYDROGEN_LIQUID else 'truck_gas'
            for (truck_id, _), cols in self.index.items(VarKind.TRUCK_UNLOAD):
                if truck_id == truck.id:
                    out[mode] += truck.payload_tonne * self._annual(cols)
        for _, cols in self.index.items(VarKind.PIPELINE_FLOW):
            out['pipeline'] += self._annual(cols)
        return out

    def _prices(self) -> Dict[str, Dict[str, float]]:
        out: Dict[str, Dict[str, float]] = {}
        for family, carrier in (('power_balance', 'power'), ('h2_balance', 'h2')):
            prices = self.solution.prices(self.problem, family)
            if not prices:
                continue
            by_zone: Dict[int, List[float]] = {}
            for row, value in prices.items():
                by_zone.setdefault(self.problem.annotations[row].coords[0], []).append(value)
            stats = {}
            for zone_id, values in sorted(by_zone.items()):
                stats[f'zone{zone_id}.mean'] = float(np.mean(values))
                stats[f'zone{zone_id}.max'] = float(np.max(values))
            out[carrier] = stats
        return out

    def _closure(self) -> Dict[str, float]:
        """Largest relative residual of each balance family"""
        residuals = row_residuals(self.problem, self.x) if self.problem.n_rows else np.zeros(0)
        out = {}
        for family in ('power_balance', 'h2_balance'):
            rows = self.problem.rows_of(family)
            out[family] = float(residuals[rows].max(initial=0.0)) if rows.size else 0.0
        return out

    def _h2_supply_share(self, generation: Dict[str, float]) -> Dict[str, float]:
        h2 = {t.id: generation.get(t.id, 0.0) for t in self.spec.gen_techs if t.sector is Sector.HYDROGEN}
        total = sum(h2.values())
        return {t: (v / total if total > 0 else 0.0) for t, v in h2.items()}


def price_series_frame(problem, solution) -> pd.DataFrame:
    """Hourly balance prices ($/MWh, $/tonne) per zone and representative week"""
    rows = []
    for family, carrier in (('power_balance', 'power'), ('h2_balance', 'h2')):
        for row, price in solution.prices(problem, family).items():
            a = problem.annotations[row]
            rows.append((carrier, a.coords[0], a.week, a.hour, price))
    return pd.DataFrame(rows, columns=['carrier', 'zone_id', 'week', 'hour', 'price'])
