"""
Coupled versus decoupled comparison of one scenario
"""
import logging
from dataclasses import asdict, dataclass
from typing import Dict, Optional

from analysis.metrics import ScenarioReport
from analysis.scenarios import ScenarioRunner, ScenarioSpec
from core.exceptions import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CouplingComparison:
    """
    Savings of allowing power/H2 conversion

    Cost savings are a share of the decoupled total system cost (both sectors).
    Emission reductions are a share of ``reference_emissions`` when a reference
    case was supplied, otherwise of the decoupled emissions.
    """
    key: str
    usable: bool
    coupled_cost: float
    decoupled_cost: float
    cost_savings: float
    cost_savings_pct: float
    coupled_emissions: float
    decoupled_emissions: float
    emission_reduction: float
    emission_reduction_pct: float
    emission_reference: float
    coupled_vre_mwh: float
    decoupled_vre_mwh: float
    vre_change_pct: float

    def as_dict(self) -> Dict[str, object]:
        return asdict(self)


def _pct(value: float, reference: float) -> float:
    return 100.0 * value / reference if reference else float('nan')


def compare_reports(coupled: ScenarioReport, decoupled: ScenarioReport,
                    reference_emissions: Optional[float] = None) -> CouplingComparison:
    usable = coupled.usable and decoupled.usable
    savings = decoupled.total_cost - coupled.total_cost
    reduction = decoupled.total_emissions - coupled.total_emissions
    reference = reference_emissions if reference_emissions is not None else decoupled.total_emissions
    return CouplingComparison(
        key=coupled.key,
        usable=usable,
        coupled_cost=coupled.total_cost,
        decoupled_cost=decoupled.total_cost,
        cost_savings=savings,
        cost_savings_pct=_pct(savings, decoupled.total_cost),
        coupled_emissions=coupled.total_emissions,
        decoupled_emissions=decoupled.total_emissions,
        emission_reduction=reduction,
        emission_reduction_pct=_pct(reduction, reference),
        emission_reference=reference,
        coupled_vre_mwh=coupled.vre_generation,
        decoupled_vre_mwh=decoupled.vre_generation,
        vre_change_pct=_pct(coupled.vre_generation - decoupled.vre_generation, decoupled.vre_generation),
    )


def coupled_vs_decoupled(runner: ScenarioRunner, s: ScenarioSpec,
                         reference_emissions: Optional[float] = None) -> CouplingComparison:
    """
    Solve ``s`` with and without conversion technologies on the same timeline

    Args:
        runner: Runner holding the base instance and timeline
        s: A coupled scenario
        reference_emissions: Emissions of the reference case used to normalize
            emission reductions

    Returns:
        CouplingComparison; savings are non-negative up to solver tolerance
    """
    if not s.coupling_enabled:
        raise ParameterError(f"scenario {s.key} is already decoupled")
    coupled = runner.run_scenario(s)
    decoupled = runner.run_scenario(s.with_(coupling_enabled=False))
    comparison = compare_reports(coupled, decoupled, reference_emissions)
    if comparison.usable and comparison.cost_savings < -1e-6 * max(1.0, abs(comparison.decoupled_cost)):
        logger.warning("%s: coupled plan costs more than the decoupled one (%.6g)", s.key, comparison.cost_savings)
    logger.info("%s: coupling saves %.4g $/yr (%.2f%%)", s.key, comparison.cost_savings, comparison.cost_savings_pct)
    return comparison
