"""
Cost of abating CO2 by switching from one technology to a cleaner one
"""
import logging
from typing import Optional, Union

from core.coefficients import emissions_per_output, levelized_cost
from core.config import Config
from core.exceptions import ParameterError
from core.models import GenTech, Policy, SystemSpec

logger = logging.getLogger(__name__)


def resolve_utilization(utilization: Union[str, float]) -> float:
    if isinstance(utilization, str):
        try:
            return Config.UTILIZATION_PRESETS[utilization]
        except KeyError:
            raise ParameterError(f"unknown utilization preset {utilization!r}; "
                                 f"choose from {sorted(Config.UTILIZATION_PRESETS)}")
    return float(utilization)


def abatement_cost(tech_a: Union[str, GenTech], tech_b: Union[str, GenTech], spec: SystemSpec,
                   policy: Optional[Policy] = None, utilization: Union[str, float] = 'levelized') -> Optional[float]:
    """
    $/tonne CO2 avoided by producing with ``tech_b`` instead of ``tech_a``

    Args:
        tech_a: Emitting technology, or its id in ``spec``
        tech_b: Cleaner technology producing the same carrier
        spec: Catalog the ids are looked up in
        policy: Prices to use; defaults to the spec's policy
        utilization: Capacity factor, or a preset name from Config.UTILIZATION_PRESETS

    Returns:
        The abatement cost, or None when both emit the same per unit output
    """
    a = spec.gen_tech(tech_a) if isinstance(tech_a, str) else tech_a
    b = spec.gen_tech(tech_b) if isinstance(tech_b, str) else tech_b
    if a.sector is not b.sector:
        raise ParameterError(f"{a.id} and {b.id} do not produce the same carrier")
    policy = policy or spec.policy
    u = resolve_utilization(utilization)
    avoided = emissions_per_output(a) - emissions_per_output(b)
    if avoided == 0:
        logger.info("Abatement cost of %s -> %s is undefined: equal emission intensities", a.id, b.id)
        return None
    return (levelized_cost(b, policy, u) - levelized_cost(a, policy, u)) / avoided
