"""
Role of power-H2 conversion in a plan, from the ratio of P2H to PfH
"""
from typing import Union

from analysis.metrics import ScenarioReport
from core.config import Config

FLEXIBLE_DEMAND = 'flexible_demand'
STORAGE = 'storage'
GENERATOR = 'generator'
INACTIVE = 'inactive'


def classify_ratio(p2h: float, pfh: float, factor: float = Config.REGIME_FACTOR,
                   zero: float = Config.ZERO_EXCHANGE_MWH) -> str:
    """
    Args:
        p2h: Electricity into electrolysis, MWh/yr
        pfh: Electricity out of G2P, MWh/yr
        factor: Ratio that counts as an order of magnitude
        zero: Exchanges at or below this are treated as none

    Returns:
        One of flexible_demand, storage, generator, inactive
    """
    p2h = p2h if p2h > zero else 0.0
    pfh = pfh if pfh > zero else 0.0
    if p2h == 0 and pfh == 0:
        return INACTIVE
    if pfh == 0:
        return FLEXIBLE_DEMAND
    ratio = p2h / pfh
    if ratio > factor:
        return FLEXIBLE_DEMAND
    if ratio < 1.0 / factor:
        return GENERATOR
    return STORAGE


def classify_regime(report: Union[ScenarioReport, tuple], factor: float = Config.REGIME_FACTOR) -> str:
    """Classify a report, or a (p2h, pfh) pair"""
    if isinstance(report, ScenarioReport):
        return classify_ratio(report.p2h_mwh, report.pfh_mwh, factor)
    p2h, pfh = report
    return classify_ratio(p2h, pfh, factor)
