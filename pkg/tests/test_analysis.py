import math
import os

import numpy as np
import pandas as pd
import pytest

from analysis.abatement import abatement_cost, resolve_utilization
from analysis.coupling import compare_reports, coupled_vs_decoupled
from analysis.grid import expand_axes, regime_frame, run_grid, write_grid_outputs
from analysis.metrics import unusable_report
from analysis.regime import FLEXIBLE_DEMAND, GENERATOR, INACTIVE, STORAGE, classify_ratio, classify_regime
from analysis.scenarios import ScenarioRunner, ScenarioSpec, apply_overrides
from conftest import CCGT, CCGT_CCS, SMR, SMR_CCS, delivery_spec, h2_switching_spec, regime_spec, single_week
from core.duckdb_manager import DuckDBManager
from core.exceptions import ConfigError, ParameterError
from core.models import Policy
from solver.simplex import SolverOptions


def _runner(spec, hours, **kwargs):
    return ScenarioRunner(spec, single_week(spec, hours), **kwargs)


# -- Abatement -------------------------------------------------------------

def test_abatement_cost_of_capture():
    spec = h2_switching_spec()
    policy = Policy(co2_price=0.0)
    assert abatement_cost(SMR, SMR_CCS, spec, policy, 0.9) == pytest.approx(50.2, abs=0.5)
    assert abatement_cost('smr', 'smr_ccs', spec, policy, 'levelized') == pytest.approx(50.2, abs=0.5)
    assert abatement_cost(CCGT, CCGT_CCS, spec, policy, 0.9) == pytest.approx(103.2, abs=1.0)


def test_abatement_cost_rises_at_low_utilization():
    spec = h2_switching_spec()
    policy = Policy(co2_price=0.0)
    observed = abatement_cost(CCGT, CCGT_CCS, spec, policy, 'ccgt_observed')
    assert observed > abatement_cost(CCGT, CCGT_CCS, spec, policy, 0.9)


def test_abatement_needs_matching_carriers():
    spec = h2_switching_spec()
    with pytest.raises(ParameterError):
        abatement_cost(CCGT, SMR_CCS, spec)
    assert abatement_cost(SMR, SMR, spec) is None
    with pytest.raises(ParameterError):
        resolve_utilization('sometimes')


# -- Scenario overrides ----------------------------------------------------

def test_scenario_key_and_slug():
    s = ScenarioSpec(co2_price=100)
    assert s.key == 'co2_price=100,pipeline_capex_multiplier=1,fcev_penetration_multiplier=1,coupling_enabled=true'
    assert '=' not in s.slug and ',' not in s.slug
    assert s.with_(co2_price=0).key.startswith('co2_price=0,')
    assert ScenarioSpec.from_mapping({'coupling_enabled': 'no'}).coupling_enabled is False


def test_unknown_scenario_field():
    with pytest.raises(ConfigError):
        ScenarioSpec.from_mapping({'carbon_tax': 5})


def test_overrides_leave_base_untouched():
    base = delivery_spec()
    s = ScenarioSpec(co2_price=50, pipeline_capex_multiplier=0.5, fcev_penetration_multiplier=2.0)
    spec = apply_overrides(base, s)
    assert spec.policy.co2_price == 50
    assert base.policy.co2_price == 0
    assert spec.pipeline_types[0].capex_per_mile_per_unit == pytest.approx(300_000)
    assert base.pipeline_types[0].capex_per_mile_per_unit == pytest.approx(600_000)
    assert np.all(spec.zones[1].demand_h2 == 2.0)
    assert np.all(base.zones[1].demand_h2 == 1.0)


def test_electrolyzer_capex_override():
    spec = apply_overrides(h2_switching_spec(), ScenarioSpec(electrolyzer_capex=200))
    assert spec.gen_tech('electrolyzer').capex_per_unit_power == 200
    assert spec.gen_tech('smr').capex_per_unit_power == 910


def test_negative_override_is_rejected():
    with pytest.raises(ParameterError):
        apply_overrides(h2_switching_spec(), ScenarioSpec(co2_price=-1))


# -- Single scenarios ------------------------------------------------------

@pytest.mark.parametrize('co2_price, winner', [(0, 'smr'), (100, 'smr_ccs'), (1000, 'electrolyzer')])
def test_carbon_price_switches_h2_technology(co2_price, winner):
    runner = _runner(h2_switching_spec(), 6)
    report = runner.run_scenario(ScenarioSpec(co2_price=co2_price))
    assert report.usable
    assert report.h2_supply_share[winner] == pytest.approx(1.0, abs=1e-6)
    assert report.total_cost == pytest.approx(report.objective, rel=1e-9)
    assert report.closure['h2_balance'] < 1e-6


def test_report_exchange_and_emissions():
    runner = _runner(h2_switching_spec(), 6)
    report = runner.run_scenario(ScenarioSpec(co2_price=1000))
    # 8760 t of H2 at 45.04 MWh/t
    assert report.p2h_mwh == pytest.approx(8760 * 45.04, rel=1e-3)
    assert report.pfh_mwh == 0.0
    assert report.emissions['h2'] == pytest.approx(0.0, abs=1e-6)
    assert report.levelized['lcoh'] > 0
    assert classify_regime(report) == FLEXIBLE_DEMAND


def test_unfinished_solve_is_unusable(tmp_path):
    spec = h2_switching_spec()
    runner = _runner(spec, 6, solver_options=SolverOptions(max_iters=1), artifact_dir=str(tmp_path))
    report = runner.run_scenario(ScenarioSpec())
    assert not report.usable
    assert report.status == 'iteration_limit'
    assert not os.path.exists(tmp_path / 'prices')


def test_runner_writes_artifacts(tmp_path):
    runner = _runner(h2_switching_spec(), 6, artifact_dir=str(tmp_path), export_mps=True)
    s = ScenarioSpec(co2_price=100)
    runner.run_scenario(s)
    assert (tmp_path / 'mps' / (s.slug + '.mps')).exists()
    prices = tmp_path / 'prices' / (s.slug + '.csv')
    assert prices.read_text().startswith('# schema_version: 1')


@pytest.mark.parametrize('multiplier, mode', [(0.5, 'pipeline'), (0.75, 'truck_gas')])
def test_pipeline_cost_decides_delivery_mode(multiplier, mode):
    runner = _runner(delivery_spec(), 24, solver_options=SolverOptions(backend='highs'))
    report = runner.run_scenario(ScenarioSpec(pipeline_capex_multiplier=multiplier))
    assert report.usable
    assert report.h2_transport[mode] == pytest.approx(8760.0, rel=1e-4)
    other = 'truck_gas' if mode == 'pipeline' else 'pipeline'
    assert report.h2_transport[other] == pytest.approx(0.0, abs=1e-3)
    assert report.nse['h2_tonne'] == pytest.approx(0.0, abs=1e-6)


def _pipeline_share(report):
    return report.h2_transport['pipeline'] / sum(report.h2_transport.values())


@pytest.mark.slow
def test_pipeline_sweep_turns_delivery_to_pipelines():
    runner = _runner(delivery_spec(), 24, solver_options=SolverOptions(backend='highs'))
    result = run_grid(runner, {'pipeline_capex_multiplier': [1.0, 0.75, 0.5, 0.25]})
    assert result.ok
    shares = {r.coordinates['pipeline_capex_multiplier']: _pipeline_share(r) for r in result.ordered_reports()}
    assert shares[1.0] < 0.5
    assert shares[0.5] > 0.5
    assert shares[0.25] > 0.5


@pytest.mark.slow
def test_reference_solver_picks_pipelines_when_cheap():
    runner = _runner(delivery_spec(), 24, solver_options=SolverOptions(backend='reference'))
    report = runner.run_scenario(ScenarioSpec(pipeline_capex_multiplier=0.5))
    assert report.usable
    assert _pipeline_share(report) > 0.5


# -- Coupling and regimes --------------------------------------------------

def test_coupling_saves_money_at_high_carbon_price():
    runner = _runner(h2_switching_spec(with_g2p=True), 6)
    comparison = coupled_vs_decoupled(runner, ScenarioSpec(co2_price=1000))
    assert comparison.usable
    assert comparison.cost_savings > 0
    assert comparison.cost_savings_pct == pytest.approx(100 * comparison.cost_savings / comparison.decoupled_cost)
    assert comparison.emission_reduction > 0
    assert comparison.emission_reference == pytest.approx(comparison.decoupled_emissions)


def test_coupling_rejects_decoupled_input():
    runner = _runner(h2_switching_spec(), 6)
    with pytest.raises(ParameterError):
        coupled_vs_decoupled(runner, ScenarioSpec(coupling_enabled=False))


def test_comparison_with_reference_emissions():
    runner = _runner(h2_switching_spec(), 6)
    coupled = runner.run_scenario(ScenarioSpec(co2_price=1000))
    decoupled = runner.run_scenario(ScenarioSpec(co2_price=1000, coupling_enabled=False))
    comparison = compare_reports(coupled, decoupled, reference_emissions=2.0 * decoupled.total_emissions)
    assert comparison.emission_reduction_pct == pytest.approx(
        100 * comparison.emission_reduction / (2.0 * decoupled.total_emissions))
    broken = compare_reports(coupled, unusable_report('x', 'infeasible', {}))
    assert not broken.usable


def test_zero_fcev_penetration_leaves_a_power_only_plan():
    runner = _runner(h2_switching_spec(), 6)
    report = runner.run_scenario(ScenarioSpec(co2_price=1000, fcev_penetration_multiplier=0.0))
    assert report.usable
    for tech in ('smr', 'smr_ccs', 'electrolyzer'):
        assert report.generation.get(tech, 0.0) == pytest.approx(0.0, abs=1e-6)
    assert report.p2h_mwh == pytest.approx(0.0, abs=1e-6)
    assert classify_regime(report) == INACTIVE


def test_coupling_saves_nothing_without_h2_demand():
    runner = _runner(h2_switching_spec(with_g2p=True), 6)
    comparison = coupled_vs_decoupled(runner, ScenarioSpec(co2_price=1000, fcev_penetration_multiplier=0.0))
    assert comparison.usable
    assert comparison.cost_savings == pytest.approx(0.0, abs=1e-6 * comparison.decoupled_cost)


def test_coupling_savings_grow_with_h2_demand():
    runner = _runner(h2_switching_spec(with_g2p=True), 6)
    base = coupled_vs_decoupled(runner, ScenarioSpec(co2_price=1000))
    doubled = coupled_vs_decoupled(runner, ScenarioSpec(co2_price=1000, fcev_penetration_multiplier=2.0))
    assert doubled.usable
    assert doubled.cost_savings >= base.cost_savings - 1e-6 * base.decoupled_cost


@pytest.mark.parametrize('p2h, pfh, regime', [
    (100.0, 0.0, FLEXIBLE_DEMAND),
    (100.0, 9.0, FLEXIBLE_DEMAND),
    (100.0, 10.0, STORAGE),
    (100.0, 50.0, STORAGE),
    (1.0, 11.0, GENERATOR),
    (0.0, 5.0, GENERATOR),
    (0.0, 0.0, INACTIVE),
    (1e-9, 1e-9, INACTIVE),
])
def test_regime_classification(p2h, pfh, regime):
    assert classify_ratio(p2h, pfh) == regime


def test_regime_factor_is_configurable():
    assert classify_regime((100.0, 20.0)) == STORAGE
    assert classify_regime((100.0, 20.0), factor=4) == FLEXIBLE_DEMAND


# -- Grids -----------------------------------------------------------------

def test_axes_expand_last_axis_fastest():
    scenarios = expand_axes({'co2_price': [0, 100], 'electrolyzer_capex': [200, 450]}, base={'g2p_capex': 600})
    assert [(s.co2_price, s.electrolyzer_capex) for s in scenarios] == [(0, 200), (0, 450), (100, 200), (100, 450)]
    assert all(s.g2p_capex == 600 for s in scenarios)
    assert len(expand_axes({'co2_price': [5, 5.0]})) == 1


def test_grid_runs_and_writes_outputs(tmp_path):
    runner = _runner(h2_switching_spec(), 6)
    axes = {'co2_price': [0, 1000], 'electrolyzer_capex': [200, 450]}
    result = run_grid(runner, axes, jobs=2, decoupled_comparison=True, reference={'co2_price': 0})
    assert result.ok
    assert [r.key for r in result.ordered_reports()] == [s.key for s in result.scenarios]
    assert set(result.comparisons) == {s.key for s in result.scenarios}
    clean = result.reports[result.scenarios[-1].key]
    assert clean.h2_supply_share['electrolyzer'] == pytest.approx(1.0, abs=1e-6)

    pivots = [{'metric': 'p2h_mwh', 'rows': 'co2_price', 'columns': 'electrolyzer_capex'}]
    paths = write_grid_outputs(result, str(tmp_path), pivots)
    for name in ('results', 'scenarios', 'headline', 'cost_breakdown', 'mix', 'regime_map', 'transport_by_mode',
                 'coupling', 'pivot_p2h_mwh'):
        assert os.path.exists(paths[name]), name
        assert open(paths[name]).readline() == '# schema_version: 1\n'
    assert len(os.listdir(paths['reports'])) == 4

    tidy = pd.read_csv(paths['results'], comment='#')
    assert list(tidy.columns) == ['scenario_key', 'metric', 'value']
    wide = pd.read_csv(paths['pivot_p2h_mwh'], comment='#')
    assert wide.shape == (2, 3)
    costs = pd.read_csv(paths['cost_breakdown'], comment='#')
    assert 'cost.total' in costs.columns
    assert len(costs) == 4
    regimes = pd.read_csv(paths['regime_map'], comment='#')
    assert set(regimes['regime']) <= {FLEXIBLE_DEMAND, INACTIVE}


@pytest.mark.slow
def test_regime_map_over_conversion_costs():
    runner = _runner(regime_spec(), 24, solver_options=SolverOptions(backend='highs'))
    axes = {'electrolyzer_capex': [200, 600, 1000], 'g2p_capex': [500, 900, 1200]}
    result = run_grid(runner, axes, base={'co2_price': 100})
    assert result.ok
    regimes = regime_frame(result).set_index(['electrolyzer_capex', 'g2p_capex'])['regime']
    # dear electrolysis with cheap G2P: the fuel cell burns SMR hydrogen
    assert regimes[(1000, 500)] in (STORAGE, GENERATOR)
    # cells next to that corner may go either way
    for (e, g), regime in regimes.items():
        if e == 200 or g == 1200:
            assert regime == FLEXIBLE_DEMAND, (e, g)


@pytest.mark.slow
def test_coupling_never_costs_more_than_separate_sectors():
    runner = _runner(regime_spec(), 24, solver_options=SolverOptions(backend='highs'))
    axes = {'co2_price': [0, 100, 1000], 'fcev_penetration_multiplier': [0.0, 1.0, 2.0]}
    result = run_grid(runner, axes, decoupled_comparison=True)
    assert result.ok
    assert len(result.comparisons) == 9
    for s in result.scenarios:
        comparison = result.comparisons[s.key]
        assert comparison.usable
        assert comparison.coupled_cost <= comparison.decoupled_cost * (1 + 1e-6), s.key
        if s.fcev_penetration_multiplier > 0 and s.co2_price >= 100:
            assert comparison.cost_savings > 0, s.key


def test_grid_records_failures_without_raising():
    runner = _runner(h2_switching_spec(), 6, solver_options=SolverOptions(max_iters=1))
    result = run_grid(runner, {'co2_price': [0, 100]})
    assert not result.ok
    assert set(result.failures) == {s.key for s in result.scenarios}
    assert all(math.isnan(r.objective) for r in result.ordered_reports())


def test_duckdb_lookups_and_pivots():
    tidy = pd.DataFrame({
        'scenario_key': ['a', 'a', 'b', 'b'],
        'metric': ['cost.total', 'p2h_mwh', 'cost.total', 'p2h_mwh'],
        'value': [10.0, 1.0, 20.0, 3.0],
    })
    scenarios = pd.DataFrame({'scenario_key': ['a', 'b'], 'co2_price': [0.0, 100.0], 'g2p_capex': [600.0, 600.0]})
    store = DuckDBManager()
    try:
        store.load_results(tidy, scenarios)
        assert store.metric_names('cost.') == ['cost.total']
        assert list(store.metrics_wide([]).columns) == ['scenario_key', 'co2_price', 'g2p_capex']
        wide = store.metrics_wide(['cost.total', 'p2h_mwh'])
        assert wide['cost.total'].tolist() == [10.0, 20.0]
        pivot = store.metric_pivot('p2h_mwh', 'co2_price', 'g2p_capex')
        assert pivot.loc[100.0, 600.0] == 3.0
        assert store.metric_pivot('missing', 'co2_price', 'g2p_capex').empty
    finally:
        store.close()
