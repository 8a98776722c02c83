import json
import os
import textwrap

import pytest

import app
from conftest import DATA_DIR
from core.timeslices import read_timeline_bundle

TOY_CATALOG = os.path.join(DATA_DIR, 'toy', 'catalog.yaml')

TINY_CATALOG = """
name: tiny
series:
  demand_power: demand.csv
zones:
  - id: 1
gen_techs:
  - id: ccgt
    sector: power
    capex_per_unit_power: 817
    fom_per_year: 11
    vom: 3
    heat_rate: 6
    fuel: natural_gas
    lifetime_years: 30
"""


def _run_file(tmp_path, catalog=TOY_CATALOG, axes='co2_price: [0, 1000]', extra=''):
    text = textwrap.dedent(f"""
        catalog: {catalog}
        output_dir: {tmp_path / 'out'}
        timeline:
          k_total: 4
          period_hours: 24
          seed: 7
        solver:
          backend: highs
        scenarios:
          axes:
            {axes}
        {extra}
    """).lstrip('\n')
    path = tmp_path / 'run.yaml'
    path.write_text(text)
    return str(path)


def _tiny_catalog(tmp_path, values):
    lines = ['zone_id,hour,value'] + [f'1,{h},{v}' for h, v in enumerate(values)]
    (tmp_path / 'demand.csv').write_text('\n'.join(lines) + '\n')
    path = tmp_path / 'catalog.yaml'
    path.write_text(TINY_CATALOG.lstrip('\n'))
    return str(path)


def test_validate_toy_dataset(tmp_path, capsys):
    assert app.main(['validate', '--config', _run_file(tmp_path)]) == app.EXIT_OK
    assert 'toy: OK' in capsys.readouterr().out


def test_missing_config_is_a_usage_error(tmp_path, capsys):
    assert app.main(['validate', '--config', str(tmp_path / 'nope.yaml')]) == app.EXIT_USAGE
    assert 'configuration error' in capsys.readouterr().err


def test_unknown_backend_in_run_file(tmp_path):
    path = _run_file(tmp_path)
    with open(path) as fh:
        text = fh.read().replace('backend: highs', 'backend: cplex')
    with open(path, 'w') as fh:
        fh.write(text)
    assert app.main(['validate', '--config', path]) == app.EXIT_USAGE


def test_corrupt_series_is_an_input_error(tmp_path, capsys):
    catalog = _tiny_catalog(tmp_path, [100, 100, 'oops'])
    assert app.main(['validate', '--config', _run_file(tmp_path, catalog=catalog)]) == app.EXIT_INPUT
    assert 'line 4' in capsys.readouterr().err


def test_short_dataset_reports_violations(tmp_path, capsys):
    catalog = _tiny_catalog(tmp_path, [100] * 48)
    assert app.main(['validate', '--config', _run_file(tmp_path, catalog=catalog)]) == app.EXIT_FAILED
    out = capsys.readouterr().out
    assert 'timeline.short_series' in out
    assert 'violation(s)' in out
    assert not os.path.exists(tmp_path / 'out')


def test_reduce_writes_a_reusable_bundle(tmp_path):
    path = _run_file(tmp_path)
    assert app.main(['reduce', '--config', path, '--seed', '3']) == app.EXIT_OK
    bundle = tmp_path / 'out' / 'timeline'
    timeline = read_timeline_bundle(str(bundle))
    assert timeline.n_weeks == 4
    assert timeline.hours_represented() == pytest.approx(8760.0)
    assert (bundle / 'diagnostics.csv').exists()


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as info:
        app.main(['--version'])
    assert info.value.code == 0
    assert 'eh2plan' in capsys.readouterr().out


def test_unknown_command():
    with pytest.raises(SystemExit) as info:
        app.main(['plot', '--config', 'x.yaml'])
    assert info.value.code == 2


@pytest.mark.slow
def test_solve_toy_grid(tmp_path, capsys):
    path = _run_file(tmp_path, extra='jobs: 2')
    code = app.main(['solve', '--config', path, '--decoupled-comparison', '--export-mps'])
    assert code == app.EXIT_OK
    out = tmp_path / 'out'
    for name in ('results.csv', 'scenarios.csv', 'run_info.json', 'panels/coupling.csv', 'panels/regime_map.csv'):
        assert (out / name).exists(), name
    assert len(list((out / 'reports').iterdir())) == 2
    assert len(list((out / 'mps').glob('*.mps'))) == 4
    info = json.loads((out / 'run_info.json').read_text())
    assert info['scenarios'] == 2
    assert info['failures'] == {}
    assert capsys.readouterr().out.count(': ok,') == 2


def test_empty_config_is_a_usage_error(tmp_path, capsys):
    path = tmp_path / 'run.yaml'
    path.write_text('')
    assert app.main(['validate', '--config', str(path)]) == app.EXIT_USAGE
    assert 'empty' in capsys.readouterr().err
