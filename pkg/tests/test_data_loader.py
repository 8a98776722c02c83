import os
import textwrap
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from conftest import DATA_DIR, delivery_spec, h2_switching_spec, make_zone
from core.data_loader import SpecLoader, load_spec
from core.exceptions import DataError
from core.exporters import read_csv, read_series_csv, write_csv, write_json
from core.models import Sector, SystemSpec
from core.validation import validate_spec, validate_timeline_settings

CATALOG = """
name: tiny
series:
  demand_power: demand.csv
zones:
  - id: 1
policy:
  co2_price: 10
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


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text).lstrip('\n'))
    return str(path)


def _series(tmp_path, values, name='demand.csv'):
    lines = ['zone_id,hour,value'] + [f'1,{h},{v}' for h, v in enumerate(values)]
    return _write(tmp_path, name, '\n'.join(lines) + '\n')


def test_loads_catalog_with_csv_series(tmp_path):
    _series(tmp_path, [100, 110, 120, 130])
    spec = load_spec(_write(tmp_path, 'catalog.yaml', CATALOG))
    assert spec.name == 'tiny'
    assert spec.n_hours == 4
    assert spec.zones[0].demand_power.tolist() == [100, 110, 120, 130]
    assert spec.zones[0].demand_h2.tolist() == [0, 0, 0, 0]
    assert spec.gen_techs[0].sector is Sector.POWER
    assert spec.policy.co2_price == 10
    assert spec.policy.gas_price == 5.4


def test_corrupt_series_row_reports_its_line(tmp_path):
    path = _write(tmp_path, 'demand.csv', """
        zone_id,hour,value
        1,0,100
        1,1,100
        1,2,abc
        1,3,100
    """)
    with pytest.raises(DataError) as info:
        read_series_csv(path)
    assert info.value.row == 4
    assert info.value.path == path
    assert 'line 4' in str(info.value)


def test_loader_returns_failure_instead_of_raising(tmp_path):
    _series(tmp_path, [100, 'nan', 100])
    loader = SpecLoader()
    ok, message = loader.load(_write(tmp_path, 'catalog.yaml', CATALOG))
    assert not ok
    assert loader.spec is None
    assert loader.error.row == 3
    assert loader.errors == [message]


def test_unknown_catalog_key_is_rejected(tmp_path):
    _series(tmp_path, [1, 2])
    bad = CATALOG.replace('    lifetime_years: 30', '    lifetime_years: 30\n    colour: blue')
    with pytest.raises(DataError, match='unknown keys'):
        load_spec(_write(tmp_path, 'catalog.yaml', bad))


def test_bad_enum_value_lists_choices(tmp_path):
    _series(tmp_path, [1, 2])
    bad = CATALOG.replace('sector: power', 'sector: steam')
    with pytest.raises(DataError, match='sector must be one of'):
        load_spec(_write(tmp_path, 'catalog.yaml', bad))


def test_missing_catalog(tmp_path):
    with pytest.raises(DataError, match='not found'):
        load_spec(str(tmp_path / 'nope.yaml'))


def test_synthetic_toy_catalog_is_valid(toy_catalog_path):
    spec = load_spec(toy_catalog_path)
    assert spec.n_hours == 8760
    assert [z.id for z in spec.zones] == [1, 2]
    assert not spec.zones[1].allows_central_h2_production
    assert validate_spec(spec) == []
    assert validate_timeline_settings(spec, k_total=4, period_hours=24) == []


def test_synthetic_profiles_are_deterministic(toy_catalog_path):
    a, b = load_spec(toy_catalog_path), load_spec(toy_catalog_path)
    assert np.array_equal(a.vre_bins[0].profile, b.vre_bins[0].profile)
    assert np.all((a.vre_bins[0].profile >= 0) & (a.vre_bins[0].profile <= 1))


def test_validation_collects_every_violation():
    spec = h2_switching_spec()
    zone = make_zone(3, 6, power_mw=-1.0)
    broken = SystemSpec(name='broken', zones=(zone,), gen_techs=spec.gen_techs, vre_bins=spec.vre_bins)
    codes = {v.code for v in validate_spec(broken)}
    assert 'zone.ids_not_contiguous' in codes
    assert 'series.negative_demand' in codes
    # the wind bin points at zone 1, which no longer exists
    assert 'vre.unknown_zone' in codes


def test_validation_output_is_sorted():
    spec = h2_switching_spec()
    broken = SystemSpec(name='broken', zones=(make_zone(2, 6, power_mw=-1.0),), gen_techs=spec.gen_techs)
    violations = validate_spec(broken)
    assert violations == sorted(violations)


def test_timeline_settings_reject_short_data():
    spec = h2_switching_spec(hours=48)
    codes = {v.code for v in validate_timeline_settings(spec, k_total=4, period_hours=24)}
    assert codes == {'timeline.short_series', 'timeline.too_few_candidates'}


def test_csv_writer_prepends_schema_version(tmp_path):
    path = str(tmp_path / 'out.csv')
    write_csv(pd.DataFrame({'a': [1.5], 'b': ['x']}), path)
    assert open(path).readline() == '# schema_version: 1\n'
    frame, header_line = read_csv(path, ['a', 'b'])
    assert header_line == 2
    assert frame['a'].tolist() == [1.5]


def test_csv_reader_rejects_other_schema_versions(tmp_path):
    path = _write(tmp_path, 'old.csv', '# schema_version: 0\na\n1\n')
    with pytest.raises(DataError, match='schema version'):
        read_csv(path)


def test_json_output_is_stable(tmp_path):
    path = tmp_path / 'r.json'
    write_json({'b': np.float64(1.0), 'a': float('inf'), 'c': np.arange(2)}, str(path))
    assert path.read_text() == '{\n  "a": null,\n  "b": 1.0,\n  "c": [\n    0,\n    1\n  ]\n}\n'


def test_negative_demand_cites_zone_and_hour():
    spec = h2_switching_spec(hours=24)
    demand = np.full(24, 10.0)
    demand[17] = -1.0
    broken = replace(spec, zones=(replace(spec.zones[0], demand_power=demand),))
    violations = [v for v in validate_spec(broken) if v.code == 'series.negative_demand']
    assert len(violations) == 1
    assert violations[0].location == 'zone 1 demand_power hour 17'


def test_boiloff_only_for_liquid_trucks():
    spec = delivery_spec()
    truck = replace(spec.truck_types[0], boiloff_per_day=0.03)
    before = set(validate_spec(spec))
    after = set(validate_spec(replace(spec, truck_types=(truck,))))
    assert [v.code for v in after - before] == ['truck.boiloff_carrier']


def test_northeast_dataset_is_valid():
    spec = load_spec(os.path.join(DATA_DIR, 'northeast-lite', 'catalog.yaml'))
    assert len(spec.zones) == 6
    assert not spec.zones[3].allows_central_h2_production
    assert validate_spec(spec) == []
    assert validate_timeline_settings(spec, k_total=12, period_hours=168) == []
