from dataclasses import replace

import numpy as np
import pytest
import scipy.sparse as sp

from conftest import CCGT, SMR, WIND, drawdown_spec, h2_switching_spec, make_zone, single_week, wind_bin
from core.coefficients import storage_retention_per_hour
from core.data_loader import load_spec
from core.exceptions import DataError
from core.models import SystemSpec
from core.timeslices import build_timeline
from formulation.assembler import build_problem
from formulation.indexing import hydrogen_active
from formulation.problem import BuildOptions
from formulation.variables import VarKind
from solver.engine import choose_backend, solve
from solver.external import solve_arrays_with_highs, solve_mps_with_highs
from solver.mps import base36, export_mps, format_number, import_solution, parse_name, read_mps
from solver.simplex import RevisedSimplex, SolverOptions, geometric_scaling, solve_reference
from solver.verify import verify_solution


def _lp(rows, senses, rhs, c, lb=None, ub=None, **options):
    A = sp.csr_matrix(np.asarray(rows, dtype=float))
    n = A.shape[1]
    lb = np.zeros(n) if lb is None else np.asarray(lb, dtype=float)
    ub = np.full(n, np.inf) if ub is None else np.asarray(ub, dtype=float)
    return RevisedSimplex(A, np.asarray(c, dtype=float), np.asarray(senses), np.asarray(rhs, dtype=float),
                          lb, ub, SolverOptions(**options)).solve()


def test_single_row_dual_is_marginal_cost():
    solution = _lp([[1.0]], ['G'], [1.0], [1.0])
    assert solution.status == 'optimal'
    assert solution.objective == pytest.approx(1.0)
    assert solution.duals[0] == pytest.approx(1.0)


def test_transport_problem():
    # two plants (20, 30 units) ship to three markets (10, 25, 15)
    cost = [8, 6, 10, 9, 12, 13]
    rows = [[1, 1, 1, 0, 0, 0],
            [0, 0, 0, 1, 1, 1],
            [1, 0, 0, 1, 0, 0],
            [0, 1, 0, 0, 1, 0],
            [0, 0, 1, 0, 0, 1]]
    senses = ['L', 'L', 'E', 'E', 'E']
    rhs = [20, 30, 10, 25, 15]
    solution = _lp(rows, senses, rhs, cost)
    assert solution.status == 'optimal'
    assert solution.objective == pytest.approx(465.0)
    assert solution.primal[1] == pytest.approx(20.0)
    highs = solve_arrays_with_highs(sp.csr_matrix(np.asarray(rows, dtype=float)), np.asarray(cost, dtype=float),
                                    np.asarray(senses), np.asarray(rhs, dtype=float), np.zeros(6),
                                    np.full(6, np.inf))
    assert highs.objective == pytest.approx(465.0)
    # market duals agree up to a shift shared with the plant rows; compare the differences
    assert solution.duals[3] - solution.duals[2] == pytest.approx(highs.duals[3] - highs.duals[2])


def test_bland_rule_breaks_cycling():
    c = [-0.75, 20.0, -0.5, 6.0]
    rows = [[0.25, -8.0, -1.0, 9.0],
            [0.5, -12.0, -0.5, 3.0],
            [0.0, 0.0, 1.0, 0.0]]
    solution = _lp(rows, ['L', 'L', 'L'], [0.0, 0.0, 1.0], c, scaling=False, bland_after=1)
    assert solution.status == 'optimal'
    assert solution.objective == pytest.approx(-1.25)
    assert any(entry['bland'] for entry in solution.trace)


def test_infeasible_and_unbounded():
    assert _lp([[1.0], [1.0]], ['G', 'L'], [2.0, 1.0], [1.0]).status == 'infeasible'
    assert _lp([[1.0]], ['G'], [1.0], [-1.0]).status == 'unbounded'


def test_free_and_bounded_columns():
    # min x - y, x free, 0 <= y <= 3, x + y >= 2, x >= -4
    solution = _lp([[1.0, 1.0], [1.0, 0.0]], ['G', 'G'], [2.0, -4.0], [1.0, -1.0],
                   lb=[-np.inf, 0.0], ub=[np.inf, 3.0])
    assert solution.status == 'optimal'
    assert solution.primal == pytest.approx([-1.0, 3.0])
    assert solution.objective == pytest.approx(-4.0)


def test_iteration_limit():
    spec = h2_switching_spec()
    problem = build_problem(spec, single_week(spec, 6))
    solution = solve_reference(problem, SolverOptions(max_iters=2))
    assert solution.status == 'iteration_limit'


def test_trace_dual_bound_meets_objective():
    spec = h2_switching_spec()
    problem = build_problem(spec, single_week(spec, 6))
    solution = solve_reference(problem)
    last = [e for e in solution.trace if e['phase'] == 2][-1]
    assert last['dual_bound'] == pytest.approx(last['objective'], rel=1e-6)


def test_scaling_factors_are_powers_of_two():
    A = sp.csr_matrix(np.array([[1000.0, 0.001], [3.0, 7.0]]))
    R, S = geometric_scaling(A)
    assert np.all(np.log2(R) == np.round(np.log2(R)))
    assert np.all(np.log2(S) == np.round(np.log2(S)))


@pytest.mark.parametrize('co2_price', [0.0, 100.0, 1000.0])
def test_reference_matches_highs(co2_price):
    spec = h2_switching_spec(co2_price=co2_price, with_g2p=True)
    problem = build_problem(spec, single_week(spec, 6))
    ours = solve_reference(problem)
    theirs = solve(problem, SolverOptions(backend='highs'))
    assert ours.status == theirs.status == 'optimal'
    assert ours.objective == pytest.approx(theirs.objective, rel=1e-6)
    assert verify_solution(problem, ours).passed
    assert verify_solution(problem, theirs).passed


def test_balance_duals_are_prices():
    spec = h2_switching_spec(co2_price=0.0)
    problem = build_problem(spec, single_week(spec, 6))
    solution = solve_reference(problem)
    prices = solution.prices(problem, 'h2_balance')
    # SMR fuel is the marginal cost; its capacity is shared across the flat hours
    assert sum(prices.values()) / len(prices) == pytest.approx(1105.0, rel=0.01)


def test_auto_backend_threshold():
    spec = h2_switching_spec()
    problem = build_problem(spec, single_week(spec, 6))
    assert choose_backend(problem, SolverOptions(backend='auto')) == 'reference'
    assert choose_backend(problem, SolverOptions(backend='auto', auto_nnz_limit=1)) == 'highs'


def test_mps_names_round_trip():
    assert base36(0) == '000000'
    assert base36(36) == '000010'
    assert parse_name('PB' + base36(12345)) == ('PB', 12345)
    with pytest.raises(ValueError):
        parse_name('PB12')


@pytest.mark.parametrize('value, text', [
    (1105.0, '1105'),
    (-0.5, '-0.5'),
    (1.5e-07, '1.5e-7'),
    (1e22, '1e22'),
    (8760 / 6 * 808.0, '1179680'),
])
def test_mps_numbers_are_compact(value, text):
    assert format_number(value) == text
    assert len(text) <= 12


def test_mps_numbers_round_trip_exactly():
    for value in (1 / 3, -33.33 / 0.74, 2.0 ** -40, 123456789.123):
        assert float(format_number(value)) == value


def test_mps_export_is_exact(tmp_path):
    spec = h2_switching_spec(co2_price=37.5, with_g2p=True)
    problem = build_problem(spec, single_week(spec, 6))
    path = str(tmp_path / 'model.mps')
    names = export_mps(problem, path)
    model = read_mps(path)
    assert model.name == 'EH2PLAN'
    assert np.array_equal(model.A.toarray(), problem.A.toarray())
    assert np.array_equal(model.c, problem.c)
    assert np.array_equal(model.rhs, problem.rhs)
    assert np.array_equal(model.senses, problem.senses)
    assert np.array_equal(model.lb, problem.lb)
    assert np.array_equal(model.ub, problem.ub)
    assert [parse_name(n)[1] for n in model.col_names] == list(range(problem.n_vars))
    assert open(names).readline().startswith('# schema_version')


def test_external_solve_and_import(tmp_path):
    spec = h2_switching_spec(co2_price=100.0)
    problem = build_problem(spec, single_week(spec, 6))
    mps = str(tmp_path / 'model.mps')
    export_mps(problem, mps)
    _, csv_path = solve_mps_with_highs(mps, str(tmp_path / 'solution.csv'))
    imported = import_solution(problem, csv_path)
    report = verify_solution(problem, imported)
    assert report.passed
    assert imported.objective == pytest.approx(solve_reference(problem).objective, rel=1e-6)


def test_import_rejects_foreign_columns(tmp_path):
    spec = h2_switching_spec()
    problem = build_problem(spec, single_week(spec, 6))
    path = tmp_path / 'bad.csv'
    path.write_text('column_name,value\nZZ000000,1.0\n')
    with pytest.raises(DataError) as info:
        import_solution(problem, str(path))
    assert info.value.row == 2


def test_verification_flags_perturbed_solution():
    spec = h2_switching_spec(co2_price=100.0)
    problem = build_problem(spec, single_week(spec, 6))
    solution = solve_reference(problem)
    assert verify_solution(problem, solution).passed
    col = problem.index.get(VarKind.GEN_OUTPUT, ('smr_ccs', 1), 0, 3)
    solution.primal = solution.primal.copy()
    solution.primal[col] += 0.5
    report = verify_solution(problem, solution)
    assert not report.passed
    assert report.violated_rows.get('h2_balance', 0) >= 1
    named = [v.annotation for v in report.worst_rows]
    assert 'h2_balance[1]@w0h3' in named
    assert all(v.residual > report.tolerance for v in report.worst_rows)
    assert report.as_dict()['worst_rows'][0]['residual'] == pytest.approx(report.max_residual)


def test_verification_names_at_most_the_requested_rows():
    spec = h2_switching_spec(co2_price=100.0)
    problem = build_problem(spec, single_week(spec, 6))
    solution = solve_reference(problem)
    solution.primal = solution.primal.copy()
    for hour in range(6):
        solution.primal[problem.index.get(VarKind.GEN_OUTPUT, ('smr_ccs', 1), 0, hour)] += 0.5
    report = verify_solution(problem, solution, max_rows=2)
    assert len(report.worst_rows) == 2
    assert sum(report.violated_rows.values()) > 2


def test_system_without_demand_costs_nothing():
    spec = SystemSpec(name='empty', zones=(make_zone(1, 6),), gen_techs=(CCGT,))
    solution = solve_reference(build_problem(spec, single_week(spec, 6)))
    assert solution.status == 'optimal'
    assert solution.objective == pytest.approx(0.0, abs=1e-9)


def test_idle_h2_sector_leaves_power_cost_unchanged():
    power = SystemSpec(name='power', zones=(make_zone(1, 6, power_mw=10.0),), gen_techs=(WIND, CCGT),
                       vre_bins=(wind_bin(1, 6),))
    with_h2 = replace(power, name='with-h2', gen_techs=(WIND, CCGT, SMR))
    assert not hydrogen_active(power)
    base = solve_reference(build_problem(power, single_week(power, 6)))
    other = solve_reference(build_problem(with_h2, single_week(with_h2, 6)))
    assert base.status == other.status == 'optimal'
    assert other.objective == pytest.approx(base.objective, rel=1e-9)


def test_build_is_deterministic():
    spec = h2_switching_spec(co2_price=100.0, with_g2p=True)
    first = build_problem(spec, single_week(spec, 6))
    second = build_problem(spec, single_week(spec, 6))
    assert (first.A != second.A).nnz == 0
    for name in ('c', 'rhs', 'lb', 'ub'):
        np.testing.assert_array_equal(getattr(first, name), getattr(second, name))
    assert list(first.senses) == list(second.senses)


def _chronological_levels(problem, solution, timeline, storage, coords):
    """Hourly state of charge through the reference year rebuilt from a linked solve"""
    keep = storage_retention_per_hour(storage)
    inv = solution.block(problem, VarKind.INVENTORY, coords)
    decay = keep ** np.arange(inv.shape[1])
    levels = []
    for n, w in enumerate(timeline.assignment):
        soc = solution.value(problem, VarKind.SOC_START, coords + (n,))
        levels.append(decay * soc + inv[w] - decay * inv[w, 0])
    return np.concatenate(levels)


def test_linked_storage_holds_the_energy_it_serves():
    spec = drawdown_spec()
    timeline = single_week(spec, 24)
    problem = build_problem(spec, timeline, BuildOptions(storage_linkage='linked_chronological'))
    solution = solve_reference(problem)
    assert solution.status == 'optimal'
    coords = ('battery', 1)
    # twelve hours at 10 MW are served from storage before the wind arrives
    assert solution.value(problem, VarKind.SOC_START, coords + (0,)) >= 120.0 - 1e-6
    assert solution.value(problem, VarKind.STORAGE_ENERGY, coords) >= 120.0 - 1e-6
    levels = _chronological_levels(problem, solution, timeline, spec.storage_techs[0], coords)
    assert levels.min() >= -1e-6
    assert verify_solution(problem, solution).passed


@pytest.mark.slow
def test_linked_storage_on_toy_system(toy_catalog_path):
    spec = load_spec(toy_catalog_path)
    timeline = build_timeline(spec, k_total=4, seed=7, period_hours=24)
    problem = build_problem(spec, timeline, BuildOptions(storage_linkage='linked_chronological'))
    solution = solve(problem, SolverOptions(backend='highs'))
    assert solution.status == 'optimal'
    checked = 0
    for storage in spec.storage_techs:
        for zone in spec.zones:
            coords = (storage.id, zone.id)
            if not problem.index.has(VarKind.INVENTORY, coords):
                continue
            capacity = solution.value(problem, VarKind.STORAGE_ENERGY, coords) + spec.existing_energy(*coords)
            levels = _chronological_levels(problem, solution, timeline, storage, coords)
            tol = 1e-5 * max(1.0, capacity)
            assert levels.min() >= -tol, coords
            assert levels.max() <= capacity + tol, coords
            checked += 1
    assert checked > 0
