import os

import numpy as np
import pytest

from conftest import DATA_DIR, h2_switching_spec
from core.data_loader import load_spec
from core.exceptions import ParameterError
from core.timeslices import (
    CandidateWeek, ReducedTimeline, build_timeline, candidate_weeks, kmeans_cluster, read_timeline_bundle,
    reduction_diagnostics, select_extreme_weeks, write_timeline_bundle,
)


@pytest.fixture(scope='module')
def toy_spec():
    return load_spec(os.path.join(DATA_DIR, 'toy', 'catalog.yaml'))


def test_candidates_cover_the_year(toy_spec):
    candidates = candidate_weeks(toy_spec, period_hours=24)
    assert len(candidates) == 365
    assert candidates[1].start_hour == 24
    weekly = candidate_weeks(toy_spec, period_hours=168)
    # the trailing partial week is dropped
    assert len(weekly) == 52


def test_weights_close_on_a_year(toy_spec):
    timeline = build_timeline(toy_spec, k_total=6, seed=3, period_hours=24)
    assert timeline.n_weeks == 6
    assert timeline.hours_represented() == pytest.approx(8760.0)
    assert timeline.check_closure()
    assert np.all(np.asarray(timeline.weights) > 0)
    assert list(timeline.starts) == sorted(timeline.starts)


def test_extreme_weeks_are_always_kept(toy_spec):
    candidates = candidate_weeks(toy_spec, period_hours=24)
    extremes = select_extreme_weeks(candidates)
    peak = max(candidates, key=lambda c: c.peak_load).index
    assert peak in extremes
    timeline = build_timeline(toy_spec, k_total=5, seed=1, period_hours=24, candidates=candidates)
    for cid in extremes:
        pos = timeline.candidate_ids.index(cid)
        assert timeline.extreme_flags[pos]
        assert timeline.weights[pos] == pytest.approx(1.0)


def test_same_seed_same_timeline(toy_spec):
    a = build_timeline(toy_spec, k_total=6, seed=9, period_hours=24)
    b = build_timeline(toy_spec, k_total=6, seed=9, period_hours=24)
    assert a.starts == b.starts
    assert np.array_equal(a.weights, b.weights)
    assert np.array_equal(a.assignment, b.assignment)


def test_assignment_maps_every_period_to_a_week(toy_spec):
    timeline = build_timeline(toy_spec, k_total=6, seed=9, period_hours=24)
    assert timeline.assignment.shape == (365,)
    assert timeline.assignment.min() >= 0
    assert timeline.assignment.max() < timeline.n_weeks
    for week, cid in enumerate(timeline.candidate_ids):
        assert timeline.assignment[cid] == week


def test_kmeans_inertia_never_increases(toy_spec):
    candidates = candidate_weeks(toy_spec, period_hours=24)
    result = kmeans_cluster(candidates, k=8, seed=5)
    trace = np.asarray(result.inertia_trace)
    assert np.all(np.diff(trace) <= 1e-9 * trace[:-1])
    assert sum(result.sizes) == len(candidates)
    assert len(result.medoids) == 8


def test_kmeans_rejects_bad_k(toy_spec):
    candidates = candidate_weeks(toy_spec, period_hours=24)[:5]
    with pytest.raises(ParameterError):
        kmeans_cluster(candidates, k=6, seed=0)


def test_k_total_must_leave_room_for_clusters(toy_spec):
    with pytest.raises(ParameterError):
        build_timeline(toy_spec, k_total=1, seed=0, period_hours=24)


def test_diagnostics_track_means(toy_spec):
    timeline = build_timeline(toy_spec, k_total=12, seed=2, period_hours=24)
    diag = reduction_diagnostics(timeline, toy_spec)
    assert set(diag['series']) >= {'demand_power/1', 'demand_h2/2', 'vre/wind/1/1'}
    load = diag.set_index('series').loc['demand_power/2']
    assert abs(load['mean_error_pct']) < 10.0
    # the peak-load week is kept, so the system peak survives reduction
    system = timeline.demand_power[1] + timeline.demand_power[2]
    full = toy_spec.zones[0].demand_power + toy_spec.zones[1].demand_power
    assert system.max() == pytest.approx(full.max())


def test_bundle_round_trip(toy_spec, tmp_path):
    timeline = build_timeline(toy_spec, k_total=4, seed=7, period_hours=24)
    write_timeline_bundle(timeline, str(tmp_path))
    back = read_timeline_bundle(str(tmp_path))
    assert back.starts == timeline.starts
    assert back.extreme_flags == timeline.extreme_flags
    assert np.allclose(back.weights, timeline.weights, rtol=0, atol=1e-12)
    assert np.array_equal(back.assignment, timeline.assignment)
    for key, arr in timeline.profiles.items():
        assert np.allclose(back.profiles[key], arr, rtol=0, atol=1e-12)
    assert np.allclose(back.demand_power[1], timeline.demand_power[1], rtol=0, atol=1e-9)


def test_explicit_slices_default_to_even_weights():
    spec = h2_switching_spec(hours=48)
    timeline = ReducedTimeline.from_slices(spec, [0, 24], period_hours=24)
    assert timeline.hours_represented() == pytest.approx(8760.0)
    assert timeline.demand_h2[1].shape == (2, 24)
    with pytest.raises(ParameterError):
        ReducedTimeline.from_slices(spec, [30], period_hours=24)


def _week(index, values):
    return CandidateWeek(index=index, source_year=0, start_hour=index * 168,
                         feature_vector=np.asarray(values, dtype=float))


def test_identical_weeks_form_one_tight_cluster():
    candidates = [_week(i, [1.0, 2.0, 3.0]) for i in range(4)]
    result = kmeans_cluster(candidates, k=1, seed=0)
    assert result.sizes == (4,)
    assert result.inertia == pytest.approx(0.0)


def test_one_cluster_per_week_when_k_is_saturated():
    candidates = [_week(i, [float(i), float(i * i)]) for i in range(5)]
    result = kmeans_cluster(candidates, k=5, seed=4)
    assert sorted(result.sizes) == [1] * 5
    assert result.inertia == pytest.approx(0.0)


def test_separated_groups_are_recovered():
    low = [_week(i, [0.1 * i, 0.0]) for i in range(4)]
    high = [_week(4 + i, [10.0 + 0.1 * i, 10.0]) for i in range(4)]
    result = kmeans_cluster(low + high, k=2, seed=1)
    assert len(set(result.labels[:4])) == 1
    assert len(set(result.labels[4:])) == 1
    assert result.labels[0] != result.labels[4]


def test_bundle_is_byte_identical_for_the_same_seed(toy_spec, tmp_path):
    for name in ('a', 'b'):
        write_timeline_bundle(build_timeline(toy_spec, k_total=4, seed=7, period_hours=24), str(tmp_path / name))
    for path in sorted((tmp_path / 'a').iterdir()):
        assert path.read_bytes() == (tmp_path / 'b' / path.name).read_bytes(), path.name
