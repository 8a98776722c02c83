"""
Time-domain reduction to weighted representative weeks

Source years are cut into non-overlapping periods ("weeks", 168 hours unless
configured otherwise). Two extreme weeks are always kept:
- the week holding the system-peak load hour
- the week with the lowest demand-weighted average VRE capacity factor

The remaining candidates are clustered with K-means and each cluster is
represented by its medoid, the real week closest to the centroid. Weights
are weeks-per-year so that sum(weight * period_hours) == 8760.
"""
import logging
import os
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from sklearn.cluster import KMeans, kmeans_plusplus
from sklearn.exceptions import ConvergenceWarning

from core.config import Config
from core.exceptions import DataError, ParameterError
from core.exporters import read_csv, write_csv
from core.models import SystemSpec

logger = logging.getLogger(__name__)

BinKey = Tuple[str, int, int]


@dataclass(frozen=True, eq=False)
class CandidateWeek:
    index: int
    source_year: int
    start_hour: int
    feature_vector: np.ndarray
    peak_load: float = 0.0
    mean_vre_cf: float = float('nan')


@dataclass(frozen=True)
class ClusterResult:
    labels: np.ndarray
    medoids: Tuple[int, ...]
    sizes: Tuple[int, ...]
    inertia_trace: Tuple[float, ...]

    @property
    def inertia(self) -> float:
        return self.inertia_trace[-1] if self.inertia_trace else 0.0


@dataclass(frozen=True, eq=False)
class ReducedTimeline:
    """Weighted representative weeks with their hourly data"""
    period_hours: int
    starts: Tuple[int, ...]
    candidate_ids: Tuple[int, ...]
    weights: np.ndarray
    extreme_flags: Tuple[bool, ...]
    demand_power: Dict[int, np.ndarray]
    demand_h2: Dict[int, np.ndarray]
    profiles: Dict[BinKey, np.ndarray]
    assignment: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    cluster_sizes: Tuple[int, ...] = ()
    n_years: int = 1
    inertia_trace: Tuple[float, ...] = ()

    @property
    def n_weeks(self) -> int:
        return len(self.starts)

    def hours_represented(self) -> float:
        return float(np.sum(self.weights) * self.period_hours)

    def check_closure(self, tolerance: float = Config.WEIGHT_CLOSURE_TOLERANCE_HOURS) -> bool:
        return abs(self.hours_represented() - Config.HOURS_PER_YEAR) <= tolerance

    def demand(self, zone_id: int, week: int) -> np.ndarray:
        return self.demand_power[zone_id][week]

    def h2_demand(self, zone_id: int, week: int) -> np.ndarray:
        return self.demand_h2[zone_id][week]

    def profile(self, key: BinKey, week: int) -> np.ndarray:
        return self.profiles[key][week]

    @classmethod
    def from_slices(cls, spec: SystemSpec, starts: Sequence[int], period_hours: int,
                    weights: Optional[Sequence[float]] = None) -> 'ReducedTimeline':
        """
        Build a timeline from explicitly chosen weeks

        Args:
            spec: Source of the hourly series
            starts: Absolute start hour of each week
            period_hours: Hours per week
            weights: Weeks-per-year per week; defaults to an even split of the year

        Returns:
            ReducedTimeline with no extreme flags and an identity assignment
        """
        starts = tuple(int(s) for s in starts)
        if weights is None:
            weights = [Config.HOURS_PER_YEAR / period_hours / len(starts)] * len(starts)
        for s in starts:
            if s < 0 or s + period_hours > spec.n_hours:
                raise ParameterError(f"week starting at hour {s} runs past the {spec.n_hours}-hour series")
        return _assemble(spec, starts, tuple(s // period_hours for s in starts), period_hours,
                         np.asarray(weights, dtype=float), tuple(False for _ in starts),
                         assignment=np.arange(len(starts)), cluster_sizes=tuple(1 for _ in starts),
                         n_years=max(1, spec.n_hours // Config.HOURS_PER_YEAR))


def _slice(series: np.ndarray, starts: Sequence[int], period_hours: int) -> np.ndarray:
    out = np.stack([series[s:s + period_hours] for s in starts]) if starts else np.zeros((0, period_hours))
    out.setflags(write=False)
    return out


def _assemble(spec: SystemSpec, starts, candidate_ids, period_hours, weights, flags, **extra) -> ReducedTimeline:
    weights = np.asarray(weights, dtype=float)
    weights.setflags(write=False)
    return ReducedTimeline(
        period_hours=period_hours,
        starts=tuple(starts),
        candidate_ids=tuple(candidate_ids),
        weights=weights,
        extreme_flags=tuple(flags),
        demand_power={z.id: _slice(z.demand_power, starts, period_hours) for z in spec.zones},
        demand_h2={z.id: _slice(z.demand_h2, starts, period_hours) for z in spec.zones},
        profiles={b.key: _slice(b.profile, starts, period_hours) for b in spec.vre_bins},
        **extra,
    )


def candidates_per_year(period_hours: int) -> int:
    return Config.HOURS_PER_YEAR // period_hours


def candidate_weeks(spec: SystemSpec, period_hours: int = Config.DEFAULT_PERIOD_HOURS) -> List[CandidateWeek]:
    """
    Cut every source year into non-overlapping periods and build their features

    The trailing partial period of each year is dropped. Features are the
    concatenation of every demand and VRE profile slice, each series scaled by
    its own maximum over the full horizon.

    Args:
        spec: Planning instance holding the hourly series
        period_hours: Hours per candidate

    Returns:
        Candidates in chronological order
    """
    if period_hours <= 0 or period_hours > Config.HOURS_PER_YEAR:
        raise ParameterError(f"period_hours must lie in 1..{Config.HOURS_PER_YEAR}, got {period_hours}")
    n_years = spec.n_hours // Config.HOURS_PER_YEAR
    if n_years < 1:
        raise ParameterError(f"time reduction needs at least one full year of data, got {spec.n_hours} hours")

    series = []
    for z in spec.zones:
        series.extend([z.demand_power, z.demand_h2])
    series.extend(b.profile for b in spec.vre_bins)
    scaled = []
    for s in series:
        peak = float(np.max(s)) if len(s) else 0.0
        if peak > 0:
            scaled.append(s / peak)
    stacked = np.vstack(scaled) if scaled else np.zeros((1, spec.n_hours))

    system_load = np.sum([z.demand_power for z in spec.zones], axis=0)
    zone_vre = _zone_vre_cf(spec)
    annual_demand = np.array([float(np.sum(z.demand_power)) for z in spec.zones])

    per_year = candidates_per_year(period_hours)
    out = []
    for year in range(n_years):
        for k in range(per_year):
            start = year * Config.HOURS_PER_YEAR + k * period_hours
            window = slice(start, start + period_hours)
            mean_cf = float('nan')
            if zone_vre:
                ids = sorted(zone_vre)
                cfs = np.array([zone_vre[i][window].mean() for i in ids])
                w = np.array([annual_demand[spec.zone_ids.index(i)] for i in ids])
                mean_cf = float(np.average(cfs, weights=w)) if w.sum() > 0 else float(cfs.mean())
            out.append(CandidateWeek(
                index=len(out),
                source_year=year,
                start_hour=start,
                feature_vector=stacked[:, window].ravel(),
                peak_load=float(system_load[window].max()),
                mean_vre_cf=mean_cf,
            ))
    return out


def _zone_vre_cf(spec: SystemSpec) -> Dict[int, np.ndarray]:
    """Hourly mean capacity factor over each zone's VRE bins"""
    vre_techs = {t.id for t in spec.gen_techs if t.is_vre}
    out = {}
    for zone_id in spec.zone_ids:
        profiles = [b.profile for b in spec.bins_in(zone_id) if b.tech_id in vre_techs]
        if profiles:
            out[zone_id] = np.mean(profiles, axis=0)
    return out


def select_extreme_weeks(candidates: Sequence[CandidateWeek]) -> List[int]:
    """
    Peak-load week and lowest-VRE week, deduplicated

    Returns:
        Sorted candidate indices (one or two entries)
    """
    if not candidates:
        return []
    peaks = np.array([c.peak_load for c in candidates])
    chosen = {candidates[int(np.argmax(peaks))].index}
    cfs = np.array([c.mean_vre_cf for c in candidates])
    if not np.all(np.isnan(cfs)):
        chosen.add(candidates[int(np.nanargmin(cfs))].index)
    return sorted(chosen)


def kmeans_cluster(candidates: Sequence[CandidateWeek], k: int, seed: int,
                   max_iter: int = Config.KMEANS_MAX_ITER, tol: float = Config.KMEANS_TOL) -> ClusterResult:
    """
    Lloyd K-means with seeded k-means++ initialization and medoid selection

    Each iteration is one scikit-learn Lloyd step started from the previous
    centers, so the inertia after every step is recorded. Empty clusters are
    relocated by scikit-learn to the points farthest from their centers and
    assignment ties go to the lowest cluster index.

    Args:
        candidates: Weeks to cluster
        k: Number of clusters, 1 <= k <= len(candidates)
        seed: Seed for the k-means++ initialization
        max_iter: Iteration cap
        tol: Stop when inertia improves by less than this fraction

    Returns:
        ClusterResult with labels, medoid candidate indices and inertia trace
    """
    if not candidates:
        raise ParameterError("cannot cluster an empty candidate set")
    if not 1 <= k <= len(candidates):
        raise ParameterError(f"k must lie in 1..{len(candidates)}, got {k}")

    X = np.vstack([c.feature_vector for c in candidates]).astype(float)
    centers, _ = kmeans_plusplus(X, n_clusters=k, random_state=seed)
    trace: List[float] = []
    labels = np.zeros(len(X), dtype=int)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', ConvergenceWarning)
        for _ in range(max(1, max_iter)):
            km = KMeans(n_clusters=k, init=centers, n_init=1, max_iter=1, algorithm='lloyd', random_state=seed)
            km.fit(X)
            labels = km.labels_.astype(int)
            inertia = float(km.inertia_)
            moved = not np.array_equal(km.cluster_centers_, centers)
            centers = km.cluster_centers_
            previous = trace[-1] if trace else None
            trace.append(inertia)
            if not moved:
                break
            if previous is not None and previous - inertia <= tol * max(previous, 1e-12):
                break

    medoids = []
    sizes = []
    for j in range(k):
        members = np.flatnonzero(labels == j)
        sizes.append(int(members.size))
        if members.size == 0:
            medoids.append(-1)
            continue
        dist = np.sum((X[members] - centers[j]) ** 2, axis=1)
        medoids.append(int(candidates[int(members[int(np.argmin(dist))])].index))
    logger.debug("K-means: k=%d, %d iterations, inertia %.6g", k, len(trace), trace[-1])
    return ClusterResult(labels=labels, medoids=tuple(medoids), sizes=tuple(sizes), inertia_trace=tuple(trace))


def build_timeline(spec: SystemSpec, k_total: int = Config.DEFAULT_K_TOTAL, seed: int = Config.DEFAULT_SEED,
                   period_hours: int = Config.DEFAULT_PERIOD_HOURS, max_iter: int = Config.KMEANS_MAX_ITER,
                   tol: float = Config.KMEANS_TOL,
                   candidates: Optional[Sequence[CandidateWeek]] = None) -> ReducedTimeline:
    """
    Select and weight representative weeks

    Args:
        spec: Planning instance
        k_total: Weeks in the reduced timeline, extremes included
        seed: Clustering seed
        period_hours: Hours per week
        max_iter: K-means iteration cap
        tol: K-means relative inertia tolerance
        candidates: Precomputed candidates for this spec and period length

    Returns:
        ReducedTimeline ordered chronologically
    """
    if candidates is None:
        candidates = candidate_weeks(spec, period_hours)
    extremes = select_extreme_weeks(candidates)
    n_clustered = k_total - len(extremes)
    if n_clustered < 1:
        raise ParameterError(f"k_total={k_total} leaves no room for clustered weeks beside "
                             f"{len(extremes)} extreme weeks")
    rest = [c for c in candidates if c.index not in set(extremes)]
    if n_clustered > len(rest):
        raise ParameterError(f"k_total={k_total} exceeds the {len(candidates)} candidate weeks available")

    n_years = max(1, spec.n_hours // Config.HOURS_PER_YEAR)
    per_year = candidates_per_year(period_hours)
    clusters = kmeans_cluster(rest, n_clustered, seed, max_iter, tol)

    residual = Config.HOURS_PER_YEAR / period_hours - len(extremes) / n_years
    weight_of: Dict[int, float] = {i: 1.0 / n_years for i in extremes}
    size_of: Dict[int, int] = {i: 1 for i in extremes}
    for medoid, size in zip(clusters.medoids, clusters.sizes):
        if medoid < 0:
            continue
        weight_of[medoid] = residual * size / len(rest)
        size_of[medoid] = size

    selected = sorted(weight_of)
    position = {cid: w for w, cid in enumerate(selected)}
    by_index = {c.index: c for c in candidates}

    # Period-to-year mapping for the first source year
    assignment = np.full(per_year, -1, dtype=int)
    rest_label = {c.index: int(lbl) for c, lbl in zip(rest, clusters.labels)}
    for cid in range(min(per_year, len(candidates))):
        if cid in position and cid in extremes:
            assignment[cid] = position[cid]
        else:
            medoid = clusters.medoids[rest_label[cid]]
            assignment[cid] = position[medoid]

    timeline = _assemble(
        spec,
        starts=[by_index[c].start_hour for c in selected],
        candidate_ids=selected,
        period_hours=period_hours,
        weights=[weight_of[c] for c in selected],
        flags=[c in extremes for c in selected],
        assignment=assignment,
        cluster_sizes=tuple(size_of[c] for c in selected),
        n_years=n_years,
        inertia_trace=clusters.inertia_trace,
    )
    logger.info("Reduced %d candidate weeks to %d (%d extreme), %.1f hours represented",
                len(candidates), timeline.n_weeks, len(extremes), timeline.hours_represented())
    return timeline


def reduction_diagnostics(timeline: ReducedTimeline, spec: SystemSpec) -> pd.DataFrame:
    """
    Compare annual mean and peak of every series against the full data

    Returns:
        One row per series with full/reduced mean and peak and their percentage errors
    """
    rows = []
    n_years = max(1, spec.n_hours // Config.HOURS_PER_YEAR)
    horizon = n_years * Config.HOURS_PER_YEAR
    series = []
    for z in spec.zones:
        series.append((f'demand_power/{z.id}', z.demand_power, timeline.demand_power[z.id]))
        series.append((f'demand_h2/{z.id}', z.demand_h2, timeline.demand_h2[z.id]))
    for b in spec.vre_bins:
        series.append((_bin_series_name(b.key), b.profile, timeline.profiles[b.key]))

    w = np.asarray(timeline.weights)
    for name, full, reduced in series:
        full = np.asarray(full[:horizon], dtype=float)
        full_mean = float(full.mean())
        reduced_mean = float(np.sum(w[:, None] * reduced) / (w.sum() * timeline.period_hours))
        full_peak = float(full.max())
        reduced_peak = float(reduced.max()) if reduced.size else 0.0
        rows.append({
            'series': name,
            'full_mean': full_mean,
            'reduced_mean': reduced_mean,
            'mean_error_pct': _pct(reduced_mean, full_mean),
            'full_peak': full_peak,
            'reduced_peak': reduced_peak,
            'peak_error_pct': _pct(reduced_peak, full_peak),
        })
    return pd.DataFrame(rows)


def _pct(value: float, reference: float) -> float:
    if reference == 0:
        return 0.0 if value == 0 else float('inf')
    return 100.0 * (value - reference) / reference


# -- Bundle I/O -----------------------------------------------------------

def _bin_series_name(key: BinKey) -> str:
    tech, zone, bin_id = key
    return f'vre/{tech}/{zone}/{bin_id}'


def _parse_series_name(name: str):
    parts = name.split('/')
    if parts[0] in ('demand_power', 'demand_h2') and len(parts) == 2:
        return parts[0], int(parts[1])
    if parts[0] == 'vre' and len(parts) == 4:
        return 'vre', (parts[1], int(parts[2]), int(parts[3]))
    raise ValueError(name)


def write_timeline_bundle(timeline: ReducedTimeline, directory: str):
    """Write weeks.csv, series.csv and assignment.csv into ``directory``"""
    weeks = pd.DataFrame({
        'week': np.arange(timeline.n_weeks),
        'candidate': timeline.candidate_ids,
        'start_hour': timeline.starts,
        'weight': np.asarray(timeline.weights, dtype=float),
        'extreme': [int(f) for f in timeline.extreme_flags],
        'cluster_size': timeline.cluster_sizes or [1] * timeline.n_weeks,
        'period_hours': timeline.period_hours,
        'n_years': timeline.n_years,
    })
    write_csv(weeks, os.path.join(directory, 'weeks.csv'))

    frames = []
    hours = np.arange(timeline.period_hours)
    blocks = [(f'demand_power/{z}', a) for z, a in sorted(timeline.demand_power.items())]
    blocks += [(f'demand_h2/{z}', a) for z, a in sorted(timeline.demand_h2.items())]
    blocks += [(_bin_series_name(k), a) for k, a in sorted(timeline.profiles.items())]
    for name, arr in blocks:
        for w in range(timeline.n_weeks):
            frames.append(pd.DataFrame({'series': name, 'week': w, 'hour': hours, 'value': arr[w]}))
    columns = ['series', 'week', 'hour', 'value']
    series = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=columns)
    write_csv(series, os.path.join(directory, 'series.csv'))

    assignment = pd.DataFrame({'candidate': np.arange(len(timeline.assignment)), 'week': timeline.assignment})
    write_csv(assignment, os.path.join(directory, 'assignment.csv'))


def read_timeline_bundle(directory: str) -> ReducedTimeline:
    """Rebuild a ReducedTimeline from a bundle written by write_timeline_bundle"""
    weeks_path = os.path.join(directory, 'weeks.csv')
    weeks, _ = read_csv(weeks_path, ['week', 'candidate', 'start_hour', 'weight', 'extreme',
                                     'cluster_size', 'period_hours', 'n_years'])
    weeks = weeks.sort_values('week')
    if weeks.empty:
        raise DataError("Timeline bundle has no weeks", weeks_path)
    period_hours = int(weeks['period_hours'].iloc[0])
    n_weeks = len(weeks)

    series_path = os.path.join(directory, 'series.csv')
    series, _ = read_csv(series_path, ['series', 'week', 'hour', 'value'])
    demand_power: Dict[int, np.ndarray] = {}
    demand_h2: Dict[int, np.ndarray] = {}
    profiles: Dict[BinKey, np.ndarray] = {}
    for name, block in series.groupby('series', sort=True):
        try:
            kind, key = _parse_series_name(str(name))
        except ValueError:
            raise DataError(f"Unknown series name {name!r} in bundle", series_path)
        if len(block) != n_weeks * period_hours:
            raise DataError(f"Series {name!r} has {len(block)} rows, expected {n_weeks * period_hours}", series_path)
        arr = block.sort_values(['week', 'hour'])['value'].to_numpy(dtype=float).reshape(n_weeks, period_hours)
        arr.setflags(write=False)
        {'demand_power': demand_power, 'demand_h2': demand_h2, 'vre': profiles}[kind][key] = arr

    assignment_path = os.path.join(directory, 'assignment.csv')
    assignment = np.zeros(0, dtype=int)
    if os.path.exists(assignment_path):
        frame, _ = read_csv(assignment_path, ['candidate', 'week'])
        assignment = frame.sort_values('candidate')['week'].to_numpy(dtype=int)

    weights = weeks['weight'].to_numpy(dtype=float)
    weights.setflags(write=False)
    return ReducedTimeline(
        period_hours=period_hours,
        starts=tuple(int(s) for s in weeks['start_hour']),
        candidate_ids=tuple(int(c) for c in weeks['candidate']),
        weights=weights,
        extreme_flags=tuple(bool(f) for f in weeks['extreme']),
        demand_power=demand_power,
        demand_h2=demand_h2,
        profiles=profiles,
        assignment=assignment,
        cluster_sizes=tuple(int(s) for s in weeks['cluster_size']),
        n_years=int(weeks['n_years'].iloc[0]),
    )
