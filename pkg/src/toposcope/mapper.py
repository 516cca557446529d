"""The Mapper algorithm: filter evaluation, overlapping cover, per-fiber
clustering, nerve construction, plus stage-level memoization so interactive
parameter changes only recompute downstream stages."""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.cluster import DBSCAN

from .core import InvalidInput, PointCloud, fingerprint, pairwise_distances

FILTER_KINDS = ("coordinate_projection", "height", "l2_norm", "eccentricity")


@dataclass(frozen=True)
class FilterSpec:
    """One scalar filter function; run_mapper accepts one or two of these."""

    kind: str
    axis: int | None = None
    direction: tuple | None = None
    aggregate: str = "max"
    metric: str = "euclidean"

    def __post_init__(self):
        if self.kind not in FILTER_KINDS:
            raise InvalidInput(f"unknown filter kind {self.kind!r}")
        if self.kind == "coordinate_projection" and self.axis is None:
            raise InvalidInput("coordinate_projection needs an axis")
        if self.kind == "height":
            if self.direction is None:
                raise InvalidInput("height filter needs a direction")
            object.__setattr__(self, "direction", tuple(float(x) for x in self.direction))
        if self.kind == "eccentricity" and self.aggregate not in ("max", "mean"):
            raise InvalidInput("eccentricity aggregate must be 'max' or 'mean'")

    def key(self) -> tuple:
        return (self.kind, self.axis, self.direction, self.aggregate, self.metric)


@dataclass(frozen=True)
class CoverSpec:
    """Uniform overlapping interval cover, per filter axis."""

    n_intervals: int = 10
    overlap_frac: float = 0.3

    def __post_init__(self):
        if self.n_intervals < 1:
            raise InvalidInput("n_intervals must be >= 1")
        if not (0 <= self.overlap_frac < 1):
            raise InvalidInput("overlap_frac must be in [0, 1)")

    def key(self) -> tuple:
        return (self.n_intervals, float(self.overlap_frac))


@dataclass(frozen=True)
class ClusterSpec:
    """Per-fiber clustering method and parameters."""

    method: str = "single_linkage"
    cutoff: float = 0.5  # single_linkage threshold
    eps: float = 0.5  # dbscan radius
    min_samples: int = 5
    metric: str = "euclidean"

    def __post_init__(self):
        if self.method not in ("single_linkage", "dbscan"):
            raise InvalidInput(f"unknown clusterer {self.method!r}")

    def key(self) -> tuple:
        return (self.method, self.cutoff, self.eps, self.min_samples, self.metric)


@dataclass(frozen=True)
class MapperNode:
    id: int
    cover_id: int
    members: tuple
    size: int
    mean_filter: float


@dataclass(frozen=True)
class MapperGraph:
    nodes: tuple
    edges: tuple  # (source id, target id, weight)

    def to_dict(self) -> dict:
        return {
            "nodes": [
                {
                    "id": n.id,
                    "cover_id": n.cover_id,
                    "members": list(n.members),
                    "size": n.size,
                    "mean_filter": n.mean_filter,
                }
                for n in self.nodes
            ],
            "edges": [
                {"source": u, "target": v, "weight": w} for u, v, w in self.edges
            ],
        }


def eval_filter(pc: PointCloud, f: FilterSpec) -> np.ndarray:
    """Per-point scalar filter values."""
    pts = pc.points
    if f.kind == "coordinate_projection":
        if not (0 <= f.axis < pc.d):
            raise InvalidInput(f"axis {f.axis} out of range for dimension {pc.d}")
        return pts[:, f.axis].copy()
    if f.kind == "height":
        direction = np.asarray(f.direction, dtype=float)
        if direction.shape != (pc.d,):
            raise InvalidInput("height direction must match the ambient dimension")
        norm = np.linalg.norm(direction)
        if abs(norm - 1.0) > 1e-9:
            raise InvalidInput("height direction must be a unit vector")
        return pts @ direction
    if f.kind == "l2_norm":
        return np.linalg.norm(pts, axis=1)
    # eccentricity over the full pairwise distance matrix
    dm = pairwise_distances(pc, f.metric).entries
    return dm.max(axis=1) if f.aggregate == "max" else dm.mean(axis=1)


def build_cover_1d(values, n: int, g: float) -> list:
    """n closed intervals of uniform length and fractional overlap g covering
    [min, max] of the values."""
    if n < 1 or not (0 <= g < 1):
        raise InvalidInput("need n >= 1 and 0 <= g < 1")
    vals = np.asarray(values, dtype=float)
    if vals.size == 0:
        raise InvalidInput("cover needs at least one value")
    lo, hi = float(vals.min()), float(vals.max())
    if lo == hi:
        return [(lo - 0.5, hi + 0.5)]
    length = (hi - lo) / (n - (n - 1) * g)
    spacing = length * (1 - g)
    overlap = length * g
    # end_i = start_{i+1} + overlap so adjacent intervals share boundaries
    # exactly in floating point; the final end is clamped to the range max
    return [
        (
            lo + i * spacing,
            hi if i == n - 1 else lo + (i + 1) * spacing + overlap,
        )
        for i in range(n)
    ]


def assign_pullback(values, cover: list) -> list:
    """Point index sets per cover element (closed-interval membership).

    1-D: values is a flat array with a list of intervals. 2-D: values has two
    columns and cover is a pair of interval lists; elements are their product
    boxes in row-major order.
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim == 1:
        return [
            tuple(np.flatnonzero((vals >= a) & (vals <= b)))
            for a, b in cover
        ]
    ca, cb = cover
    out = []
    for a0, b0 in ca:
        in_a = (vals[:, 0] >= a0) & (vals[:, 0] <= b0)
        for a1, b1 in cb:
            mask = in_a & (vals[:, 1] >= a1) & (vals[:, 1] <= b1)
            out.append(tuple(np.flatnonzero(mask)))
    return out


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, a):
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def cluster_fiber(pc: PointCloud, indices, spec: ClusterSpec) -> list:
    """Clusters (as sorted global index tuples) of one fiber.

    single_linkage gives the connected components of the <= cutoff threshold
    graph; dbscan noise points become singleton clusters so that every point
    stays covered.
    """
    indices = list(indices)
    if not indices:
        raise InvalidInput("cluster_fiber: empty fiber")
    sub = PointCloud(pc.points[indices])
    if spec.method == "single_linkage":
        dm = pairwise_distances(sub, spec.metric).entries
        uf = _UnionFind(len(indices))
        for i in range(len(indices)):
            for j in range(i + 1, len(indices)):
                if dm[i, j] <= spec.cutoff:
                    uf.union(i, j)
        groups: dict = {}
        for i in range(len(indices)):
            groups.setdefault(uf.find(i), []).append(indices[i])
    else:
        if len(indices) == 1:
            labels = np.array([-1])
        else:
            labels = DBSCAN(
                eps=spec.eps, min_samples=spec.min_samples, metric=spec.metric
            ).fit_predict(sub.points)
        groups = {}
        noise = 0
        for local, lab in enumerate(labels):
            if lab < 0:
                groups[f"noise{noise}"] = [indices[local]]
                noise += 1
            else:
                groups.setdefault(int(lab), []).append(indices[local])
    return sorted(tuple(sorted(g)) for g in groups.values())


def build_nerve(cluster_lists, filter_values=None, min_intersection: int = 1) -> MapperGraph:
    """One node per cluster; edges where member sets share enough points."""
    if min_intersection < 1:
        raise InvalidInput("min_intersection must be >= 1")
    fvals = None if filter_values is None else np.asarray(filter_values, dtype=float)
    nodes = []
    member_sets = []
    nid = 0
    for cover_id, clusters in enumerate(cluster_lists):
        for members in clusters:
            mean_f = float(np.mean(fvals[list(members)])) if fvals is not None else 0.0
            nodes.append(
                MapperNode(
                    id=nid,
                    cover_id=cover_id,
                    members=tuple(int(m) for m in members),
                    size=len(members),
                    mean_filter=mean_f,
                )
            )
            member_sets.append(frozenset(members))
            nid += 1
    edges = []
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            shared = len(member_sets[i] & member_sets[j])
            if shared >= min_intersection:
                edges.append((i, j, shared))
    return MapperGraph(tuple(nodes), tuple(edges))


def _filters_tuple(filters) -> tuple:
    if isinstance(filters, FilterSpec):
        filters = (filters,)
    filters = tuple(filters)
    if not 1 <= len(filters) <= 2:
        raise InvalidInput("run_mapper supports 1 or 2 filter functions")
    return filters


def _mapper_stages(pc, filters, cover, clusterer):
    """Shared sequential implementation of the filter/cover/cluster stages."""
    filters = _filters_tuple(filters)
    cols = [eval_filter(pc, f) for f in filters]
    values = cols[0] if len(cols) == 1 else np.column_stack(cols)
    if values.ndim == 1:
        intervals = build_cover_1d(values, cover.n_intervals, cover.overlap_frac)
        fibers = assign_pullback(values, intervals)
    else:
        intervals = [
            build_cover_1d(values[:, a], cover.n_intervals, cover.overlap_frac)
            for a in range(2)
        ]
        fibers = assign_pullback(values, intervals)
    clusters = [
        cluster_fiber(pc, fiber, clusterer) if fiber else []
        for fiber in fibers
    ]
    return values, clusters


def run_mapper(
    pc: PointCloud,
    filters,
    cover: CoverSpec = CoverSpec(),
    clusterer: ClusterSpec = ClusterSpec(),
    min_intersection: int = 1,
    parallel: bool = False,
) -> MapperGraph:
    """Full Mapper pipeline; deterministic node order (cover element, then
    smallest member index). parallel clusters fibers concurrently with an
    identical result."""
    filters = _filters_tuple(filters)
    if not parallel:
        values, clusters = _mapper_stages(pc, filters, cover, clusterer)
    else:
        cols = [eval_filter(pc, f) for f in filters]
        values = cols[0] if len(cols) == 1 else np.column_stack(cols)
        if values.ndim == 1:
            intervals = build_cover_1d(values, cover.n_intervals, cover.overlap_frac)
        else:
            intervals = [
                build_cover_1d(values[:, a], cover.n_intervals, cover.overlap_frac)
                for a in range(2)
            ]
        fibers = assign_pullback(values, intervals)
        with ThreadPoolExecutor(max_workers=4) as pool:
            clusters = list(
                pool.map(
                    lambda fiber: cluster_fiber(pc, fiber, clusterer) if fiber else [],
                    fibers,
                )
            )
    mean_source = values if values.ndim == 1 else values[:, 0]
    return build_nerve(clusters, mean_source, min_intersection)


STAGES = ("filter", "cover", "cluster", "nerve")


def memo_key(stage: str, dataset_fp: str, params: tuple) -> tuple:
    """Cache key: identical (fingerprint, stage params) gives identical keys."""
    if stage not in STAGES:
        raise InvalidInput(f"unknown stage {stage!r}")
    return (stage, dataset_fp, params)


class MapperMemo:
    """Stage-level cache for repeated Mapper runs over the same dataset.

    Each stage's key includes all upstream parameters, so changing a
    parameter invalidates exactly that stage and everything downstream.
    Safe under concurrent use; identical in-flight requests compute once.
    """

    def __init__(self):
        self._cache: dict = {}
        self._locks: dict = {}
        self._guard = threading.Lock()
        self.counters = {s: 0 for s in STAGES}

    def _get_or_compute(self, key, compute):
        with self._guard:
            if key in self._cache:
                return self._cache[key], True
            lock = self._locks.setdefault(key, threading.Lock())
        with lock:
            with self._guard:
                if key in self._cache:
                    return self._cache[key], True
            value = compute()
            with self._guard:
                self._cache[key] = value
                self.counters[key[0]] += 1
            return value, False

    def run(
        self,
        pc: PointCloud,
        filters,
        cover: CoverSpec = CoverSpec(),
        clusterer: ClusterSpec = ClusterSpec(),
        min_intersection: int = 1,
        dataset_fp: str | None = None,
    ):
        """Memoized run_mapper; returns (graph, cache_hit_on_final_stage)."""
        filters = _filters_tuple(filters)
        fp = dataset_fp if dataset_fp is not None else fingerprint(pc.points)
        fkey = tuple(f.key() for f in filters)
        ckey = fkey + cover.key()
        lkey = ckey + clusterer.key()
        nkey = lkey + (min_intersection,)

        def filter_stage():
            cols = [eval_filter(pc, f) for f in filters]
            return cols[0] if len(cols) == 1 else np.column_stack(cols)

        values, _ = self._get_or_compute(memo_key("filter", fp, fkey), filter_stage)

        def cover_stage():
            if values.ndim == 1:
                intervals = build_cover_1d(values, cover.n_intervals, cover.overlap_frac)
            else:
                intervals = [
                    build_cover_1d(values[:, a], cover.n_intervals, cover.overlap_frac)
                    for a in range(2)
                ]
            return assign_pullback(values, intervals)

        fibers, _ = self._get_or_compute(memo_key("cover", fp, ckey), cover_stage)

        def cluster_stage():
            return [
                cluster_fiber(pc, fiber, clusterer) if fiber else []
                for fiber in fibers
            ]

        clusters, _ = self._get_or_compute(memo_key("cluster", fp, lkey), cluster_stage)

        def nerve_stage():
            mean_source = values if values.ndim == 1 else values[:, 0]
            return build_nerve(clusters, mean_source, min_intersection)

        graph, hit = self._get_or_compute(memo_key("nerve", fp, nkey), nerve_stage)
        return graph, hit


def parse_filter(text: str) -> FilterSpec:
    """Parse the CLI / query filter syntax: proj:AXIS, height:D0,D1,...,
    norm, ecc:max|mean."""
    parts = text.split(":")
    head = parts[0]
    try:
        if head == "proj":
            return FilterSpec("coordinate_projection", axis=int(parts[1]))
        if head == "height":
            return FilterSpec("height", direction=tuple(float(x) for x in parts[1].split(",")))
        if head == "norm":
            return FilterSpec("l2_norm")
        if head == "ecc":
            agg = parts[1] if len(parts) > 1 else "max"
            return FilterSpec("eccentricity", aggregate=agg)
    except (IndexError, ValueError) as exc:
        raise InvalidInput(f"bad filter spec {text!r}: {exc}") from None
    raise InvalidInput(f"unknown filter {text!r} (use proj:N, height:..., norm, ecc:max|mean)")


def parse_clusterer(text: str) -> ClusterSpec:
    """Parse sl:CUTOFF or dbscan:EPS:MIN_SAMPLES."""
    parts = text.split(":")
    try:
        if parts[0] == "sl":
            return ClusterSpec("single_linkage", cutoff=float(parts[1]))
        if parts[0] == "dbscan":
            return ClusterSpec("dbscan", eps=float(parts[1]), min_samples=int(parts[2]))
    except (IndexError, ValueError) as exc:
        raise InvalidInput(f"bad clusterer spec {text!r}: {exc}") from None
    raise InvalidInput(f"unknown clusterer {text!r} (use sl:CUTOFF or dbscan:EPS:MIN_SAMPLES)")
