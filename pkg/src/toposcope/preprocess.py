"""Transformers from raw time series, images, and graphs into the
metric / filtered inputs that persistence computations consume."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, shortest_path

from .core import (
    DegenerateChannel,
    DistanceMatrix,
    GrayImage,
    InvalidInput,
    PointCloud,
    WeightedGraph,
)


@dataclass(frozen=True)
class WindowBatch:
    """Equal-length segments of a series taken at a fixed stride."""

    windows: tuple
    size: int
    stride: int


def _as_series(ts) -> np.ndarray:
    arr = np.asarray(ts, dtype=float)
    if arr.size == 0:
        raise InvalidInput("time series must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("time series must be finite")
    return arr


def sliding_window(ts, size: int, stride: int = 1) -> WindowBatch:
    """Cut ts into windows ts[i:i+size] for i = 0, stride, 2*stride, ...

    The trailing remainder that does not fill a window is dropped.
    """
    arr = _as_series(ts)
    if size < 1 or size > len(arr):
        raise InvalidInput(f"window size {size} outside [1, {len(arr)}]")
    if stride < 1:
        raise InvalidInput("stride must be >= 1")
    windows = tuple(
        arr[i:i + size].copy() for i in range(0, len(arr) - size + 1, stride)
    )
    return WindowBatch(windows=windows, size=size, stride=stride)


def takens_embedding(ts, dimension: int, delay: int, stride: int = 1) -> PointCloud:
    """Delay-coordinate embedding of a univariate series into R^dimension."""
    arr = _as_series(ts)
    if arr.ndim != 1:
        raise InvalidInput("takens_embedding expects a univariate series")
    if dimension < 1 or delay < 1 or stride < 1:
        raise InvalidInput("dimension, delay, and stride must all be >= 1")
    span = (dimension - 1) * delay
    if len(arr) < span + 1:
        raise InvalidInput(
            f"series of length {len(arr)} too short for dimension={dimension}, "
            f"delay={delay} (needs >= {span + 1})"
        )
    starts = np.arange(0, len(arr) - span, stride)
    offsets = np.arange(dimension) * delay
    return PointCloud(arr[starts[:, None] + offsets[None, :]])


def pearson_dissimilarity(window) -> DistanceMatrix:
    """1 - Pearson correlation between the channels of a multivariate window."""
    arr = _as_series(window)
    if arr.ndim != 2 or arr.shape[1] < 2:
        raise InvalidInput("pearson_dissimilarity needs >= 2 channels (columns)")
    centered = arr - arr.mean(axis=0)
    norms = np.sqrt(np.sum(centered * centered, axis=0))
    if np.any(norms == 0):
        bad = int(np.flatnonzero(norms == 0)[0])
        raise DegenerateChannel(f"channel {bad} has zero variance")
    r = (centered.T @ centered) / np.outer(norms, norms)
    d = np.clip(1.0 - r, 0.0, 2.0)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d)


def transition_graph(ts, n_states: int) -> WeightedGraph:
    """Directed graph of transitions between equal-width value bins.

    Vertices are the occupied bins (relabeled consecutively in bin order);
    edge u->v carries the count of consecutive-sample transitions, u != v.
    """
    arr = _as_series(ts)
    if arr.ndim != 1:
        raise InvalidInput("transition_graph expects a univariate series")
    if n_states < 1:
        raise InvalidInput("n_states must be >= 1")
    lo, hi = float(arr.min()), float(arr.max())
    if lo == hi:
        bins = np.zeros(len(arr), dtype=int)
    else:
        bins = np.minimum(
            ((arr - lo) / (hi - lo) * n_states).astype(int), n_states - 1
        )
    occupied = np.unique(bins)
    relabel = {int(b): i for i, b in enumerate(occupied)}
    counts: dict = {}
    for a, b in zip(bins[:-1], bins[1:]):
        if a != b:
            key = (relabel[int(a)], relabel[int(b)])
            counts[key] = counts.get(key, 0) + 1
    edges = tuple((u, v, float(w)) for (u, v), w in sorted(counts.items()))
    return WeightedGraph(n=len(occupied), edges=edges, directed=True)


def binarize_image(img: GrayImage, threshold: float) -> GrayImage:
    """1 where intensity >= threshold, else 0."""
    return GrayImage((img.pixels >= threshold).astype(float))


def _check_binary(img: GrayImage) -> np.ndarray:
    px = img.pixels
    if not np.all((px == 0) | (px == 1)):
        raise InvalidInput("expected a binary image with entries in {0, 1}")
    return px


def height_filtration(img: GrayImage, direction) -> GrayImage:
    """Filtration values of active pixels by height along a unit direction.

    Active pixels get <(row, col), direction> shifted so the minimum is 0;
    inactive pixels get max_active + 1.
    """
    px = _check_binary(img)
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (2,):
        raise InvalidInput("direction must be a 2-vector over (row, col)")
    if abs(np.linalg.norm(direction) - 1.0) > 1e-9:
        raise InvalidInput("direction must be a unit vector")
    rows, cols = np.nonzero(px == 1)
    if len(rows) == 0:
        raise InvalidInput("height_filtration: image has no active pixels")
    heights = rows * direction[0] + cols * direction[1]
    heights -= heights.min()
    out = np.full(px.shape, heights.max() + 1.0)
    out[rows, cols] = heights
    return GrayImage(out)


def image_to_point_cloud(img: GrayImage) -> PointCloud:
    """One 2-D point (row, col) per active pixel, in row-major order."""
    px = _check_binary(img)
    rows, cols = np.nonzero(px == 1)
    if len(rows) == 0:
        raise InvalidInput("image_to_point_cloud: image has no active pixels")
    return PointCloud(np.column_stack([rows, cols]).astype(float))


def graph_geodesic(g: WeightedGraph) -> DistanceMatrix:
    """All-pairs shortest-path matrix of the symmetrized graph.

    Parallel directed edges collapse to the minimum weight; unreachable
    pairs get the finite cap (sum of all edge weights) + 1.
    """
    best: dict = {}
    for u, v, w in g.edges:
        key = (min(u, v), max(u, v))
        if key not in best or w < best[key]:
            best[key] = w
    n = g.n
    dense = np.full((n, n), np.inf)
    np.fill_diagonal(dense, 0.0)
    for (u, v), w in best.items():
        dense[u, v] = w
        dense[v, u] = w
    # null_value=inf keeps explicit zero-weight edges as edges
    dist = shortest_path(
        csgraph_from_dense(dense, null_value=np.inf), method="D", directed=False
    )
    cap = sum(w for _, _, w in g.edges) + 1.0
    dist[~np.isfinite(dist)] = cap
    return DistanceMatrix(dist)
