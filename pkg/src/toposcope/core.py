"""Shared domain types, validation, and pairwise-distance construction.

All numeric data is float64. Infinite deaths are represented by
``math.inf`` in memory and serialized as JSON ``null``.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

INF = math.inf

_SYMMETRY_TOL = 1e-12


class InvalidInput(ValueError):
    """Raised when an operation receives data violating its preconditions."""


class DegenerateChannel(InvalidInput):
    """Raised when a correlation-based transform meets a zero-variance channel."""


class InvalidFiltration(InvalidInput):
    """Raised when a filtered complex violates face-order or value-order rules."""


def _as_float_matrix(data, name: str) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name}: entries must be finite")
    return arr


@dataclass(frozen=True)
class PointCloud:
    """n points in a common d-dimensional ambient space."""

    points: np.ndarray

    def __post_init__(self):
        pts = _as_float_matrix(self.points, "PointCloud")
        if pts.ndim != 2:
            raise InvalidInput("PointCloud: expected a 2-D array of shape (n, d)")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidInput("PointCloud: need at least one point with d >= 1")
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative n x n matrix with zero diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        m = _as_float_matrix(self.entries, "DistanceMatrix")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInput("DistanceMatrix: expected a square matrix")
        if np.any(m < 0):
            raise InvalidInput("DistanceMatrix: entries must be nonnegative")
        if np.any(np.abs(np.diag(m)) > _SYMMETRY_TOL):
            raise InvalidInput("DistanceMatrix: diagonal must be zero")
        if np.max(np.abs(m - m.T), initial=0.0) > _SYMMETRY_TOL:
            raise InvalidInput("DistanceMatrix: matrix must be symmetric")
        m = np.ascontiguousarray((m + m.T) / 2.0)
        np.fill_diagonal(m, 0.0)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class FilteredComplex:
    """Ordered simplices (sorted vertex tuples) with filtration values.

    The order must list every face before its cofaces and have
    non-decreasing filtration values.
    """

    simplices: tuple

    def __post_init__(self):
        sims = tuple((tuple(v), float(val)) for v, val in self.simplices)
        object.__setattr__(self, "simplices", sims)
        self.validate()

    def validate(self) -> None:
        seen: dict[tuple, int] = {}
        prev_val = -INF
        for idx, (verts, val) in enumerate(self.simplices):
            if tuple(sorted(verts)) != verts:
                raise InvalidFiltration(f"simplex {verts}: vertices not sorted")
            if verts in seen:
                raise InvalidFiltration(f"duplicate simplex {verts}")
            if val < prev_val:
                raise InvalidFiltration(
                    f"simplex {verts}: filtration value decreases ({val} < {prev_val})"
                )
            if len(verts) > 1:
                for i in range(len(verts)):
                    face = verts[:i] + verts[i + 1:]
                    if face not in seen:
                        raise InvalidFiltration(
                            f"simplex {verts}: face {face} missing or listed later"
                        )
            seen[verts] = idx
            prev_val = val

    def __len__(self) -> int:
        return len(self.simplices)


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (homology dimension, birth, death) triples.

    Zero-persistence pairs are dropped at construction; infinite death
    marks essential classes.
    """

    pairs: tuple

    def __post_init__(self):
        kept = []
        for dim, birth, death in self.pairs:
            dim = int(dim)
            birth = float(birth)
            death = float(death)
            if dim < 0:
                raise InvalidInput("PersistenceDiagram: dimension must be >= 0")
            if death < birth:
                raise InvalidInput(
                    f"PersistenceDiagram: death {death} < birth {birth}"
                )
            if death == birth:
                continue
            kept.append((dim, birth, death))
        object.__setattr__(self, "pairs", tuple(sorted(kept)))

    def in_dimension(self, k: int) -> list:
        """(birth, death) pairs of homology dimension k, sorted."""
        return [(b, d) for dim, b, d in self.pairs if dim == k]

    def dimensions(self) -> list:
        return sorted({dim for dim, _, _ in self.pairs})

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class GrayImage:
    """H x W grayscale raster indexed (row, col)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = _as_float_matrix(self.pixels, "GrayImage")
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise InvalidInput("GrayImage: expected a nonempty 2-D matrix")
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def shape(self) -> tuple:
        return self.pixels.shape


@dataclass(frozen=True)
class WeightedGraph:
    """Vertex count plus weighted edge list; optionally directed.

    Directed graphs are symmetrized before any homology computation.
    """

    n: int
    edges: tuple
    directed: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise InvalidInput("WeightedGraph: negative vertex count")
        norm = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidInput(f"WeightedGraph: vertex id out of range: ({u},{v})")
            if u == v:
                raise InvalidInput(f"WeightedGraph: self-loop at {u}")
            if w < 0 or not math.isfinite(w):
                raise InvalidInput(f"WeightedGraph: bad weight {w}")
            norm.append((u, v, w))
        object.__setattr__(self, "edges", tuple(norm))


_METRICS = ("euclidean", "manhattan", "chebyshev")


def pairwise_distances(pc: PointCloud, metric: str = "euclidean") -> DistanceMatrix:
    """All-pairs distances of a point cloud under the chosen metric."""
    if metric not in _METRICS:
        raise InvalidInput(f"unknown metric {metric!r}; choose one of {_METRICS}")
    pts = pc.points
    diff = pts[:, None, :] - pts[None, :, :]
    if metric == "euclidean":
        m = np.sqrt(np.sum(diff * diff, axis=-1))
    elif metric == "manhattan":
        m = np.sum(np.abs(diff), axis=-1)
    else:
        m = np.max(np.abs(diff), axis=-1)
    return DistanceMatrix(m)


def validate_diagram(dgm) -> str | None:
    """Return None when valid, else a description of the first violation.

    Accepts raw (dim, birth, death) triples so that invalid data can be
    inspected without tripping PersistenceDiagram's constructor.
    """
    pairs = dgm.pairs if isinstance(dgm, PersistenceDiagram) else tuple(dgm)
    for dim, birth, death in pairs:
        if dim < 0 or dim != int(dim):
            return f"dimension {dim} is not a non-negative integer"
        if not math.isfinite(birth):
            return f"birth {birth} is not finite"
        if death < birth:
            return "death < birth"
        if death == birth:
            return "zero persistence pair stored"
    return None


# ---------------------------------------------------------------------------
# Serialization: diagram JSON and CSV input formats
# ---------------------------------------------------------------------------

def diagram_to_dict(dgm: PersistenceDiagram) -> dict:
    return {
        "pairs": [
            {"dim": dim, "birth": b, "death": (None if math.isinf(d) else d)}
            for dim, b, d in dgm.pairs
        ]
    }


def diagram_from_dict(obj: dict) -> PersistenceDiagram:
    pairs = [
        (p["dim"], p["birth"], INF if p["death"] is None else p["death"])
        for p in obj["pairs"]
    ]
    return PersistenceDiagram(tuple(pairs))


def diagram_to_json(dgm: PersistenceDiagram) -> str:
    return json.dumps(diagram_to_dict(dgm))


def diagram_from_json(text: str) -> PersistenceDiagram:
    return diagram_from_dict(json.loads(text))


def parse_numeric_csv(text: str) -> np.ndarray:
    """Comma-separated numeric rows, one row per line; returns a 2-D array."""
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            row = [float(tok) for tok in line.split(",")]
        except ValueError as exc:
            raise InvalidInput(f"line {lineno}: {exc}") from None
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InvalidInput(f"line {lineno}: expected {width} values, got {len(row)}")
        rows.append(row)
    if not rows:
        raise InvalidInput("no numeric rows found")
    return np.asarray(rows, dtype=float)


def point_cloud_from_csv(text: str) -> PointCloud:
    return PointCloud(parse_numeric_csv(text))


def time_series_from_csv(text: str) -> np.ndarray:
    """Univariate series (1 column) come back flat; multivariate stay 2-D."""
    arr = parse_numeric_csv(text)
    return arr[:, 0] if arr.shape[1] == 1 else arr


def image_from_csv(text: str) -> GrayImage:
    return GrayImage(parse_numeric_csv(text))


def canonical_csv_bytes(arr: np.ndarray) -> bytes:
    """Canonical CSV byte serialization used for dataset fingerprints."""
    arr = np.atleast_2d(np.asarray(arr, dtype=float))
    lines = [",".join(repr(x) for x in row) for row in arr]
    return ("\n".join(lines) + "\n").encode("ascii")


def fingerprint(arr: np.ndarray) -> str:
    """Stable 64-bit content hash of the canonical CSV bytes, hex-encoded."""
    return hashlib.blake2b(canonical_csv_bytes(arr), digest_size=8).hexdigest()
