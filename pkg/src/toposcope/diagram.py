"""Vector representations of persistence diagrams (curves and images),
distances between diagrams, and scalar features.

Every operation works on the sub-diagram of a single homology dimension k.
Infinite deaths are substituted by the max finite death where a
representation needs finite values; the substitution is flagged in the
output metadata.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
from scipy.optimize import linear_sum_assignment
from scipy.sparse.csgraph import maximum_bipartite_matching

from .core import INF, InvalidInput, PersistenceDiagram

DEFAULT_BINS = 100


@dataclass(frozen=True)
class DiagramCurve:
    """Sampled curve representation: one or more layers over a shared grid."""

    grid: np.ndarray
    values: np.ndarray  # (layers, len(grid))
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        vals = np.atleast_2d(np.asarray(self.values, dtype=float))
        if grid.ndim != 1 or len(grid) < 1:
            raise InvalidInput("curve grid must be a nonempty 1-D array")
        if len(grid) > 1 and np.any(np.diff(grid) <= 0):
            raise InvalidInput("curve grid must be strictly increasing")
        if vals.shape[1] != len(grid):
            raise InvalidInput("value rows must match grid length")
        if not np.all(np.isfinite(vals)):
            raise InvalidInput("curve values must be finite")
        grid.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", vals)

    @property
    def n_layers(self) -> int:
        return self.values.shape[0]

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "layers": self.values.tolist(),
            "metadata": dict(self.metadata),
        }


@dataclass(frozen=True)
class DiagramImage:
    """Raster representation over a rectangular (x, y) grid."""

    x_grid: np.ndarray
    y_grid: np.ndarray
    values: np.ndarray  # (len(y_grid), len(x_grid))
    sigma: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        xg = np.asarray(self.x_grid, dtype=float)
        yg = np.asarray(self.y_grid, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (len(yg), len(xg)):
            raise InvalidInput("raster shape must be (len(y_grid), len(x_grid))")
        if not np.all(np.isfinite(vals)):
            raise InvalidInput("raster values must be finite")
        for a in (xg, yg, vals):
            a.setflags(write=False)
        object.__setattr__(self, "x_grid", xg)
        object.__setattr__(self, "y_grid", yg)
        object.__setattr__(self, "values", vals)

    def to_dict(self) -> dict:
        return {
            "x_grid": self.x_grid.tolist(),
            "y_grid": self.y_grid.tolist(),
            "values": self.values.tolist(),
            "sigma": self.sigma,
            "metadata": dict(self.metadata),
        }


def _subdiagram(dgm: PersistenceDiagram, k: int) -> list:
    return dgm.in_dimension(k)


def _finite_pairs(pairs: list) -> tuple[list, bool]:
    """Replace infinite deaths by the max finite death; flag the substitution."""
    finite_deaths = [d for _, d in pairs if math.isfinite(d)]
    if not any(math.isinf(d) for _, d in pairs):
        return list(pairs), False
    cap = max(finite_deaths) if finite_deaths else max(b for b, _ in pairs)
    return [(b, d if math.isfinite(d) else cap) for b, d in pairs], True


def default_grid(pairs: list, n_bins: int = DEFAULT_BINS) -> np.ndarray:
    """Uniform grid spanning [min birth, max finite death] of the pairs."""
    if not pairs:
        return np.linspace(0.0, 1.0, n_bins)
    finite, _ = _finite_pairs(pairs)
    lo = min(b for b, _ in finite)
    hi = max(d for _, d in finite)
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, n_bins)


def betti_curve(dgm: PersistenceDiagram, k: int = 1, grid=None) -> DiagramCurve:
    """Number of pairs alive at each grid value (half-open: b <= t < d)."""
    pairs = _subdiagram(dgm, k)
    finite, subst = _finite_pairs(pairs)
    g = np.asarray(grid, dtype=float) if grid is not None else default_grid(pairs)
    vals = np.zeros(len(g))
    for b, d in finite:
        vals += (b <= g) & (g < d)
    return DiagramCurve(g, vals[None, :], {"dim": k, "inf_substituted": subst})


def _tents(pairs: list, g: np.ndarray) -> np.ndarray:
    """Tent functions max(0, min(t - b, d - t)) per pair, shape (n_pairs, len(g))."""
    if not pairs:
        return np.zeros((0, len(g)))
    b = np.array([p[0] for p in pairs])[:, None]
    d = np.array([p[1] for p in pairs])[:, None]
    return np.maximum(0.0, np.minimum(g[None, :] - b, d - g[None, :]))


def persistence_landscape(
    dgm: PersistenceDiagram, k: int = 1, n_layers: int = 1, grid=None
) -> DiagramCurve:
    """Layer j holds the j-th largest tent value at each grid point."""
    if n_layers < 1:
        raise InvalidInput("n_layers must be >= 1")
    pairs = _subdiagram(dgm, k)
    finite, subst = _finite_pairs(pairs)
    g = np.asarray(grid, dtype=float) if grid is not None else default_grid(pairs)
    tents = _tents(finite, g)
    layers = np.zeros((n_layers, len(g)))
    if tents.shape[0]:
        ordered = -np.sort(-tents, axis=0)
        m = min(n_layers, ordered.shape[0])
        layers[:m] = ordered[:m]
    return DiagramCurve(g, layers, {"dim": k, "inf_substituted": subst})


def silhouette(
    dgm: PersistenceDiagram, k: int = 1, power: float = 1.0, grid=None
) -> DiagramCurve:
    """Persistence-weighted average of tent functions, weights (d - b)^power."""
    if power < 0:
        raise InvalidInput("power must be >= 0")
    pairs = _subdiagram(dgm, k)
    finite, subst = _finite_pairs(pairs)
    g = np.asarray(grid, dtype=float) if grid is not None else default_grid(pairs)
    tents = _tents(finite, g)
    if tents.shape[0] == 0:
        vals = np.zeros(len(g))
    else:
        w = np.array([(d - b) ** power for b, d in finite])
        vals = (w @ tents) / w.sum()
    return DiagramCurve(g, vals[None, :], {"dim": k, "inf_substituted": subst})


def _image_grids(pairs, sigma, resolution, x_range=None, y_range=None):
    nx, ny = resolution
    if x_range is None or y_range is None:
        xs = [p[0] for p in pairs] or [0.0]
        ys = [p[1] for p in pairs] or [1.0]
        x_range = x_range or (min(xs) - 3 * sigma, max(xs) + 3 * sigma)
        y_range = y_range or (min(ys) - 3 * sigma, max(ys) + 3 * sigma)
    return np.linspace(*x_range, nx), np.linspace(*y_range, ny)


def _gaussian_sum(xg, yg, centers, weights, sigma):
    out = np.zeros((len(yg), len(xg)))
    norm = 1.0 / (2 * math.pi * sigma * sigma)
    for (cx, cy), w in zip(centers, weights):
        gx = np.exp(-((xg - cx) ** 2) / (2 * sigma * sigma))
        gy = np.exp(-((yg - cy) ** 2) / (2 * sigma * sigma))
        out += (w * norm) * np.outer(gy, gx)
    return out


def heat_surface(
    dgm: PersistenceDiagram,
    k: int = 1,
    sigma: float = 0.1,
    resolution=(50, 50),
    x_range=None,
    y_range=None,
) -> DiagramImage:
    """Gaussian heat surface in the (birth, death) plane, antisymmetrized by
    subtracting each pair's mirror image across the diagonal."""
    if sigma <= 0:
        raise InvalidInput("sigma must be > 0")
    pairs = _subdiagram(dgm, k)
    finite, subst = _finite_pairs(pairs)
    xg, yg = _image_grids(finite, sigma, resolution, x_range, y_range)
    centers = [(b, d) for b, d in finite] + [(d, b) for b, d in finite]
    weights = [1.0] * len(finite) + [-1.0] * len(finite)
    vals = _gaussian_sum(xg, yg, centers, weights, sigma)
    return DiagramImage(xg, yg, vals, sigma, {"dim": k, "inf_substituted": subst})


def persistence_image(
    dgm: PersistenceDiagram,
    k: int = 1,
    sigma: float = 0.1,
    resolution=(50, 50),
    x_range=None,
    y_range=None,
    weight_scale: float | None = None,
) -> DiagramImage:
    """Weighted Gaussian raster in the (birth, persistence) plane.

    Weight of a pair is its persistence over the diagram's max persistence
    (1 when the diagram has a single persistence scale of zero spread).
    Pass weight_scale to share the normalization across diagrams; additivity
    over disjoint unions only holds with a shared scale and grid.
    """
    if sigma <= 0:
        raise InvalidInput("sigma must be > 0")
    pairs = _subdiagram(dgm, k)
    finite, subst = _finite_pairs(pairs)
    bp = [(b, d - b) for b, d in finite]
    max_pers = weight_scale if weight_scale is not None else max(
        (p for _, p in bp), default=0.0
    )
    weights = [(p / max_pers if max_pers > 0 else 1.0) for _, p in bp]
    xg, yg = _image_grids(bp, sigma, resolution, x_range, y_range)
    vals = _gaussian_sum(xg, yg, bp, weights, sigma)
    return DiagramImage(xg, yg, vals, sigma, {"dim": k, "inf_substituted": subst})


def curve_features(curve: DiagramCurve) -> dict:
    """Max value, its first grid location, and trapezoid-rule area."""
    flat = curve.values
    idx = int(np.argmax(flat.max(axis=0)))
    mx = float(flat.max())
    area = float(sum(np.trapezoid(row, curve.grid) for row in flat))
    return {"max": mx, "argmax": float(curve.grid[idx]), "area": area}


def lp_curve_distance(c1: DiagramCurve, c2: DiagramCurve, p: float = 2.0) -> float:
    """L^p distance of two curves sharing a grid and layer count.

    Finite p integrates |difference|^p by the trapezoid rule; p = inf is
    the max pointwise gap.
    """
    if c1.values.shape != c2.values.shape or not np.array_equal(c1.grid, c2.grid):
        raise InvalidInput("curves must share grid and layer count")
    diff = np.abs(c1.values - c2.values)
    if math.isinf(p):
        return float(diff.max(initial=0.0))
    if p < 1:
        raise InvalidInput("p must be >= 1 or inf")
    if len(c1.grid) == 1:
        return float((diff ** p).sum() ** (1.0 / p))
    total = sum(np.trapezoid(row ** p, c1.grid) for row in diff)
    return float(total ** (1.0 / p))


# ---------------------------------------------------------------------------
# Diagram distances
# ---------------------------------------------------------------------------

def _linf(p, q) -> float:
    return max(abs(p[0] - q[0]), abs(p[1] - q[1]))


def _split_inf(pairs):
    fin = [(b, d) for b, d in pairs if math.isfinite(d)]
    inf = sorted(b for b, d in pairs if math.isinf(d))
    return fin, inf


def _bottleneck_feasible(p1, p2, eps: float) -> bool:
    """Perfect matching test in the bipartite graph of costs <= eps."""
    n, m = len(p1), len(p2)
    rows = []
    cols = []
    for i, a in enumerate(p1):
        for j, b in enumerate(p2):
            if _linf(a, b) <= eps:
                rows.append(i)
                cols.append(j)
        if (a[1] - a[0]) / 2.0 <= eps:  # own diagonal slot
            rows.append(i)
            cols.append(m + i)
    for j, b in enumerate(p2):
        if (b[1] - b[0]) / 2.0 <= eps:
            rows.append(n + j)
            cols.append(j)
    for j in range(m):  # diagonal-to-diagonal is free
        for i in range(n):
            rows.append(n + j)
            cols.append(m + i)
    size = n + m
    if size == 0:
        return True
    graph = scipy.sparse.csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(size, size)
    )
    match = maximum_bipartite_matching(graph, perm_type="column")
    return int((match >= 0).sum()) == size


def bottleneck_distance(d1: PersistenceDiagram, d2: PersistenceDiagram, k: int = 1) -> float:
    """Bottleneck distance between the dimension-k sub-diagrams.

    Binary search over the finite candidate set of point-point and
    point-diagonal L-infinity costs; infinite-death points must match
    infinite-death points (else the distance is infinite).
    """
    f1, i1 = _split_inf(_subdiagram(d1, k))
    f2, i2 = _split_inf(_subdiagram(d2, k))
    if len(i1) != len(i2):
        return INF
    ess = max((abs(a - b) for a, b in zip(i1, i2)), default=0.0)
    cands = {0.0, ess}
    for a in f1:
        cands.add((a[1] - a[0]) / 2.0)
        for b in f2:
            cands.add(_linf(a, b))
    for b in f2:
        cands.add((b[1] - b[0]) / 2.0)
    ordered = sorted(c for c in cands if c >= ess)
    lo, hi = 0, len(ordered) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _bottleneck_feasible(f1, f2, ordered[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(ordered[lo])


def wasserstein_distance(
    d1: PersistenceDiagram, d2: PersistenceDiagram, k: int = 1, q: float = 1.0
) -> float:
    """q-Wasserstein distance with diagonal augmentation (L-infinity ground
    metric), solved as an exact min-cost assignment."""
    if q < 1:
        raise InvalidInput("q must be >= 1")
    f1, i1 = _split_inf(_subdiagram(d1, k))
    f2, i2 = _split_inf(_subdiagram(d2, k))
    if i1 != i2:
        return INF
    n, m = len(f1), len(f2)
    if n + m == 0:
        return 0.0
    cost = np.zeros((n + m, m + n))
    for i, a in enumerate(f1):
        for j, b in enumerate(f2):
            cost[i, j] = _linf(a, b) ** q
        cost[i, m:] = ((a[1] - a[0]) / 2.0) ** q
    for j, b in enumerate(f2):
        cost[n:, j] = ((b[1] - b[0]) / 2.0) ** q
    row, col = linear_sum_assignment(cost)
    return float(cost[row, col].sum() ** (1.0 / q))


# ---------------------------------------------------------------------------
# Scalar features
# ---------------------------------------------------------------------------

def persistence_entropy(dgm: PersistenceDiagram, k: int = 1) -> float:
    """Base-2 Shannon entropy of normalized finite lifetimes."""
    lifetimes = [d - b for b, d in _subdiagram(dgm, k) if math.isfinite(d)]
    if not lifetimes:
        return 0.0
    p = np.asarray(lifetimes) / sum(lifetimes)
    return float(-(p * np.log2(p)).sum())


def count_points(dgm: PersistenceDiagram, k: int = 1) -> int:
    return len(_subdiagram(dgm, k))


_EMPTY = PersistenceDiagram(())


def amplitude(dgm: PersistenceDiagram, k: int = 1, metric: str = "bottleneck", **params) -> float:
    """Distance of the dimension-k sub-diagram to the empty diagram.

    Representation metrics take the L^p norm of the representation over its
    default grid.
    """
    if metric == "bottleneck":
        return bottleneck_distance(dgm, _EMPTY, k)
    if metric == "wasserstein":
        return wasserstein_distance(dgm, _EMPTY, k, q=params.get("q", 1.0))
    p = params.get("p", 2.0)
    if metric == "landscape":
        c = persistence_landscape(dgm, k, n_layers=params.get("n_layers", 1))
        return lp_curve_distance(c, DiagramCurve(c.grid, np.zeros_like(c.values)), p)
    if metric == "betti":
        c = betti_curve(dgm, k)
        return lp_curve_distance(c, DiagramCurve(c.grid, np.zeros_like(c.values)), p)
    if metric == "heat":
        img = heat_surface(dgm, k, sigma=params.get("sigma", 0.1))
        if img.values.size == 0:
            return 0.0
        dx = (img.x_grid[-1] - img.x_grid[0]) / max(len(img.x_grid) - 1, 1)
        dy = (img.y_grid[-1] - img.y_grid[0]) / max(len(img.y_grid) - 1, 1)
        if math.isinf(p):
            return float(np.abs(img.values).max())
        return float((np.abs(img.values) ** p).sum() * dx * dy) ** (1.0 / p)
    raise InvalidInput(f"unknown amplitude metric {metric!r}")


def complex_polynomial(dgm: PersistenceDiagram, k: int = 1, n_coefficients: int = 1) -> np.ndarray:
    """Leading coefficients (after the monic 1) of prod(x - (b + i d))."""
    if n_coefficients < 1:
        raise InvalidInput("n_coefficients must be >= 1")
    pairs = _subdiagram(dgm, k)
    finite, _ = _finite_pairs(pairs)
    roots = np.array([complex(b, d) for b, d in finite])
    coeffs = np.polynomial.polynomial.polyfromroots(roots)[::-1] if len(roots) else np.array([1.0 + 0j])
    tail = coeffs[1:1 + n_coefficients]
    out = np.zeros(n_coefficients, dtype=complex)
    out[: len(tail)] = tail
    return out


# ---------------------------------------------------------------------------
# Plotting
# ---------------------------------------------------------------------------

def diagram_to_svg(dgm: PersistenceDiagram, size: int = 400, margin: int = 40) -> str:
    """Scatter plot of a diagram as an SVG document (birth on x, death on y,
    diagonal drawn; essential classes drawn at the top edge)."""
    pairs = dgm.pairs
    finite_vals = [v for _, b, d in pairs for v in (b, d) if math.isfinite(v)]
    lo = min(finite_vals, default=0.0)
    hi = max(finite_vals, default=1.0)
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    lo -= 0.05 * span
    hi += 0.05 * span

    def sx(v):
        return margin + (v - lo) / (hi - lo) * (size - 2 * margin)

    def sy(v):
        return size - margin - (v - lo) / (hi - lo) * (size - 2 * margin)

    palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<line x1="{sx(lo):.2f}" y1="{sy(lo):.2f}" x2="{sx(hi):.2f}" y2="{sy(hi):.2f}" '
        'stroke="#999" stroke-dasharray="4 3"/>',
    ]
    for dim, b, d in pairs:
        color = palette[dim % len(palette)]
        y = sy(hi) if math.isinf(d) else sy(d)
        marker = ' stroke="black"' if math.isinf(d) else ""
        parts.append(
            f'<circle cx="{sx(b):.2f}" cy="{y:.2f}" r="4" fill="{color}"{marker}>'
            f"<title>dim {dim}: ({b:g}, {'inf' if math.isinf(d) else format(d, 'g')})</title></circle>"
        )
    parts.append("</svg>")
    return "\n".join(parts)
