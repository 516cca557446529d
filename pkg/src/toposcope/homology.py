"""Vietoris-Rips and 2-D cubical filtrations, and persistence by Z/2
boundary-matrix reduction with the clearing (twist) optimization.

The reduction core works on generic filtered cell complexes (dimension,
filtration value, boundary index set), which lets simplicial and cubical
inputs share one implementation.
"""
from __future__ import annotations

import numpy as np

from .core import (
    INF,
    DistanceMatrix,
    FilteredComplex,
    GrayImage,
    InvalidFiltration,
    PersistenceDiagram,
    PointCloud,
    pairwise_distances,
)


def build_vr_filtration(dm: DistanceMatrix, max_dim: int, max_edge: float) -> FilteredComplex:
    """All simplices on <= max_dim + 1 vertices with diameter <= max_edge.

    Vertices enter at 0; a simplex enters at the maximum pairwise distance
    of its vertices. Order: (value, dimension, lexicographic vertices).
    """
    if max_dim < 0:
        raise ValueError("max_dim must be >= 0")
    if max_edge <= 0:
        raise ValueError("max_edge must be > 0")
    d = dm.entries
    n = dm.n
    simplices = [((i,), 0.0) for i in range(n)]
    if max_dim >= 1:
        # lower neighbors drive the incremental expansion: a k-simplex is
        # extended by any vertex adjacent to all of its vertices
        prev = []
        for i in range(n):
            for j in range(i + 1, n):
                if d[i, j] <= max_edge:
                    prev.append(((i, j), d[i, j]))
        simplices.extend(prev)
        for _ in range(2, max_dim + 1):
            nxt = []
            for verts, val in prev:
                last = verts[-1]
                if last + 1 >= n:
                    continue
                mx = d[np.array(verts)][:, last + 1:].max(axis=0)
                for off in np.flatnonzero(mx <= max_edge):
                    nxt.append((verts + (last + 1 + int(off),), max(val, float(mx[off]))))
            simplices.extend(nxt)
            prev = nxt
            if not prev:
                break
    simplices.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
    return FilteredComplex(tuple(simplices))


def _reduce_cells(dims, values, boundaries) -> PersistenceDiagram:
    """Persistence pairing of a generic filtered cell complex.

    Columns are processed per dimension, highest first; the pivot row of
    each reduced column is cleared from the next (lower) dimension's pass.
    """
    n = len(dims)
    if n == 0:
        return PersistenceDiagram(())
    max_d = max(dims)
    by_dim: dict[int, list] = {d: [] for d in range(max_d + 1)}
    for j, d in enumerate(dims):
        by_dim[d].append(j)
    paired_row_of: dict[int, int] = {}
    cleared: set[int] = set()
    zeroed: set[int] = set()
    for d in range(max_d, 0, -1):
        # rows of this pass are the dimension d-1 cells; compress them to a
        # dense local index so columns pack into Python ints (C-speed XOR,
        # pivot = highest set bit)
        rows = by_dim[d - 1]
        local = {r: i for i, r in enumerate(rows)}
        columns: dict[int, int] = {}
        pivots: dict[int, int] = {}
        for j in by_dim[d]:
            if j in cleared:
                continue
            col = 0
            for r in boundaries[j]:
                col ^= 1 << local[r]
            while col:
                low = col.bit_length() - 1
                k = pivots.get(low)
                if k is None:
                    break
                col ^= columns[k]
            if col:
                low = col.bit_length() - 1
                columns[j] = col
                pivots[low] = j
                row = rows[low]
                paired_row_of[row] = j
                cleared.add(row)
            else:
                zeroed.add(j)
    pairs = []
    for i in range(n):
        j = paired_row_of.get(i)
        if j is not None:
            pairs.append((dims[i], values[i], values[j]))
        elif dims[i] == 0 or i in zeroed:
            # column reduced to zero and never used as a pivot row: essential
            pairs.append((dims[i], values[i], INF))
    return PersistenceDiagram(tuple(pairs))


def reduce_filtration(fc: FilteredComplex) -> PersistenceDiagram:
    """Persistence diagram of a simplicial filtration (clearing reduction)."""
    index_of = {verts: i for i, (verts, _) in enumerate(fc.simplices)}
    dims, values, boundaries = [], [], []
    for verts, val in fc.simplices:
        dims.append(len(verts) - 1)
        values.append(val)
        if len(verts) == 1:
            boundaries.append(())
        else:
            try:
                boundaries.append(
                    tuple(
                        index_of[verts[:i] + verts[i + 1:]]
                        for i in range(len(verts))
                    )
                )
            except KeyError as exc:
                raise InvalidFiltration(f"missing face {exc} of {verts}") from None
    return _reduce_cells(dims, values, boundaries)


def _flag_edges(d: np.ndarray, max_edge: float):
    """Edges (i, j, value) of the flag filtration, sorted by (value, i, j)."""
    n = len(d)
    iu, ju = np.triu_indices(n, 1)
    vals = d[iu, ju]
    keep = vals <= max_edge
    ei, ej, ev = iu[keep], ju[keep], vals[keep]
    order = np.lexsort((ej, ei, ev))
    return ei[order], ej[order], ev[order]


def _flag_triangles(d: np.ndarray, adj: np.ndarray):
    """Triangles (i < j < k, all edges present) sorted by (value, lex)."""
    n = len(d)
    ei, ej = np.nonzero(np.triu(adj, 1))
    # common neighbors k > j of each edge (i, j) via packed-bit row ANDs
    bits = np.packbits(adj, axis=1)
    above = np.packbits(np.triu(np.ones((n, n), dtype=bool), 1), axis=1)
    common = bits[ei] & bits[ej] & above[ej]
    flat = np.unpackbits(common, axis=1, count=n)
    erow, kk = np.nonzero(flat)
    ii, jj = ei[erow], ej[erow]
    if not len(ii):
        return np.empty((0, 3), dtype=np.int64), np.empty(0)
    vals = np.maximum(d[ii, jj], np.maximum(d[ii, kk], d[jj, kk]))
    # stable sort by value; ties keep the deterministic enumeration order
    order = np.argsort(vals, kind="stable")
    return np.column_stack((ii, jj, kk))[order], vals[order]


def _flag_expand(d: np.ndarray, adj: np.ndarray, verts: np.ndarray, vals: np.ndarray):
    """Cofacet simplices one dimension up, sorted by (value, lex).

    Each simplex is extended by every vertex larger than its last vertex
    that is adjacent to all of its vertices, so each cofacet appears once.
    """
    n = len(d)
    parts_v, parts_s = [], []
    for row, val in zip(verts, vals):
        last = row[-1]
        if last + 1 >= n:
            continue
        ok = np.flatnonzero(adj[row, last + 1:].all(axis=0)) + last + 1
        if len(ok):
            ext = np.maximum(val, d[np.ix_(row, ok)].max(axis=0))
            parts_s.append(np.column_stack(
                (np.broadcast_to(row, (len(ok), len(row))), ok)))
            parts_v.append(ext)
    width = verts.shape[1] + 1
    if not parts_v:
        return np.empty((0, width), dtype=np.int64), np.empty(0)
    nv = np.concatenate(parts_s)
    nvals = np.concatenate(parts_v)
    order = np.lexsort(tuple(nv[:, c] for c in range(width - 1, -1, -1)) + (nvals,))
    return nv[order], nvals[order]


def _coboundary_pass(col_vals, cof_facets, cof_vals, negative):
    """One-dimension persistence pass on the coboundary matrix.

    Columns are the dimension-d simplices (by rank in filtration order),
    rows their cofacets. This is the reduction of the anti-transposed
    boundary matrix, so pairs equal those of the standard left-to-right
    homology reduction. Two exact shortcuts keep it fast: clearing
    (simplices marked negative by the previous pass are skipped) and
    apparent pairs (if the oldest cofacet of s has s as its youngest
    facet, the two are a persistence pair with no reduction work).

    Returns (pairs, essential_columns, negative_cofacets) where pairs are
    (column_rank, cofacet_rank).
    """
    ne = len(col_vals)
    nt, width = cof_facets.shape
    pairs = []
    essential = []
    if nt == 0:
        for e in range(ne):
            if not negative[e]:
                essential.append(e)
        return pairs, essential, np.zeros(0, dtype=bool)
    # group cofacet ranks by facet column via one combined sort key
    facet = cof_facets.T.reshape(-1)
    tri = np.tile(np.arange(nt), width)
    key = np.sort(facet * nt + tri)
    tri_sorted = key % nt  # cofacet ranks, ascending within each facet group
    starts = np.searchsorted(key, np.arange(ne + 1, dtype=np.int64) * nt)
    has_cof = starts[:-1] < starts[1:]
    oldest = np.where(
        has_cof, tri_sorted[np.minimum(starts[:-1], nt * width - 1)], -1)
    youngest_facet = cof_facets.max(axis=1)
    apparent = has_cof & ~negative & (youngest_facet[oldest] == np.arange(ne))
    app_idx = np.flatnonzero(apparent)
    for e in app_idx:
        pairs.append((int(e), int(oldest[e])))
    skip = apparent | negative

    # the reduction only ever sees rows reachable from the columns it
    # actually processes: cofacets of non-skipped simplices, plus -
    # whenever such a row is the pivot of an apparent pair - the cofacets
    # of that pair's simplex, transitively. Restricting the packed
    # columns to those rows keeps the integers narrow.
    owner_of_row = np.full(nt, -1, dtype=np.int64)
    owner_of_row[oldest[app_idx]] = app_idx
    needed = np.zeros(nt, dtype=bool)
    owner_seen = np.zeros(ne, dtype=bool)
    frontier = np.flatnonzero(~skip)
    while len(frontier):
        segs = [tri_sorted[starts[e]:starts[e + 1]] for e in frontier]
        rows = np.concatenate(segs) if segs else np.empty(0, dtype=np.int64)
        rows = rows[~needed[rows]]
        needed[rows] = True
        owners = owner_of_row[rows]
        owners = np.unique(owners[owners >= 0])
        owners = owners[~owner_seen[owners]]
        owner_seen[owners] = True
        frontier = owners
    rows_sorted = np.flatnonzero(needed)
    compact = np.full(nt, -1, dtype=np.int64)
    compact[rows_sorted] = np.arange(len(rows_sorted))
    topc = len(rows_sorted) - 1  # packed oldest-cofacet-highest

    starts_list = starts.tolist()

    def raw_column(e: int) -> int:
        rows = compact[tri_sorted[starts_list[e]:starts_list[e + 1]]].tolist()
        buf = bytearray(((topc - min(rows)) >> 3) + 1)
        for r in rows:
            rev = topc - r
            buf[rev >> 3] |= 1 << (rev & 7)
        return int.from_bytes(buf, "little")

    columns: dict[int, int] = {}
    apparent_owner = {
        topc - int(compact[oldest[e]]): int(e)
        for e in app_idx if compact[oldest[e]] >= 0
    }
    for e in range(ne - 1, -1, -1):
        if skip[e]:
            continue
        col = raw_column(e)
        while col:
            low = col.bit_length() - 1
            stored = columns.get(low)
            if stored is None:
                owner = apparent_owner.get(low)
                if owner is None:
                    break
                stored = columns[low] = raw_column(owner)
            col ^= stored
        if col:
            low = col.bit_length() - 1
            columns[low] = col
            pairs.append((e, int(rows_sorted[topc - low])))
        else:
            essential.append(e)
    negative_cof = np.zeros(nt, dtype=bool)
    for _, t in pairs:
        negative_cof[t] = True
    return pairs, essential, negative_cof


def _vr_flag_pairs(d: np.ndarray, max_dim: int, max_edge: float):
    """(dim, birth, death) triples of Vietoris-Rips persistence.

    Equivalent to reducing the full flag filtration but computed one
    dimension at a time on the coboundary matrix; see _coboundary_pass.
    """
    n = len(d)
    triples = []
    ei, ej, ev = _flag_edges(d, max_edge)
    # dimension 0 by union-find over edges in filtration order
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    negative = np.zeros(len(ev), dtype=bool)
    for e in range(len(ev)):
        ra, rb = find(int(ei[e])), find(int(ej[e]))
        if ra != rb:
            parent[ra] = rb
            negative[e] = True
            triples.append((0, 0.0, float(ev[e])))
    for _ in range(n - int(negative.sum())):
        triples.append((0, 0.0, INF))
    if max_dim == 0:
        return triples

    adj = d <= max_edge
    np.fill_diagonal(adj, False)
    verts = np.column_stack((ei, ej))
    vals = ev
    for dim in range(1, max_dim + 1):
        if len(vals) == 0:
            break
        if dim == 1:
            cof_verts, cof_vals = _flag_triangles(d, adj)
        else:
            cof_verts, cof_vals = _flag_expand(d, adj, verts, vals)
        # rank of each facet of each cofacet within the dimension-dim order
        if dim == 1:
            erank = np.full((n, n), -1, dtype=np.int64)
            erank[verts[:, 0], verts[:, 1]] = np.arange(len(vals))
            ti, tj, tk = cof_verts[:, 0], cof_verts[:, 1], cof_verts[:, 2]
            cof_facets = np.column_stack(
                (erank[ti, tj], erank[ti, tk], erank[tj, tk]))
        else:
            rank_of = {tuple(row): r for r, row in enumerate(verts.tolist())}
            cof_rows = cof_verts.tolist()
            cols = cof_verts.shape[1]
            cof_facets = np.empty((len(cof_rows), cols), dtype=np.int64)
            for idx, row in enumerate(cof_rows):
                for c in range(cols):
                    cof_facets[idx, c] = rank_of[tuple(row[:c] + row[c + 1:])]
        pairs, essential, negative = _coboundary_pass(
            vals, cof_facets, cof_vals, negative)
        for e, t in pairs:
            triples.append((dim, float(vals[e]), float(cof_vals[t])))
        for e in essential:
            triples.append((dim, float(vals[e]), INF))
        verts, vals = cof_verts, cof_vals
    return triples


def vr_persistence(
    data,
    metric: str = "euclidean",
    max_dim: int = 1,
    max_edge: float | None = None,
) -> PersistenceDiagram:
    """Vietoris-Rips persistence of a point cloud or distance matrix.

    max_dim is the maximum homology dimension; simplices up to dimension
    max_dim + 1 enter the filtration so that H_max_dim deaths are
    detected. Default max_edge is the largest distance.
    """
    dm = pairwise_distances(data, metric) if isinstance(data, PointCloud) else data
    if not isinstance(dm, DistanceMatrix):
        raise TypeError("expected a PointCloud or DistanceMatrix")
    if max_edge is None:
        max_edge = float(dm.entries.max())
    if max_edge <= 0:
        # degenerate input (single point / all-zero distances): only vertices
        return _reduce_cells([0] * dm.n, [0.0] * dm.n, [()] * dm.n)
    return PersistenceDiagram(tuple(_vr_flag_pairs(dm.entries, max_dim, max_edge)))


def _cubical_cells(img: GrayImage):
    """Cells of the 2-D cubical complex whose top cells are the pixels.

    Vertices live on the (H+1) x (W+1) corner grid; every lower cell takes
    the minimum value over its incident pixels.
    """
    px = img.pixels
    h, w = px.shape

    def pixel_min(r0, r1, c0, c1):
        r0, r1 = max(r0, 0), min(r1, h - 1)
        c0, c1 = max(c0, 0), min(c1, w - 1)
        return float(px[r0:r1 + 1, c0:c1 + 1].min())

    cells = []  # (dim, value, kind-key); key identifies the cell for boundaries
    for r in range(h + 1):
        for c in range(w + 1):
            cells.append((0, pixel_min(r - 1, r, c - 1, c), ("v", r, c)))
    for r in range(h + 1):  # horizontal edges between (r,c) and (r,c+1)
        for c in range(w):
            cells.append((1, pixel_min(r - 1, r, c, c), ("h", r, c)))
    for r in range(h):  # vertical edges between (r,c) and (r+1,c)
        for c in range(w + 1):
            cells.append((1, pixel_min(r, r, c - 1, c), ("e", r, c)))
    for r in range(h):
        for c in range(w):
            cells.append((2, float(px[r, c]), ("s", r, c)))
    cells.sort(key=lambda t: (t[1], t[0], t[2]))
    index = {key: i for i, (_, _, key) in enumerate(cells)}
    dims, values, boundaries = [], [], []
    for dim, val, key in cells:
        dims.append(dim)
        values.append(val)
        kind, r, c = key
        if kind == "v":
            boundaries.append(())
        elif kind == "h":
            boundaries.append((index[("v", r, c)], index[("v", r, c + 1)]))
        elif kind == "e":
            boundaries.append((index[("v", r, c)], index[("v", r + 1, c)]))
        else:
            boundaries.append((
                index[("h", r, c)],
                index[("h", r + 1, c)],
                index[("e", r, c)],
                index[("e", r, c + 1)],
            ))
    return dims, values, boundaries


def cubical_persistence(img: GrayImage, max_dim: int = 1) -> PersistenceDiagram:
    """Sublevel-set persistence of a grayscale image (H0 and H1)."""
    dims, values, boundaries = _cubical_cells(img)
    dgm = _reduce_cells(dims, values, boundaries)
    return PersistenceDiagram(tuple(p for p in dgm.pairs if p[0] <= max_dim))
