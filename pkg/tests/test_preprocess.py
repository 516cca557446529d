import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toposcope.core import DegenerateChannel, GrayImage, InvalidInput, WeightedGraph
from toposcope.preprocess import (
    binarize_image,
    graph_geodesic,
    height_filtration,
    image_to_point_cloud,
    pearson_dissimilarity,
    sliding_window,
    takens_embedding,
    transition_graph,
)


class TestSlidingWindow:
    def test_stride_one(self):
        wb = sliding_window([1, 2, 3, 4, 5], 3, 1)
        assert [list(w) for w in wb.windows] == [[1, 2, 3], [2, 3, 4], [3, 4, 5]]

    def test_stride_three(self):
        wb = sliding_window([1, 2, 3, 4, 5], 2, 3)
        assert [list(w) for w in wb.windows] == [[1, 2], [4, 5]]

    def test_single_window(self):
        wb = sliding_window([1, 2], 2, 1)
        assert [list(w) for w in wb.windows] == [[1, 2]]

    def test_size_too_large(self):
        with pytest.raises(InvalidInput):
            sliding_window([1, 2], 3, 1)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=40),
        st.integers(1, 10),
    )
    def test_reconstruction_with_stride_equal_size(self, ts, size):
        if size > len(ts):
            size = len(ts)
        wb = sliding_window(ts, size, size)
        flat = [x for w in wb.windows for x in w]
        assert flat == ts[: len(flat)]


class TestTakens:
    def test_dim2(self):
        pc = takens_embedding([0, 1, 2, 3, 4], 2, 1, 1)
        assert pc.points.tolist() == [[0, 1], [1, 2], [2, 3], [3, 4]]

    def test_dim3_delay2(self):
        pc = takens_embedding([0, 1, 2, 3, 4], 3, 2, 1)
        assert pc.points.tolist() == [[0, 2, 4]]

    def test_identity(self):
        pc = takens_embedding([5, 6, 7], 1, 1, 1)
        assert pc.points.tolist() == [[5], [6], [7]]

    def test_too_short(self):
        with pytest.raises(InvalidInput):
            takens_embedding([1, 2], 3, 2)

    @settings(max_examples=60, deadline=None)
    @given(
        st.integers(1, 40), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4)
    )
    def test_point_count_formula(self, length, dim, delay, stride):
        ts = list(range(length))
        span = (dim - 1) * delay
        if length < span + 1:
            with pytest.raises(InvalidInput):
                takens_embedding(ts, dim, delay, stride)
            return
        pc = takens_embedding(ts, dim, delay, stride)
        assert pc.n == (length - span - 1) // stride + 1


class TestPearson:
    def test_identical_channels(self):
        w = np.column_stack([[1, 2, 3], [1, 2, 3]])
        assert pearson_dissimilarity(w).entries[0, 1] == pytest.approx(0.0, abs=1e-12)

    def test_negated_channel(self):
        w = np.column_stack([[1, 2, 3], [-1, -2, -3]])
        assert pearson_dissimilarity(w).entries[0, 1] == pytest.approx(2.0, abs=1e-12)

    def test_against_direct_formula(self):
        a, b = np.array([1.0, 2.0, 3.0]), np.array([1.0, 2.0, 4.0])
        # independent evaluation of the Pearson formula
        r = ((a - a.mean()) * (b - b.mean())).sum() / (
            math.sqrt(((a - a.mean()) ** 2).sum()) * math.sqrt(((b - b.mean()) ** 2).sum())
        )
        got = pearson_dissimilarity(np.column_stack([a, b])).entries[0, 1]
        assert got == pytest.approx(1 - r, abs=1e-12)

    def test_zero_variance(self):
        with pytest.raises(DegenerateChannel):
            pearson_dissimilarity(np.column_stack([[1, 1, 1], [1, 2, 3]]))

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(
            st.tuples(*[st.floats(-5, 5, allow_nan=False)] * 3),
            min_size=3,
            max_size=15,
        )
    )
    def test_valid_distance_matrix_in_range(self, rows):
        w = np.asarray(rows)
        if any(w[:, c].std() == 0 for c in range(3)):
            return
        d = pearson_dissimilarity(w).entries
        assert np.allclose(d, d.T)
        assert np.all(np.diag(d) == 0)
        assert np.all((d >= 0) & (d <= 2))


class TestTransitionGraph:
    def test_two_states(self):
        g = transition_graph([0, 5, 0, 5], 2)
        assert g.n == 2
        weights = {(u, v): w for u, v, w in g.edges}
        assert weights == {(0, 1): 2.0, (1, 0): 1.0}

    def test_constant_series(self):
        g = transition_graph([1, 1, 1], 4)
        assert g.n == 1 and g.edges == ()

    def test_three_states_path(self):
        g = transition_graph([0, 1, 2, 1, 0], 3)
        weights = {(u, v): w for u, v, w in g.edges}
        assert weights == {(0, 1): 1.0, (1, 2): 1.0, (2, 1): 1.0, (1, 0): 1.0}


class TestImages:
    def test_binarize(self):
        out = binarize_image(GrayImage([[0.2, 0.7]]), 0.5)
        assert out.pixels.tolist() == [[0, 1]]

    def test_binarize_all_ones(self):
        assert binarize_image(GrayImage([[0.2, 0.7]]), 0.1).pixels.tolist() == [[1, 1]]

    def test_binarize_all_zeros(self):
        assert binarize_image(GrayImage([[0.2, 0.7]]), 0.9).pixels.tolist() == [[0, 0]]

    def test_height_columns(self):
        out = height_filtration(GrayImage([[1, 1]]), (0, 1))
        assert out.pixels.tolist() == [[0, 1]]

    def test_height_inactive_fill(self):
        out = height_filtration(GrayImage([[1, 0]]), (0, 1))
        assert out.pixels.tolist() == [[0, 1]]

    def test_height_rows(self):
        out = height_filtration(GrayImage([[1], [1]]), (1, 0))
        assert out.pixels.tolist() == [[0], [1]]

    def test_height_all_inactive(self):
        with pytest.raises(InvalidInput):
            height_filtration(GrayImage([[0, 0]]), (0, 1))

    def test_height_non_unit_direction(self):
        with pytest.raises(InvalidInput):
            height_filtration(GrayImage([[1]]), (1, 1))

    def test_height_border_padding_invariance(self):
        img = np.array([[1, 0, 1], [0, 1, 0]], dtype=float)
        base = height_filtration(GrayImage(img), (0, 1)).pixels
        padded = np.zeros((4, 5))
        padded[1:3, 1:4] = img
        out = height_filtration(GrayImage(padded), (0, 1)).pixels
        active = img == 1
        # active-pixel values are shift-invariant under inactive padding
        assert np.allclose(out[1:3, 1:4][active], base[active])

    def test_image_to_point_cloud(self):
        pc = image_to_point_cloud(GrayImage([[1, 0], [0, 1]]))
        assert pc.points.tolist() == [[0, 0], [1, 1]]

    def test_image_to_point_cloud_all_ones(self):
        assert image_to_point_cloud(GrayImage([[1, 1], [1, 1]])).n == 4

    def test_image_to_point_cloud_single(self):
        assert image_to_point_cloud(GrayImage([[0, 1]])).points.tolist() == [[0, 1]]

    def test_image_to_point_cloud_empty(self):
        with pytest.raises(InvalidInput):
            image_to_point_cloud(GrayImage([[0, 0]]))


class TestGeodesic:
    def test_path(self):
        g = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0)))
        assert graph_geodesic(g).entries[0, 2] == 2

    def test_unreachable_cap(self):
        g = WeightedGraph(2, ())
        assert graph_geodesic(g).entries[0, 1] == 1.0  # cap = 0 + 1

    def test_triangle_shortcut(self):
        g = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)))
        assert graph_geodesic(g).entries[0, 2] == 2

    def test_directed_symmetrized_min(self):
        g = WeightedGraph(2, ((0, 1, 3.0), (1, 0, 1.0)), directed=True)
        assert graph_geodesic(g).entries[0, 1] == 1.0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 7), st.data())
    def test_triangle_inequality(self, n, data):
        edges = []
        for i in range(n):
            for j in range(i + 1, n):
                if data.draw(st.booleans()):
                    edges.append((i, j, data.draw(st.floats(0, 10, allow_nan=False))))
        d = graph_geodesic(WeightedGraph(n, tuple(edges))).entries
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    assert d[i, j] <= d[i, k] + d[k, j] + 1e-9
