import math

import numpy as np
import pytest

from toposcope.core import PersistenceDiagram
from toposcope.diagram import (
    DiagramCurve,
    amplitude,
    betti_curve,
    bottleneck_distance,
    complex_polynomial,
    count_points,
    curve_features,
    diagram_to_svg,
    heat_surface,
    lp_curve_distance,
    persistence_entropy,
    persistence_image,
    persistence_landscape,
    silhouette,
    wasserstein_distance,
)

from .oracles import brute_bottleneck, brute_wasserstein, random_diagram


def dgm(*pairs, k=1):
    return PersistenceDiagram(tuple((k, b, d) for b, d in pairs))


EMPTY = PersistenceDiagram(())


class TestBettiCurve:
    def test_overlap_count(self):
        c = betti_curve(dgm((0, 2), (1, 3)), grid=[1.5])
        assert c.values[0, 0] == 2

    def test_empty_is_zero(self):
        c = betti_curve(EMPTY, grid=np.linspace(0, 1, 5))
        assert np.all(c.values == 0)

    def test_half_open_at_death(self):
        c = betti_curve(dgm((0, 2)), grid=[0.0, 2.0])
        assert c.values[0].tolist() == [1, 0]

    def test_recount_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            d = PersistenceDiagram(random_diagram(rng, 6))
            grid = np.linspace(-1, 5, 37)
            c = betti_curve(d, grid=grid)
            for t, v in zip(grid, c.values[0]):
                assert v == sum(1 for _, b, dd in d.pairs if b <= t < dd)

    def test_integer_nonnegative(self):
        rng = np.random.default_rng(1)
        d = PersistenceDiagram(random_diagram(rng, 6))
        c = betti_curve(d)
        assert np.all(c.values >= 0)
        assert np.all(c.values == np.round(c.values))


class TestLandscape:
    def test_tent_values(self):
        c = persistence_landscape(dgm((0, 2)), grid=[0.5, 1.0])
        assert c.values[0].tolist() == [0.5, 1.0]

    def test_second_layer_zero(self):
        c = persistence_landscape(dgm((0, 2)), n_layers=2, grid=[1.0])
        assert c.values[1, 0] == 0

    def test_duplicate_pair_second_layer(self):
        c = persistence_landscape(dgm((0, 2), (0, 2)), n_layers=2, grid=[1.0])
        assert c.values[1, 0] == 1.0

    def test_layers_ordered_and_lipschitz(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            d = PersistenceDiagram(random_diagram(rng, 6))
            c = persistence_landscape(d, n_layers=3)
            assert np.all(np.diff(c.values, axis=0) <= 1e-12)
            h = c.grid[1] - c.grid[0]
            assert np.all(np.abs(np.diff(c.values, axis=1)) <= h + 1e-12)


class TestSilhouette:
    def test_single_pair(self):
        for p in (0.0, 1.0, 2.0):
            c = silhouette(dgm((0, 2)), power=p, grid=[1.0])
            assert c.values[0, 0] == pytest.approx(1.0)

    def test_identical_tents(self):
        c = silhouette(dgm((0, 2), (0, 2)), power=1.0, grid=[1.0])
        assert c.values[0, 0] == pytest.approx(1.0)

    def test_weighted_formula_oracle(self):
        # independent evaluation: tents of (0,4) and (0,2) at t=1 are both 1
        c = silhouette(dgm((0, 4), (0, 2)), power=1.0, grid=[1.0])
        assert c.values[0, 0] == pytest.approx((4 * 1 + 2 * 1) / (4 + 2))

    def test_empty(self):
        c = silhouette(EMPTY, grid=[0.5])
        assert c.values[0, 0] == 0


class TestImages:
    def test_heat_antisymmetric_at_mirror(self):
        d = dgm((0.2, 1.4))
        img = heat_surface(d, sigma=0.2, resolution=(40, 40),
                           x_range=(-1, 2), y_range=(-1, 2))
        xs, ys = img.x_grid, img.y_grid
        ix = int(np.argmin(np.abs(xs - 0.2)))
        iy = int(np.argmin(np.abs(ys - 1.4)))
        jx = int(np.argmin(np.abs(xs - 1.4)))
        jy = int(np.argmin(np.abs(ys - 0.2)))
        assert img.values[iy, ix] == pytest.approx(-img.values[jy, jx], abs=1e-9)

    def test_heat_empty(self):
        img = heat_surface(EMPTY, sigma=0.1)
        assert np.all(img.values == 0)

    def test_heat_positive_at_pair(self):
        d = dgm((0.0, 2.0))
        img = heat_surface(d, sigma=0.2, resolution=(41, 41),
                           x_range=(-1, 3), y_range=(-1, 3))
        ix = int(np.argmin(np.abs(img.x_grid - 0.0)))
        iy = int(np.argmin(np.abs(img.y_grid - 2.0)))
        assert img.values[iy, ix] > 0

    def test_persistence_image_argmax(self):
        d = dgm((0.0, 2.0))
        img = persistence_image(d, sigma=0.3, resolution=(30, 30))
        iy, ix = np.unravel_index(np.argmax(img.values), img.values.shape)
        # argmax cell contains (birth=0, persistence=2)
        assert abs(img.x_grid[ix] - 0.0) <= (img.x_grid[1] - img.x_grid[0])
        assert abs(img.y_grid[iy] - 2.0) <= (img.y_grid[1] - img.y_grid[0])

    def test_persistence_image_empty(self):
        img = persistence_image(EMPTY, sigma=0.1)
        assert np.all(img.values == 0)

    def test_persistence_image_duplicate_doubles(self):
        one = persistence_image(dgm((0, 2)), sigma=0.3, resolution=(20, 20),
                                x_range=(-1, 1), y_range=(1, 3))
        two = persistence_image(dgm((0, 2), (0, 2)), sigma=0.3, resolution=(20, 20),
                                x_range=(-1, 1), y_range=(1, 3))
        assert np.allclose(two.values, 2 * one.values, atol=1e-12)

    def test_additivity_over_disjoint_union(self):
        # additivity needs a shared grid; persistence_image also needs a
        # shared weight normalization
        rng = np.random.default_rng(4)
        shared = dict(sigma=0.2, resolution=(25, 25), x_range=(-1, 5), y_range=(-1, 5))
        for maker, extra in (
            (persistence_image, {"weight_scale": 2.0}),
            (heat_surface, {}),
        ):
            d1 = PersistenceDiagram(random_diagram(rng, 4))
            d2 = PersistenceDiagram(random_diagram(rng, 4))
            union = PersistenceDiagram(d1.pairs + d2.pairs)
            kw = dict(shared, **extra)
            a = maker(d1, **kw).values + maker(d2, **kw).values
            b = maker(union, **kw).values
            assert np.allclose(a, b, atol=1e-9)


class TestCurveOps:
    def test_constant_area(self):
        c = DiagramCurve([0.0, 1.0], [[1.0, 1.0]])
        f = curve_features(c)
        assert f["area"] == pytest.approx(1.0)

    def test_zero_curve(self):
        f = curve_features(DiagramCurve([0.0, 1.0], [[0.0, 0.0]]))
        assert f["max"] == 0 and f["area"] == 0

    def test_tent_features(self):
        c = persistence_landscape(dgm((0, 2)), grid=[0.0, 1.0, 2.0])
        f = curve_features(c)
        assert f["max"] == 1.0 and f["argmax"] == 1.0 and f["area"] == pytest.approx(1.0)

    def test_lp_identical(self):
        c = DiagramCurve([0, 1], [[0.3, 0.7]])
        assert lp_curve_distance(c, c, 2) == 0

    def test_lp_constant_gap(self):
        a = DiagramCurve([0.0, 1.0], [[1.0, 1.0]])
        b = DiagramCurve([0.0, 1.0], [[0.0, 0.0]])
        assert lp_curve_distance(a, b, 1) == pytest.approx(1.0)

    def test_lp_infinity(self):
        a = DiagramCurve([0, 1], [[0.5, 0.1]])
        b = DiagramCurve([0, 1], [[0.0, 0.0]])
        assert lp_curve_distance(a, b, math.inf) == 0.5

    def test_lp_grid_mismatch(self):
        from toposcope.core import InvalidInput

        a = DiagramCurve([0, 1], [[1, 1]])
        b = DiagramCurve([0, 2], [[1, 1]])
        with pytest.raises(InvalidInput):
            lp_curve_distance(a, b, 1)


class TestBottleneck:
    def test_self_distance(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            d = PersistenceDiagram(random_diagram(rng, 5))
            assert bottleneck_distance(d, d) == 0

    def test_vs_empty(self):
        assert bottleneck_distance(dgm((0, 2)), EMPTY) == pytest.approx(1.0)

    def test_two_singletons(self):
        assert bottleneck_distance(dgm((0, 2)), dgm((0, 3))) == pytest.approx(1.0)

    def test_infinite_mismatch(self):
        a = PersistenceDiagram(((1, 0.0, math.inf),))
        assert bottleneck_distance(a, EMPTY) == math.inf

    def test_infinite_matched(self):
        a = PersistenceDiagram(((1, 0.0, math.inf),))
        b = PersistenceDiagram(((1, 0.5, math.inf),))
        assert bottleneck_distance(a, b) == pytest.approx(0.5)

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            d1 = PersistenceDiagram(random_diagram(rng, 5))
            d2 = PersistenceDiagram(random_diagram(rng, 5))
            got = bottleneck_distance(d1, d2)
            expected = brute_bottleneck(d1.in_dimension(1), d2.in_dimension(1))
            assert got == pytest.approx(expected, abs=1e-12)


class TestWasserstein:
    def test_identical(self):
        d = dgm((0, 2), (1, 3))
        assert wasserstein_distance(d, d, q=1) == 0

    def test_vs_empty(self):
        assert wasserstein_distance(dgm((0, 2)), EMPTY, q=1) == pytest.approx(1.0)

    def test_extra_point(self):
        a = dgm((0, 2), (0, 4))
        assert wasserstein_distance(a, dgm((0, 2)), q=1) == pytest.approx(2.0)

    def test_brute_force_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            d1 = PersistenceDiagram(random_diagram(rng, 4))
            d2 = PersistenceDiagram(random_diagram(rng, 4))
            for q in (1.0, 2.0):
                got = wasserstein_distance(d1, d2, q=q)
                expected = brute_wasserstein(d1.in_dimension(1), d2.in_dimension(1), q)
                assert got == pytest.approx(expected, abs=1e-9)

    def test_dominates_bottleneck(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            d1 = PersistenceDiagram(random_diagram(rng, 4))
            d2 = PersistenceDiagram(random_diagram(rng, 4))
            bn = bottleneck_distance(d1, d2)
            for q in (1.0, 2.0):
                assert wasserstein_distance(d1, d2, q=q) >= bn - 1e-9


class TestMetricProperties:
    def test_symmetry_nonnegativity_triangle(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            ds = [PersistenceDiagram(random_diagram(rng, 4)) for _ in range(3)]
            for dist in (
                bottleneck_distance,
                lambda a, b, k=1: wasserstein_distance(a, b, k, 1.0),
            ):
                dab = dist(ds[0], ds[1])
                dba = dist(ds[1], ds[0])
                dbc = dist(ds[1], ds[2])
                dac = dist(ds[0], ds[2])
                assert dab == pytest.approx(dba, abs=1e-12)
                assert dab >= 0
                assert dac <= dab + dbc + 1e-9


class TestScalarFeatures:
    def test_entropy_two_equal(self):
        assert persistence_entropy(dgm((0, 1), (0, 1))) == pytest.approx(1.0)

    def test_entropy_single(self):
        assert persistence_entropy(dgm((0, 1))) == 0.0

    def test_entropy_quarter_three_quarters(self):
        assert persistence_entropy(dgm((0, 1), (0, 3))) == pytest.approx(0.811278, abs=1e-6)

    def test_entropy_empty_convention(self):
        assert persistence_entropy(EMPTY) == 0.0

    def test_entropy_bounds(self):
        rng = np.random.default_rng(10)
        for _ in range(30):
            d = PersistenceDiagram(random_diagram(rng, 6))
            n = count_points(d)
            if n >= 1:
                e = persistence_entropy(d)
                assert -1e-12 <= e <= math.log2(n) + 1e-12

    def test_count_points(self):
        assert count_points(EMPTY) == 0
        assert count_points(dgm((0, 1), (0, 2))) == 2

    def test_amplitude_empty(self):
        for metric in ("bottleneck", "wasserstein", "landscape", "betti", "heat"):
            assert amplitude(EMPTY, metric=metric) == pytest.approx(0.0, abs=1e-12)

    def test_amplitude_bottleneck(self):
        assert amplitude(dgm((0, 2)), metric="bottleneck") == pytest.approx(1.0)

    def test_amplitude_wasserstein(self):
        assert amplitude(dgm((0, 2)), metric="wasserstein", q=1) == pytest.approx(1.0)

    def test_complex_polynomial_single(self):
        coeffs = complex_polynomial(dgm((0, 1)), n_coefficients=1)
        assert coeffs[0] == pytest.approx(complex(0, -1))

    def test_complex_polynomial_empty(self):
        assert np.all(complex_polynomial(EMPTY, n_coefficients=3) == 0)

    def test_complex_polynomial_double_root(self):
        coeffs = complex_polynomial(dgm((0, 1), (0, 1)), n_coefficients=2)
        assert coeffs[0] == pytest.approx(complex(0, -2))
        assert coeffs[1] == pytest.approx(complex(-1, 0))


class TestSvg:
    def test_scatter_structure(self):
        d = PersistenceDiagram(((0, 0.0, 1.0), (1, 0.5, math.inf)))
        svg = diagram_to_svg(d)
        assert svg.startswith("<svg")
        assert svg.count("<circle") == 2
        assert "stroke-dasharray" in svg  # the diagonal
