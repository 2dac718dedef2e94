"""Grid, cell-mask, triangle, and polyline primitives."""

import numpy as np
import pytest

from gmcarea.grid import (CellMask, GridMismatchError, GridSpec, Polyline,
                          Triangle, rectangle_mask, shift_mask, triangle_mask)


class TestGridSpec:
    def test_shape_and_area(self):
        g = GridSpec(-1.0, -2.0, 0.25, 8, 16)
        assert g.shape == (16, 8)
        assert g.cell_area == pytest.approx(0.0625)
        assert g.x_max == pytest.approx(-1.0 + 8 * 0.25)
        assert g.y_max == pytest.approx(-2.0 + 16 * 0.25)

    def test_center_coords(self):
        g = GridSpec(0.0, 0.0, 0.5, 4, 4)
        xs, ys = g.center_coords()
        assert xs[0] == pytest.approx(0.25)
        assert xs[-1] == pytest.approx(1.75)
        assert ys[1] == pytest.approx(0.75)

    def test_invalid_spacing_rejected(self):
        with pytest.raises(ValueError):
            GridSpec(0.0, 0.0, -0.1, 4, 4)
        with pytest.raises(ValueError):
            GridSpec(0.0, 0.0, 0.1, 0, 4)


class TestCellMask:
    def test_boolean_algebra(self, unit_grid):
        a = rectangle_mask(0.0, 0.5, 0.0, 0.5, unit_grid)
        b = rectangle_mask(0.25, 0.75, 0.25, 0.75, unit_grid)
        assert (a | b).count == a.count + b.count - (a & b).count
        assert ((a - b) & b).count == 0
        assert (a.complement() | a).count == unit_grid.nx * unit_grid.ny

    def test_area_matches_count(self, unit_grid):
        a = rectangle_mask(0.0, 0.25, 0.0, 1.0, unit_grid)
        assert a.area == pytest.approx(a.count * unit_grid.cell_area)

    def test_rectangle_open_interior(self):
        # cell centers exactly on the rectangle edge are excluded
        g = GridSpec(0.0, 0.0, 0.5, 4, 4)
        m = rectangle_mask(0.0, 1.0, 0.0, 1.0, g)  # centers at .25, .75
        assert m.count == 4
        m2 = rectangle_mask(0.0, 0.75, 0.0, 1.0, g)  # x = .75 lands on edge
        assert m2.count == 2

    def test_bytes_roundtrip(self, unit_grid):
        rng = np.random.default_rng(0)
        cells = rng.random(unit_grid.shape) < 0.3
        m = CellMask(unit_grid, cells)
        m2 = CellMask.from_bytes(m.to_bytes())
        assert m2.grid == unit_grid
        assert np.array_equal(m2.cells, cells)

    def test_grid_mismatch_rejected(self, unit_grid, small_grid):
        a = rectangle_mask(0.0, 0.5, 0.0, 0.5, unit_grid)
        b = rectangle_mask(-1.0, 0.0, -1.0, 0.0, small_grid)
        with pytest.raises(GridMismatchError):
            _ = a | b

    def test_shift_mask(self, unit_grid):
        a = rectangle_mask(0.0, 0.25, 0.0, 0.25, unit_grid)
        shifted, lost = shift_mask(a, (3, 5))
        assert lost == 0
        ca = a.centers()
        cs = shifted.centers()
        assert cs[:, 0].min() == pytest.approx(ca[:, 0].min() + 3 * unit_grid.h)
        assert cs[:, 1].min() == pytest.approx(ca[:, 1].min() + 5 * unit_grid.h)


class TestTriangle:
    def test_signed_area_and_orientation(self):
        t = Triangle((0, 0), (1, 0), (0, 1))
        assert t.signed_area == pytest.approx(0.5)
        assert t.orientation > 0
        t2 = Triangle((0, 0), (0, 1), (1, 0))
        assert t2.signed_area == pytest.approx(-0.5)

    def test_perimeter(self):
        t = Triangle((0, 0), (3, 0), (0, 4))
        assert t.perimeter == pytest.approx(12.0)

    def test_triangle_mask_area_converges(self):
        g = GridSpec(0.0, 0.0, 1 / 256, 256, 256)
        t = Triangle((0.1, 0.1), (0.9, 0.2), (0.3, 0.8))
        m = triangle_mask(t, g)
        assert m.area == pytest.approx(abs(t.signed_area), rel=0.02)


class TestPolyline:
    def test_requires_increasing_times(self):
        with pytest.raises(ValueError):
            Polyline(np.array([0.0, 0.0, 1.0]), np.zeros((3, 2)))

    def test_point_at_interpolates(self):
        p = Polyline(np.array([0.0, 1.0]), np.array([[0.0, 0.0], [2.0, 4.0]]))
        assert p.point_at(0.5) == pytest.approx([1.0, 2.0])

    def test_length_and_bbox(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
        p = Polyline(np.array([0.0, 0.5, 1.0]), pts)
        assert p.length() == pytest.approx(2.0)
        x0, x1, y0, y1 = p.bounding_box()
        assert (x0, x1, y0, y1) == pytest.approx((0.0, 1.0, 0.0, 1.0))

    def test_closed_vertices_appends_start(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        p = Polyline(np.array([0.0, 0.5, 1.0]), pts, closed=True)
        cv = p.closed_vertices()
        assert np.array_equal(cv[-1], cv[0])
        assert cv.shape[0] == 4

    def test_slice_endpoints(self, brownian_loop):
        s = brownian_loop.slice(0.25, 0.5)
        assert s.t0 == pytest.approx(0.25)
        assert s.t1 == pytest.approx(0.5)
        assert np.allclose(s.points[0], brownian_loop.point_at(0.25))
        assert np.allclose(s.points[-1], brownian_loop.point_at(0.5))

    def test_reversed_traversal(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        p = Polyline(np.array([0.0, 0.5, 1.0]), pts)
        r = p.reversed()
        assert np.allclose(r.points, pts[::-1])
        assert np.all(np.diff(r.times) > 0)

    def test_csv_roundtrip(self, brownian_loop):
        text = brownian_loop.to_csv()
        p2 = Polyline.from_csv(text, closed=True)
        assert np.allclose(p2.times, brownian_loop.times)
        assert np.allclose(p2.points, brownian_loop.points)
        assert p2.closed

    def test_bytes_roundtrip(self, brownian_loop):
        p2 = Polyline.from_bytes(brownian_loop.to_bytes())
        assert np.array_equal(p2.times, brownian_loop.times)
        assert np.array_equal(p2.points, brownian_loop.points)
        assert p2.kind == brownian_loop.kind
