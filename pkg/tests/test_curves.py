"""Curve generators: Brownian paths, circle chains, subdivision, Hölder."""

import numpy as np
import pytest

from gmcarea.curves import (archimedean_spiral, chain_level_area, circle_chain,
                            holder_seminorm, sample_brownian, subdivide)
from gmcarea.grid import GridSpec, Polyline
from gmcarea.winding import winding_field, winding_number_at


class TestBrownian:
    def test_deterministic_for_seed(self):
        a = sample_brownian(512, 99)
        b = sample_brownian(512, 99)
        assert np.array_equal(a.points, b.points)
        assert not np.array_equal(a.points, sample_brownian(512, 100).points)

    def test_horizon_and_start(self):
        p = sample_brownian(256, 1, horizon=(0.5, 2.5))
        assert p.t0 == pytest.approx(0.5)
        assert p.t1 == pytest.approx(2.5)
        assert p.points[0] == pytest.approx([0.0, 0.0])
        assert p.n_vertices == 257

    def test_increment_statistics(self):
        # quadratic variation of each coordinate concentrates at the horizon
        p = sample_brownian(2**14, 7)
        qv = (np.diff(p.points, axis=0) ** 2).sum(axis=0)
        assert qv[0] == pytest.approx(1.0, rel=0.05)
        assert qv[1] == pytest.approx(1.0, rel=0.05)

    def test_scaling_of_spread(self):
        # terminal displacement over many seeds has variance ~ horizon length
        ends = np.array([sample_brownian(256, s).points[-1] for s in range(200)])
        assert ends.var(axis=0).mean() == pytest.approx(1.0, rel=0.25)


class TestCircleChain:
    def test_single_circle_winding(self):
        g = GridSpec(-1.5, -0.5, 3 / 128, 128, 128)
        chain = circle_chain(1.0, 1, grid_h=g.h)
        wf = winding_field(chain, g)
        ny, nx = g.shape
        # center of circle 1 is (0, 1)
        iy = int((1.0 - g.origin_y) / g.h)
        ix = int((0.0 - g.origin_x) / g.h)
        assert wf.winding[iy, ix] == 1
        assert wf.winding[5, 5] == 0

    def test_nested_windings_exact(self):
        g = GridSpec(-1.2, -0.1, 2.4 / 512, 512, 512)
        chain = circle_chain(1.0, 6, grid_h=g.h)
        wf = winding_field(chain, g)
        X, Y = g.center_grids()
        free = ~wf.boundary
        for N in (1, 2, 3):
            c, r = N ** -1.0, N ** -1.0
            inside_n = (X**2 + (Y - c) ** 2) < (r - 2 * g.h) ** 2
            c2, r2 = (N + 1) ** -1.0, (N + 1) ** -1.0
            outside_next = (X**2 + (Y - c2) ** 2) > (r2 + 2 * g.h) ** 2
            sel = inside_n & outside_next & free
            assert sel.any()
            assert np.all(wf.winding[sel] == N)

    def test_level_area_formula(self):
        assert chain_level_area(1.0, 1) == pytest.approx(np.pi * (1 - 0.25))
        assert chain_level_area(0.75, 3) == pytest.approx(
            np.pi * (3.0 ** -1.5 - 4.0 ** -1.5))

    def test_rejects_flat_decay(self):
        with pytest.raises(ValueError):
            circle_chain(0.5, 4)

    def test_closed_through_origin(self):
        chain = circle_chain(1.0, 4, verts_per_circle=64)
        assert chain.closed
        assert np.allclose(chain.points[0], [0.0, 0.0], atol=1e-12)

    def test_holder_slot_allocation(self):
        # with the exponent-matched parametrization, circle k occupies a
        # time slot proportional to radius^(1/alpha)
        chain = circle_chain(1.0, 3, verts_per_circle=32, holder_alpha=0.5)
        t = chain.times
        w = np.array([1.0, 2.0 ** -2, 3.0 ** -2])
        w /= w.sum()
        # slot boundaries at cumulative weights
        b1 = t[32]
        assert b1 == pytest.approx(w[0], abs=1e-9)


class TestSubdivide:
    def test_pieces_partition_horizon(self, brownian_loop):
        pieces, closing = subdivide(brownian_loop, 4)
        assert len(pieces) == 4
        assert pieces[0].t0 == pytest.approx(brownian_loop.t0)
        assert pieces[-1].t1 == pytest.approx(brownian_loop.t1)
        for a, b in zip(pieces, pieces[1:]):
            assert a.t1 == pytest.approx(b.t0)

    def test_pieces_closed_and_chain_kind(self, brownian_loop):
        pieces, closing = subdivide(brownian_loop, 3)
        assert all(p.closed for p in pieces)
        assert closing.kind == "closing_chain"

    def test_winding_additivity(self, brownian_loop):
        # the chord-closed pieces plus the closing polygon reproduce the
        # full path's winding at generic points
        pieces, closing = subdivide(brownian_loop, 4)
        rng = np.random.default_rng(3)
        pts = rng.uniform(-1.5, 1.5, size=(64, 2))
        total = winding_number_at(brownian_loop, pts)
        parts = sum(winding_number_at(p, pts) for p in pieces)
        parts = parts + winding_number_at(closing, pts)
        assert np.array_equal(total, parts)


class TestHolderSeminorm:
    def test_line_exact(self):
        t = np.linspace(0.0, 1.0, 101)
        p = Polyline(t, np.column_stack([3.0 * t, 4.0 * t]))
        assert holder_seminorm(p, 1.0) == pytest.approx(5.0)

    def test_alpha_half_of_line_peaks_at_full_span(self):
        t = np.linspace(0.0, 1.0, 101)
        p = Polyline(t, np.column_stack([t, np.zeros_like(t)]))
        # |dz| / dt^0.5 = dt^0.5, maximal at the full span
        assert holder_seminorm(p, 0.5) == pytest.approx(1.0)

    def test_invalid_alpha(self):
        t = np.linspace(0.0, 1.0, 11)
        p = Polyline(t, np.column_stack([t, t]))
        with pytest.raises(ValueError):
            holder_seminorm(p, 0.0)


class TestSpiral:
    def test_winding_counts_turns(self):
        sp = archimedean_spiral(8.0, n_vertices=8192, outer_radius=1.0)
        w = winding_number_at(sp, np.array([[0.0, 0.0]]))
        assert abs(int(w[0])) == 8
