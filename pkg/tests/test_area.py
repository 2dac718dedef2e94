"""Area integrals: cutoff/level-sum identity, Chen relation, norms, fits."""

import numpy as np
import pytest

from gmcarea.area import (area_process, chen_defect, cutoff_integral,
                          dyadic_exclusion_mask, holder_area_bound, j_statistic,
                          levelsum_partial, norm_p2, proxy_comparison,
                          regularity_fit, tail_decay)
from gmcarea.curves import circle_chain, sample_brownian, subdivide
from gmcarea.gmc import sample_gmc
from gmcarea.grid import GridSpec, Polyline
from gmcarea.winding import winding_field
from conftest import make_circle


class TestSummationByParts:
    def test_identity_on_random_instances(self, small_grid, small_kernel):
        rng = np.random.default_rng(2)
        for trial in range(10):
            p = sample_brownian(1024, int(rng.integers(2**40)))
            wf = winding_field(
                Polyline(p.times, p.points, closed=True, kind="brownian"),
                small_grid)
            gmc = sample_gmc(small_kernel, small_grid, 0.5, trial)
            K = int(rng.integers(1, 20))
            total, incs = levelsum_partial(wf, gmc, K)
            direct = cutoff_integral(wf, gmc, K)
            tol = 2.0**-40 * max(np.abs(incs).sum(), 1e-300)
            assert abs(total - direct) <= tol

    def test_circle_mass_at_gamma_zero(self, small_grid, small_kernel):
        wf = winding_field(make_circle(1.0, 512), small_grid)
        gmc = sample_gmc(small_kernel, small_grid, 0.0, 0)
        val = cutoff_integral(wf, gmc, 4)
        assert val == pytest.approx(np.pi, rel=0.05)

    def test_clockwise_circle_is_negative(self, small_grid, small_kernel):
        wf = winding_field(make_circle(1.0, 512, clockwise=True), small_grid)
        gmc = sample_gmc(small_kernel, small_grid, 0.0, 0)
        assert cutoff_integral(wf, gmc, 4) == pytest.approx(-np.pi, rel=0.05)

    def test_stabilizes_beyond_max_winding(self, brownian_loop, small_grid,
                                           gmc_ensemble):
        wf = winding_field(brownian_loop, small_grid)
        gmc = gmc_ensemble[0]
        K = wf.max_abs_winding
        assert cutoff_integral(wf, gmc, K) == cutoff_integral(wf, gmc, K + 5)


class TestAreaProcess:
    def test_antisymmetry(self, brownian_loop, gmc_ensemble):
        aps = area_process(brownian_loop, gmc_ensemble[0], 3)
        assert np.allclose(aps.values, -aps.values.T)
        assert np.all(np.diag(aps.values) == 0.0)

    def test_full_mode_chen_defect_tiny(self, brownian_loop, gmc_ensemble):
        aps = area_process(brownian_loop, gmc_ensemble[0], 3)
        rep = chen_defect(aps, gmc_ensemble[0], brownian_loop)
        assert rep["relative"] <= 2.0**-38

    def test_exclusion_covers_path_boundary(self, brownian_loop, small_grid):
        wf = winding_field(brownian_loop, small_grid)
        excl = dyadic_exclusion_mask(brownian_loop, 2, small_grid)
        assert not np.any(wf.boundary & ~excl)

    def test_margin_enforced(self, gmc_ensemble):
        p = sample_brownian(256, 8)
        far = Polyline(p.times, p.points + 10.0, closed=True, kind="brownian")
        with pytest.raises(ValueError):
            area_process(far, gmc_ensemble[0], 2)


class TestNormP2:
    def test_constant_inputs(self):
        est = norm_p2(np.full(16, 4.0), 2.0)
        assert est.value == pytest.approx(2.0)
        assert est.ci_low == pytest.approx(2.0)
        assert est.ci_high == pytest.approx(2.0)

    def test_ci_brackets_value(self):
        rng = np.random.default_rng(0)
        s = rng.lognormal(0.0, 0.5, 64)
        est = norm_p2(s, 2.0)
        assert est.ci_low <= est.value <= est.ci_high

    def test_bias_correction_direction(self):
        # for p = 4 the inner-noise correction lowers the raw estimate
        s = np.full(16, 4.0)
        raw = norm_p2(s, 4.0)
        corr = norm_p2(s, 4.0, inner_variances=np.full(16, 1.0))
        assert corr.value < raw.value


class TestJStatistic:
    def test_matches_brute_force_lebesgue(self, small_grid, small_kernel):
        p = sample_brownian(512, 31)
        path = Polyline(p.times, p.points, closed=True, kind="brownian")
        gmc = sample_gmc(small_kernel, small_grid, 0.0, 0)
        n = n_prime = 2
        val = j_statistic(path, gmc, n, n_prime)
        # brute force: every pair of dyadic knot intervals; rectangle spanned
        # by the endpoint coordinates; count centers in the half-open box
        xs, ys = small_grid.center_coords()
        best = 0.0
        for i in range(2**n):
            for j in range(2**n_prime):
                xa, _ = path.point_at(i / 2**n)
                xb, _ = path.point_at((i + 1) / 2**n)
                _, ya = path.point_at(j / 2**n_prime)
                _, yb = path.point_at((j + 1) / 2**n_prime)
                x0, x1 = sorted((xa, xb))
                y0, y1 = sorted((ya, yb))
                nx_in = np.sum((xs >= x0) & (xs < x1))
                ny_in = np.sum((ys >= y0) & (ys < y1))
                best = max(best, nx_in * ny_in * small_grid.cell_area)
        assert val == pytest.approx(best, rel=1e-12)


class TestTailDecay:
    @staticmethod
    def _ensembles(kernel, grid, n_paths=3, n_gmc=3, gamma=0.5):
        chain = circle_chain(1.0, 6, grid_h=grid.h)
        wfs = [winding_field(chain, grid) for _ in range(n_paths)]
        gmc_lists = [[sample_gmc(kernel, grid, gamma, 10 * a + b)
                      for b in range(n_gmc)] for a in range(n_paths)]
        return wfs, gmc_lists

    def test_chain_levels_give_finite_negative_slope(self):
        grid = GridSpec(-1.2, -0.1, 2.4 / 256, 256, 256)
        from gmcarea.field import CovarianceKernel
        kernel = CovarianceKernel(eps_reg=grid.h / 2)
        wfs, gls = self._ensembles(kernel, grid)
        rep = tail_decay(wfs, gls, [1, 2, 4], 2.0)
        assert not rep["uncompensated_degenerate"]
        assert rep["uncompensated_slope"] < 0

    def test_empty_levels_flagged_degenerate(self, small_grid, small_kernel):
        wfs = [winding_field(make_circle(1.0, 256), small_grid)
               for _ in range(2)]
        gls = [[sample_gmc(small_kernel, small_grid, 0.5, 10 * a + b)
                for b in range(2)] for a in range(2)]
        rep = tail_decay(wfs, gls, [1, 4], 2.0)
        assert rep["uncompensated_degenerate"]
        assert np.isnan(rep["uncompensated_slope"])

    def test_ensemble_shape_validated(self, small_grid, small_kernel):
        wfs = [winding_field(make_circle(1.0, 64), small_grid)]
        with pytest.raises(ValueError):
            tail_decay(wfs, [], [1, 2], 2.0)


class TestProxyComparison:
    def test_report_structure(self, small_grid, small_kernel):
        paths = []
        for s in range(3):
            p = sample_brownian(1024, 100 + s)
            paths.append(Polyline(p.times, p.points, closed=True, kind="brownian"))
        gls = [[sample_gmc(small_kernel, small_grid, 0.5, 10 * a + b)
                for b in range(3)] for a in range(3)]
        rep = proxy_comparison(paths, gls, small_grid, 3, [1, 2], 0.1, 2.0)
        assert rep["T"] == 3
        assert len(rep["r_means"]) == 3
        for (i, j), (freq, bound) in rep["near_return"].items():
            assert 0.0 <= freq <= 1.0
            assert bound > 0.0


class TestRegularityFit:
    def test_beta_hat_within_grid(self, small_kernel, small_grid):
        paths, gmcs, aps = [], [], []
        for s in range(4):
            p = sample_brownian(1024, 200 + s)
            path = Polyline(p.times, p.points, closed=True, kind="brownian")
            g = sample_gmc(small_kernel, small_grid, 0.5, s)
            paths.append(path)
            gmcs.append(g)
            aps.append(area_process(path, g, 3))
        grid_b = np.arange(0.1, 1.0, 0.1)
        rep = regularity_fit(aps, grid_b, paths=paths, gmcs=gmcs, beta0=0.355)
        assert 0.0 <= rep["beta_hat"] <= 1.0
        assert np.isfinite(rep["j_log2_slope"])
        assert rep["j_reference_slope"] == pytest.approx(-2 * 0.355)


class TestHolderAreaBound:
    def test_weak_exponent_rejected(self, gmc_ensemble, brownian_loop):
        # alpha nu <= 1 violates the strengthened assumption
        with pytest.raises(ValueError):
            holder_area_bound(gmc_ensemble, brownian_loop, 0.3, 3)

    def test_circle_slopes(self, small_grid):
        from gmcarea.field import CovarianceKernel
        kernel = CovarianceKernel(eps_reg=small_grid.h / 2)
        gmcs = [sample_gmc(kernel, small_grid, 0.0, s) for s in range(2)]
        rep = holder_area_bound(gmcs, make_circle(1.0, 2048), 1.0, 3)
        assert rep["slope"] == pytest.approx(3.0, abs=0.3)
        assert rep["winding_lr_slope"] >= rep["winding_lr_reference"] - 0.1
