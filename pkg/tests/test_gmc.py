"""Chaos measures: normalization, moments, comparison tools, phi map."""

import numpy as np
import pytest

from gmcarea.field import CovarianceKernel, sample_field
from gmcarea.gmc import (GmcSample, L2PhaseError, PhiMap, ScalingConstants,
                         four_set_covariance_check, gmc_from_field,
                         kahane_compare, mask_distances, measure_of,
                         phi_rectangle_map, rectangle_moment_check, sample_gmc,
                         second_moment_bound_check, second_moment_oracle)
from gmcarea.grid import GridSpec, rectangle_mask


class TestScalingConstants:
    def test_nu_and_qmax(self):
        sc = ScalingConstants(0.5)
        assert sc.nu == pytest.approx(2 - 0.125)
        assert sc.q_max == pytest.approx(16.0)

    def test_zeta_values(self):
        sc = ScalingConstants(1.0)
        # (1 + g^2/4) q - (g^2/4) q^2
        assert sc.zeta(1.0) == pytest.approx(1.0)
        assert sc.zeta(2.0) == pytest.approx(2 * 1.25 - 0.25 * 4)

    def test_zeta_concave(self):
        sc = ScalingConstants(0.8)
        q = np.linspace(0.5, 3.0, 11)
        z = np.array([sc.zeta(x) for x in q])
        assert np.all(np.diff(z, 2) < 1e-12)


class TestGmcSample:
    def test_mass_formula(self, unit_grid, unit_kernel):
        fld = sample_field(unit_kernel, unit_grid, 3)
        gamma = 0.7
        gmc = gmc_from_field(fld, gamma)
        expect = unit_grid.cell_area * np.exp(
            gamma * fld.values - 0.5 * gamma**2 * fld.realized_variance)
        assert np.allclose(gmc.mass, expect)

    def test_gamma_zero_is_lebesgue(self, unit_grid, unit_kernel):
        gmc = sample_gmc(unit_kernel, unit_grid, 0.0, 4)
        assert np.allclose(gmc.mass, unit_grid.cell_area)

    def test_unit_intensity(self, unit_grid, unit_kernel):
        totals = np.array([sample_gmc(unit_kernel, unit_grid, 0.5, s).total_mass
                           for s in range(200)])
        sem = totals.std(ddof=1) / np.sqrt(len(totals))
        assert abs(totals.mean() - 1.0) <= 3 * sem

    def test_l2_phase_rejected(self, unit_grid, unit_kernel):
        q = rectangle_mask(0.0, 0.5, 0.0, 0.5, unit_grid)
        with pytest.raises(L2PhaseError):
            second_moment_oracle(unit_kernel, 1.5, q, q)

    def test_measure_additivity(self, gmc_ensemble, small_grid):
        g = gmc_ensemble[0]
        a = rectangle_mask(-2.0, 0.0, -2.0, 2.0, small_grid)
        b = rectangle_mask(0.0, 2.0, -2.0, 2.0, small_grid)
        whole = a | b
        assert measure_of(g, a) + measure_of(g, b) == pytest.approx(
            measure_of(g, whole), rel=1e-12)


class TestSecondMomentOracle:
    def test_matches_direct_enumeration(self, unit_kernel):
        g = GridSpec(0.0, 0.0, 1 / 8, 8, 8)
        a = rectangle_mask(0.0, 0.5, 0.0, 0.5, g)
        b = rectangle_mask(0.25, 0.85, 0.25, 0.85, g)
        gamma = 0.6
        oracle = second_moment_oracle(unit_kernel, gamma, a, b)
        ca, cb = a.centers(), b.centers()
        d = np.hypot(ca[:, None, 0] - cb[None, :, 0],
                     ca[:, None, 1] - cb[None, :, 1])
        brute = float(np.exp(gamma**2 * unit_kernel.log_part(d)).sum()) * g.cell_area**2
        assert oracle == pytest.approx(brute, rel=1e-10)

    def test_gamma_zero_gives_product_of_areas(self, unit_grid, unit_kernel):
        a = rectangle_mask(0.0, 0.25, 0.0, 0.25, unit_grid)
        # all cells are farther than 1 apart from none; K >= 0, but at
        # gamma = 0 the weight is exactly 1
        assert second_moment_oracle(unit_kernel, 0.0, a, a) == pytest.approx(
            a.area**2)

    def test_bound_check_exponent(self, gmc_ensemble, small_grid):
        masks = [rectangle_mask(-2.0, -2.0 + s, -2.0, -2.0 + s, small_grid)
                 for s in (0.25, 0.5, 1.0)]
        rep = second_moment_bound_check(gmc_ensemble, masks)
        # E[M(A)^2] <= C (|A|^nu + |A|^2); the fitted slope of the small-set
        # branch stays near nu
        assert rep["log_slope"] == pytest.approx(rep["nu"], abs=0.5)
        assert rep["max_ratio"] < 10.0


class TestMaskDistances:
    def test_separated_rectangles(self, unit_grid):
        a = rectangle_mask(0.0, 0.2, 0.0, 0.2, unit_grid)
        b = rectangle_mask(0.6, 0.8, 0.0, 0.2, unit_grid)
        d_sup, d_inf = mask_distances(a, b)
        # d_inf: closest center-to-center gap; d_sup: diameter scale
        assert d_inf == pytest.approx(0.4, abs=2 * unit_grid.h)
        assert d_sup >= d_inf


class TestFourSetCovariance:
    def test_bound_holds(self, gmc_ensemble, small_grid):
        A1 = rectangle_mask(-1.9, -1.7, -1.9, -1.7, small_grid)
        A2 = rectangle_mask(-1.85, -1.75, -1.85, -1.75, small_grid)
        B1 = rectangle_mask(1.7, 1.9, 1.7, 1.9, small_grid)
        B2 = rectangle_mask(1.75, 1.85, 1.75, 1.85, small_grid)
        rep = four_set_covariance_check(gmc_ensemble, A1, A2, B1, B2)
        assert rep["empirical"] <= rep["bound_rhs"] + 3 * rep["empirical_sem"]

    def test_separation_hypothesis_enforced(self, gmc_ensemble, small_grid):
        A1 = rectangle_mask(-1.0, 0.0, -1.0, 0.0, small_grid)
        A2 = rectangle_mask(-0.8, -0.2, -0.8, -0.2, small_grid)
        B1 = rectangle_mask(-0.5, 0.5, -0.5, 0.5, small_grid)
        B2 = rectangle_mask(-0.3, 0.3, -0.3, 0.3, small_grid)
        with pytest.raises(ValueError):
            four_set_covariance_check(gmc_ensemble, A1, A2, B1, B2)


class TestKahane:
    def test_shifted_kernel_dominates(self):
        g = GridSpec(0.0, 0.0, 1 / 32, 32, 32)
        ka = CovarianceKernel(eps_reg=g.h / 2)
        shift = 0.3
        kb = CovarianceKernel(
            variant="log_plus_smooth", eps_reg=g.h / 2,
            g=lambda z, w: np.full(np.broadcast(z[..., 0], w[..., 0]).shape, shift),
            g_bound=shift)
        mask = rectangle_mask(0.0, 0.4, 0.0, 0.4, g)
        rep = kahane_compare(ka, kb, shift, 0.5, mask, 2.0, n_samples=400)
        assert rep["holds_within_error"]
        assert rep["lhs_mean"] <= rep["rhs_mean"] + 3 * np.hypot(
            rep["lhs_sem"], rep["rhs_sem"])


class TestPhiMap:
    def test_identity_for_small_n(self):
        for n in (1, 2, 3):
            pm = phi_rectangle_map(n)
            assert pm.identity
            pts = np.array([[0.3, 0.001], [2.0**n - 0.1, 0.0005]])
            assert np.allclose(pm(pts), pts)

    def test_serpentine_properties(self):
        pm = phi_rectangle_map(6)
        assert not pm.identity
        L, w = pm.domain
        assert L == pytest.approx(64.0)
        assert w == pytest.approx(2.0**-6)
        rng = np.random.default_rng(0)
        pts = np.column_stack([rng.uniform(0, L, 20_000),
                               rng.uniform(0, w, 20_000)])
        img = pm(pts)
        assert img.min() >= -1e-12
        assert img.max() <= 10 + 1e-12
        a, b = pts[:10_000], pts[10_000:]
        ratio = np.hypot(*(pm(a) - pm(b)).T) / np.hypot(*(a - b).T)
        assert ratio.max() <= pm.lipschitz_bound * (1 + 1e-9)
        jac = pm.jacobian(pts)
        assert jac.min() >= pm.jacobian_lower - 1e-12

    def test_injective_on_net(self):
        pm = phi_rectangle_map(6)
        L, w = pm.domain
        s = np.linspace(1e-6, L - 1e-6, 4000)
        pts = np.column_stack([s, np.full_like(s, w / 2)])
        img = pm(pts)
        d = np.hypot(img[:, None, 0] - img[None, :, 0],
                     img[:, None, 1] - img[None, :, 1])
        far = np.abs(s[:, None] - s[None, :]) > 0.5
        assert d[far].min() > 1e-3


class TestRectangleMoments:
    def test_square_ratio_near_one(self, gmc_ensemble):
        rep = rectangle_moment_check(gmc_ensemble, [1.0, 4.0], 2.0, 2.0**-4)
        assert rep["spread"] >= 1.0
        assert set(rep["ratios"]) == {1.0, 4.0}

    def test_oversized_rectangle_rejected(self, gmc_ensemble):
        with pytest.raises(ValueError):
            rectangle_moment_check(gmc_ensemble, [1024.0], 2.0, 0.25)
