"""Gaussian multiplicative chaos cell masses, moment oracles, comparisons.

The measure attaches mass h^2 exp(gamma phi_c - (gamma^2/2) Var phi_c) to
each cell, using the sampler's realized per-cell variance so that the
expected mass of every cell is exactly h^2 (unit intensity).  Quadrature
oracles for second moments, a four-set covariance bound, a convex-order
comparison between kernels, and an aspect-uniform rectangle moment check
live here as well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.spatial import ConvexHull, cKDTree

from .field import CovarianceKernel, ScalarField, sample_field
from .grid import CellMask, GridMismatchError, GridSpec
from .rng import make_rng

_STREAM_SHIFT = 0x534846  # stream tag for the comparison shift Gaussian


class L2PhaseError(ValueError):
    """Second-moment quantities requested outside the L2 phase."""


@dataclass(frozen=True)
class ScalingConstants:
    """Exponents attached to an intermittency parameter gamma."""

    gamma: float

    def __post_init__(self):
        if not (0 <= self.gamma < 2):
            raise ValueError("gamma must lie in [0, 2)")

    @property
    def nu(self) -> float:
        return 2 - self.gamma**2 / 2

    @property
    def q_max(self) -> float:
        return 4 / self.gamma**2 if self.gamma > 0 else np.inf

    def zeta(self, q: float) -> float:
        """Per-area structure exponent: E[M(A)^q] scales like |A|^zeta(q)."""
        if not (0 <= q < self.q_max):
            raise ValueError(f"q must lie in [0, {self.q_max})")
        g24 = self.gamma**2 / 4
        return (1 + g24) * q - g24 * q * q


@dataclass(frozen=True)
class GmcSample:
    """One realization of the chaos measure as nonnegative cell masses."""

    grid: GridSpec
    mass: np.ndarray  # float64, shape (ny, nx)
    gamma: float
    kernel: CovarianceKernel | None = None
    seed: int | None = None
    level: int | None = None

    def __post_init__(self):
        m = np.ascontiguousarray(self.mass, dtype=float)
        if m.shape != self.grid.shape:
            raise ValueError(f"mass shape {m.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValueError("cell masses must be finite and nonnegative")
        m.flags.writeable = False
        object.__setattr__(self, "mass", m)

    @property
    def total_mass(self) -> float:
        return float(self.mass.sum())


def gmc_from_field(fld: ScalarField, gamma: float) -> GmcSample:
    """Chaos masses from one field realization.

    Normalizes with the realized (post-clipping) variance so E[mass(c)] is
    exactly h^2; gamma = 0 gives the Lebesgue cell masses.
    """
    if not (0 <= gamma < 2):
        raise ValueError("gamma must lie in [0, 2)")
    h2 = fld.grid.cell_area
    mass = h2 * np.exp(gamma * fld.values - 0.5 * gamma**2 * fld.realized_variance)
    return GmcSample(fld.grid, mass, gamma, kernel=fld.kernel, seed=fld.seed,
                     level=fld.level)


def sample_gmc(kernel: CovarianceKernel, grid: GridSpec, gamma: float, seed: int,
               method: str = "circulant") -> GmcSample:
    """Convenience: field sample followed by the chaos normalization."""
    return gmc_from_field(sample_field(kernel, grid, seed, method), gamma)


def measure_of(gmc: GmcSample, mask: CellMask) -> float:
    """M(A) for the cell set A; exactly additive over disjoint masks."""
    if mask.grid != gmc.grid:
        raise GridMismatchError("mask and measure live on different grids")
    return float(gmc.mass[mask.cells].sum())


def second_moment_oracle(
    kernel: CovarianceKernel,
    gamma: float,
    maskA: CellMask,
    maskB: CellMask,
    max_pairs: int = 20_000_000,
) -> float:
    """Deterministic midpoint quadrature of E[M(A) M(B)] =
    int_{A x B} exp(gamma^2 K_eps(z, w)) dz dw.

    Stationary kernels use an FFT cross-correlation over cell offsets, so
    large masks cost two FFTs; otherwise pairs are enumerated directly.
    """
    if maskA.grid != maskB.grid:
        raise GridMismatchError("masks live on different grids")
    grid = maskA.grid
    if gamma**2 >= 2 and (maskA & maskB).count > 0:
        raise L2PhaseError("overlapping second moment diverges for gamma >= sqrt(2)")
    h = grid.h
    if kernel.stationary:
        a = maskA.cells.astype(float)
        b = maskB.cells.astype(float)
        counts = np.rint(fftconvolve(a, b[::-1, ::-1])).astype(np.int64)
        ny, nx = grid.shape
        dj = np.abs(np.arange(counts.shape[0]) - (ny - 1))
        di = np.abs(np.arange(counts.shape[1]) - (nx - 1))
        dist = np.hypot(di[None, :] * h, dj[:, None] * h)
        weights = np.exp(gamma**2 * kernel.log_part(dist))
        return float((counts * weights).sum()) * h**4
    ca = maskA.centers()
    cb = maskB.centers()
    if ca.shape[0] * cb.shape[0] > max_pairs:
        raise ValueError("mask pair too large for direct non-stationary quadrature")
    k = kernel.evaluate(ca[:, None, :], cb[None, :, :])
    return float(np.exp(gamma**2 * k).sum()) * h**4


def second_moment_bound_check(samples: list[GmcSample], masks: list[CellMask]) -> dict:
    """Empirical check of E[M(A)^2] <= C (|A|^nu + |A|^2) over a mask family.

    Returns per-mask ratios and the regression slope of log E-hat[M(A)^2]
    against log |A|.
    """
    gamma = samples[0].gamma
    nu = ScalingConstants(gamma).nu
    areas, moments, ratios = [], [], []
    for mask in masks:
        vals = np.array([measure_of(s, mask) for s in samples])
        m2 = float((vals**2).mean())
        a = mask.area
        areas.append(a)
        moments.append(m2)
        ratios.append(m2 / (a**nu + a**2))
    la, lm = np.log(areas), np.log(moments)
    slope = float(np.polyfit(la, lm, 1)[0]) if len(masks) > 1 else float("nan")
    return {
        "gamma": gamma,
        "nu": nu,
        "areas": areas,
        "second_moments": moments,
        "ratios": ratios,
        "max_ratio": max(ratios),
        "log_slope": slope,
    }


def _hull_points(centers: np.ndarray) -> np.ndarray:
    if len(centers) <= 8:
        return centers
    try:
        return centers[ConvexHull(centers).vertices]
    except Exception:  # collinear centers
        return centers


def mask_distances(maskA: CellMask, maskB: CellMask) -> tuple[float, float]:
    """(d_sup, d_inf) between the center sets of two masks; d_inf is capped
    at 1 as in the covariance bound's convention."""
    ca, cb = maskA.centers(), maskB.centers()
    if len(ca) == 0 or len(cb) == 0:
        raise ValueError("distance between empty masks is undefined")
    ha, hb = _hull_points(ca), _hull_points(cb)
    diff = ha[:, None, :] - hb[None, :, :]
    d_sup = float(np.hypot(diff[..., 0], diff[..., 1]).max())
    d_inf = float(cKDTree(cb).query(ca, k=1)[0].min())
    return d_sup, min(d_inf, 1.0)


def four_set_covariance_check(
    samples: list[GmcSample],
    A1: CellMask, A2: CellMask, B1: CellMask, B2: CellMask,
) -> dict:
    """Empirical E[(M(A1)-M(A2))(M(B1)-M(B2))] against the distance-decay
    bound with constant 1.

    Requires 4 max(d_sup(A1,A2), d_sup(B1,B2)) <= d_inf(A1,B1) and all four
    areas <= 1.
    """
    gamma = samples[0].gamma
    dsA, _ = mask_distances(A1, A2)
    dsB, _ = mask_distances(B1, B2)
    _, dinf = mask_distances(A1, B1)
    if 4 * max(dsA, dsB) > dinf:
        raise ValueError("separation hypothesis violated: 4 max d_sup > d_inf")
    aA1, aA2, aB1, aB2 = A1.area, A2.area, B1.area, B2.area
    if max(aA1, aA2, aB1, aB2) > 1:
        raise ValueError("all four areas must be <= 1")
    da = np.array([measure_of(s, A1) - measure_of(s, A2) for s in samples])
    db = np.array([measure_of(s, B1) - measure_of(s, B2) for s in samples])
    prod = da * db
    emp = float(prod.mean())
    sem = float(prod.std(ddof=1) / np.sqrt(len(prod))) if len(prod) > 1 else float("nan")
    g2 = gamma**2
    rhs = (dinf ** (-g2) * abs(aB1 - aB2) * abs(aA1 - aA2)
           + (dsA + dsB) * dinf ** (-1 - g2) * (aA1 * abs(aB1 - aB2) + abs(aA2 - aA1) * aB1)
           + dinf ** (-2 - g2) * dsA * dsB * aA1 * aB1)
    return {
        "empirical": emp,
        "empirical_sem": sem,
        "bound_rhs": rhs,
        "ratio": abs(emp) / rhs if rhs > 0 else float("inf"),
        "d_sup_A": dsA,
        "d_sup_B": dsB,
        "d_inf": dinf,
    }


def kahane_compare(
    kernelA: CovarianceKernel,
    kernelB: CovarianceKernel,
    shiftC: float,
    gamma: float,
    mask: CellMask,
    q: float,
    n_samples: int = 2000,
    seed: int = 0,
    method: str = "dense_factor",
) -> dict:
    """Convex-order comparison: with K_A <= K_B + C pointwise, the q-th
    moment of M_A(mask) must not exceed that of exp(gamma Omega -
    gamma^2 C / 2) M_B(mask), Omega an independent N(0, C) variable.

    Verifies the pointwise kernel inequality on the grid first, then
    estimates both sides by Monte Carlo.
    """
    if shiftC < 0:
        raise ValueError("shift constant must be nonnegative")
    grid = mask.grid
    centers = mask.centers()
    take = centers if len(centers) <= 256 else centers[:: len(centers) // 256]
    ka = kernelA.evaluate(take[:, None, :], take[None, :, :])
    kb = kernelB.evaluate(take[:, None, :], take[None, :, :])
    worst = float((ka - kb - shiftC).max())
    if worst > 1e-9:
        raise ValueError(f"pointwise kernel inequality violated by {worst:.3g}")
    shift_rng = make_rng(seed, _STREAM_SHIFT)
    lhs = np.empty(n_samples)
    rhs = np.empty(n_samples)
    for k in range(n_samples):
        ma = measure_of(gmc_from_field(sample_field(kernelA, grid, seed + 7_000_000 + k, method), gamma), mask)
        mb = measure_of(gmc_from_field(sample_field(kernelB, grid, seed + 8_000_000 + k, method), gamma), mask)
        omega = shift_rng.normal(scale=np.sqrt(shiftC)) if shiftC > 0 else 0.0
        lhs[k] = ma**q
        rhs[k] = (np.exp(gamma * omega - 0.5 * gamma**2 * shiftC) * mb) ** q
    sem = lambda a: float(a.std(ddof=1) / np.sqrt(n_samples))
    return {
        "lhs_mean": float(lhs.mean()),
        "lhs_sem": sem(lhs),
        "rhs_mean": float(rhs.mean()),
        "rhs_sem": sem(rhs),
        "difference": float(lhs.mean() - rhs.mean()),
        "holds_within_error": lhs.mean() <= rhs.mean() + 3 * np.hypot(sem(lhs), sem(rhs)),
    }


@dataclass(frozen=True)
class PhiMap:
    """Folding of the rectangle [0, 2^n] x [0, 2^-n] into [0, 10]^2.

    For 2^n <= 8 the rectangle already fits and the map is the identity.
    Otherwise the long strip is folded into a serpentine: straight runs of
    length 1 - pi w (w = 2^-n the strip width) stacked at vertical pitch
    3 w, joined by half-annulus U-turns of radii in [w, 2 w].  The map is
    injective, 2-Lipschitz, piecewise smooth, with absolute Jacobian in
    [1, 2].
    """

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def width(self) -> float:
        return 2.0 ** (-self.n)

    @property
    def domain(self) -> tuple[float, float]:
        """(length, width) of the domain rectangle."""
        return (2.0**self.n, self.width)

    @property
    def identity(self) -> bool:
        return 2**self.n <= 8

    @property
    def lipschitz_bound(self) -> float:
        return 1.0 if self.identity else 2.0

    @property
    def jacobian_lower(self) -> float:
        return 1.0

    def _pieces(self, pts: np.ndarray):
        w = self.width
        S = 1.0 - np.pi * w
        u, y = pts[:, 0], pts[:, 1]
        r = np.clip(np.floor(u).astype(np.int64), 0, 2**self.n - 1)
        s = u - r
        odd = (r % 2) == 1
        turn = s > S
        alpha = np.where(turn, (s - S) / w, 0.0)
        return w, S, y, r, s, odd, turn, alpha

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.identity:
            return pts.copy()
        w, S, y, r, s, odd, turn, alpha = self._pieces(pts)
        X0 = 2 * w
        Yr = 3 * w * r
        out = np.empty_like(pts)
        # straight runs
        out[:, 0] = np.where(odd, X0 + S - s, X0 + s)
        out[:, 1] = Yr + np.where(odd, w - y, y)
        # U-turns: right turns end even rows, left turns end odd rows
        rho = np.where(odd, w + y, 2 * w - y)
        cx = np.where(odd, X0, X0 + S)
        cy = Yr + 2 * w
        tx = cx + rho * np.where(odd, -np.sin(alpha), np.sin(alpha))
        ty = cy - rho * np.cos(alpha)
        out[:, 0] = np.where(turn, tx, out[:, 0])
        out[:, 1] = np.where(turn, ty, out[:, 1])
        return out

    def jacobian(self, pts: np.ndarray) -> np.ndarray:
        """Pointwise absolute Jacobian determinant."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.identity:
            return np.ones(len(pts))
        w, _, y, _, _, odd, turn, _ = self._pieces(pts)
        rho = np.where(odd, w + y, 2 * w - y)
        return np.where(turn, rho / w, 1.0)


def phi_rectangle_map(n: int) -> PhiMap:
    """Injective bounded-distortion map of [0, 2^n] x [0, 2^-n] into
    [0, 10]^2; see :class:`PhiMap`."""
    return PhiMap(n)


def rectangle_moment_check(
    samples: list[GmcSample],
    aspects: list[float],
    q: float,
    area: float,
) -> dict:
    """q-th moments of rectangle masses at fixed area across aspect ratios.

    Rectangles are anchored at the grid origin with sides sqrt(area *
    aspect) x sqrt(area / aspect).  Reports E-hat[M(R)^q] / area^zeta(q)
    per aspect and the max/min spread, which must stay bounded if the
    moment bound is aspect-uniform.
    """
    from .grid import rectangle_mask

    grid = samples[0].grid
    gamma = samples[0].gamma
    zeta = ScalingConstants(gamma).zeta(q)
    ratios = {}
    for aspect in aspects:
        sx = np.sqrt(area * aspect)
        sy = np.sqrt(area / aspect)
        if sx > 1 or sy > 1:
            raise ValueError(f"aspect {aspect}: side exceeds 1")
        mask = rectangle_mask(grid.origin_x, grid.origin_x + sx,
                              grid.origin_y, grid.origin_y + sy, grid)
        vals = np.array([measure_of(s, mask) for s in samples])
        ratios[aspect] = float((vals**q).mean()) / area**zeta
    vals = list(ratios.values())
    return {
        "q": q,
        "zeta": zeta,
        "area": area,
        "ratios": ratios,
        "spread": max(vals) / min(vals),
    }
