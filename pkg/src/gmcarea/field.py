"""Sampling of log-correlated centered Gaussian fields on grids.

The covariance is K_eps(z, w) = log_+(1/max(|z-w|, eps)) + g(z, w) with g a
bounded smooth perturbation (g = 0 for the pure-log kernel).  Stationary
kernels are sampled exactly in distribution by circulant embedding on a
doubled torus with eigenvalue clipping; small problems can instead use a
dense symmetric factorization.  Every field records its realized per-cell
variance (post clipping), which downstream normalization relies on.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import GridSpec
from .rng import make_rng

FIELD_MAGIC = b"FLD1"
_STREAM_FIELD = 0x46494C44  # stream tag for field noise

DENSE_CELL_CAP = 4096
CLIP_FRACTION_LIMIT = 0.01


class ClippingExceeded(RuntimeError):
    """The circulant embedding clipped more than the allowed spectral mass."""


class DenseTooLarge(ValueError):
    """Dense factorization requested beyond the configured cell cap."""


class NotStationary(ValueError):
    """Circulant sampling requested for a non-stationary kernel."""


@dataclass(frozen=True)
class CovarianceKernel:
    """Log-correlated covariance with regularized diagonal.

    ``g`` takes two (n, 2) point arrays and returns (n,) values; ``g_bound``
    is a certified bound on sup|g|.  ``eps_reg`` is the mollification scale:
    distances below it are frozen, so the diagonal is log(1/eps_reg) + g(z,z).
    """

    variant: str = "pure_log"  # "pure_log" or "log_plus_smooth"
    eps_reg: float = 2.0**-9
    g: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    g_bound: float = 0.0

    def __post_init__(self):
        if self.variant not in ("pure_log", "log_plus_smooth"):
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.variant == "pure_log" and self.g is not None:
            raise ValueError("pure_log kernel must not carry a perturbation")
        if not (self.eps_reg > 0):
            raise ValueError("eps_reg must be positive")

    @property
    def stationary(self) -> bool:
        return self.variant == "pure_log"

    def log_part(self, dist: np.ndarray) -> np.ndarray:
        """log_+(1/max(dist, eps_reg)), vectorized over distances."""
        d = np.maximum(np.asarray(dist, dtype=float), self.eps_reg)
        return np.maximum(0.0, -np.log(d))

    def evaluate(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        """K_eps at point pairs; z, w broadcastable (n, 2) arrays."""
        z = np.atleast_2d(z)
        w = np.atleast_2d(w)
        d = np.hypot(z[..., 0] - w[..., 0], z[..., 1] - w[..., 1])
        out = self.log_part(d)
        if self.g is not None:
            gv = np.asarray(self.g(z, w), dtype=float)
            if not np.all(np.isfinite(gv)):
                raise ValueError("perturbation g returned non-finite values")
            out = out + gv
        return out

    @property
    def diagonal(self) -> float:
        """K_eps(z, z) without the g term; g(z, z) is added where needed."""
        return max(0.0, -np.log(self.eps_reg))


@dataclass(frozen=True)
class CovarianceTable:
    """Discretized covariance on a grid.

    Stationary kernels store one row: ``values[dj, di]`` is the covariance
    of two cells at offset (di, dj).  Otherwise ``values`` is the full
    (n_cells, n_cells) matrix in row-major cell order.
    """

    grid: GridSpec
    stationary: bool
    values: np.ndarray

    def entry(self, c: tuple[int, int], cp: tuple[int, int]) -> float:
        i, j = c
        ip, jp = cp
        if self.stationary:
            return float(self.values[abs(jp - j), abs(ip - i)])
        return float(self.values[j * self.grid.nx + i, jp * self.grid.nx + ip])


def discrete_covariance(kernel: CovarianceKernel, grid: GridSpec) -> CovarianceTable:
    """Cell-center covariance table; one stationary row for the pure-log
    kernel, the full symmetric matrix otherwise."""
    if kernel.stationary:
        dx = np.arange(grid.nx) * grid.h
        dy = np.arange(grid.ny) * grid.h
        d = np.hypot(dx[None, :], dy[:, None])
        return CovarianceTable(grid, True, kernel.log_part(d))
    if grid.n_cells > DENSE_CELL_CAP:
        raise DenseTooLarge(
            f"non-stationary table needs {grid.n_cells} cells, cap is {DENSE_CELL_CAP}")
    X, Y = grid.center_grids()
    pts = np.column_stack([X.ravel(), Y.ravel()])
    mat = kernel.evaluate(pts[:, None, :], pts[None, :, :])
    return CovarianceTable(grid, False, mat)


@dataclass(frozen=True)
class ScalarField:
    """One realization of the discretized Gaussian field.

    ``realized_variance`` is the exact per-cell variance of the sampler that
    produced the values (the post-clipping covariance diagonal), which the
    measure normalization uses to keep unit intensity exact.
    """

    grid: GridSpec
    values: np.ndarray  # float64, shape (ny, nx)
    kernel: CovarianceKernel
    seed: int
    method: str
    realized_variance: np.ndarray  # float64, shape (ny, nx)
    clipped_fraction: float = 0.0
    level: int | None = None
    eps_effective: float | None = None

    def __post_init__(self):
        for name in ("values", "realized_variance"):
            a = np.ascontiguousarray(getattr(self, name), dtype=float)
            if a.shape != self.grid.shape:
                raise ValueError(f"{name} shape {a.shape} != grid shape {self.grid.shape}")
            if not np.all(np.isfinite(a)):
                raise ValueError(f"{name} contains non-finite entries")
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    def to_bytes(self) -> bytes:
        head = struct.pack("<4sII3d", FIELD_MAGIC, self.grid.nx, self.grid.ny,
                           self.grid.origin_x, self.grid.origin_y, self.grid.h)
        return head + self.values.astype("<f8").tobytes()

    def to_csv(self) -> str:
        X, Y = self.grid.center_grids()
        lines = ["x,y,value"]
        for x, y, v in zip(X.ravel(), Y.ravel(), self.values.ravel()):
            lines.append(f"{float(x)!r},{float(y)!r},{float(v)!r}")
        return "\n".join(lines) + "\n"


def field_values_from_bytes(data: bytes) -> tuple[GridSpec, np.ndarray]:
    magic, nx, ny, ox, oy, h = struct.unpack_from("<4sII3d", data, 0)
    if magic != FIELD_MAGIC:
        raise ValueError("bad field magic")
    off = struct.calcsize("<4sII3d")
    vals = np.frombuffer(data, dtype="<f8", count=nx * ny, offset=off).reshape(ny, nx)
    return GridSpec(ox, oy, h, nx, ny), vals.copy()


_symbol_cache: dict[tuple, tuple[np.ndarray, float]] = {}


def _circulant_symbol(kernel: CovarianceKernel, grid: GridSpec) -> tuple[np.ndarray, float]:
    """Clipped eigenvalue array on the doubled torus and the clipped
    spectral mass fraction."""
    key = (kernel.eps_reg, grid.h, grid.nx, grid.ny)
    hit = _symbol_cache.get(key)
    if hit is not None:
        return hit
    mx, my = 2 * grid.nx, 2 * grid.ny
    ix = np.minimum(np.arange(mx), mx - np.arange(mx))
    iy = np.minimum(np.arange(my), my - np.arange(my))
    d = np.hypot(ix[None, :] * grid.h, iy[:, None] * grid.h)
    base = kernel.log_part(d)
    lam = np.fft.fft2(base).real
    neg = -lam[lam < 0].sum()
    total = np.abs(lam).sum()
    frac = float(neg / total) if total > 0 else 0.0
    if frac > CLIP_FRACTION_LIMIT:
        raise ClippingExceeded(
            f"clipped spectral mass fraction {frac:.3%} exceeds {CLIP_FRACTION_LIMIT:.0%}")
    lam = np.maximum(lam, 0.0)
    if len(_symbol_cache) > 16:
        _symbol_cache.clear()
    _symbol_cache[key] = (lam, frac)
    return lam, frac


def _spectral_noise(lam: np.ndarray, seed: int) -> np.ndarray:
    rng = make_rng(seed, _STREAM_FIELD)
    w = rng.normal(size=lam.shape) + 1j * rng.normal(size=lam.shape)
    return np.sqrt(lam) * w


_dense_cache: dict[tuple, tuple[np.ndarray, np.ndarray, float]] = {}


def _dense_factor(kernel: CovarianceKernel, grid: GridSpec) -> tuple[np.ndarray, np.ndarray, float]:
    """Symmetric square root of the covariance matrix with eigenvalue
    clipping; returns (factor, realized diagonal, clipped fraction)."""
    key = (kernel.variant, kernel.eps_reg, id(kernel.g), kernel.g_bound, grid)
    hit = _dense_cache.get(key)
    if hit is not None:
        return hit
    table = discrete_covariance(kernel, grid)
    if table.stationary:
        # expand the stationary row into the full matrix
        ii, jj = np.meshgrid(np.arange(grid.nx), np.arange(grid.ny))
        fi, fj = ii.ravel(), jj.ravel()
        mat = table.values[np.abs(fj[:, None] - fj[None, :]), np.abs(fi[:, None] - fi[None, :])]
    else:
        mat = table.values
    w, v = np.linalg.eigh(mat)
    neg = -w[w < 0].sum()
    total = np.abs(w).sum()
    frac = float(neg / total) if total > 0 else 0.0
    if frac > CLIP_FRACTION_LIMIT:
        raise ClippingExceeded(
            f"clipped eigenvalue mass fraction {frac:.3%} exceeds {CLIP_FRACTION_LIMIT:.0%}")
    w = np.maximum(w, 0.0)
    factor = v * np.sqrt(w)[None, :]
    diag = (factor * factor).sum(axis=1)
    if len(_dense_cache) > 8:
        _dense_cache.clear()
    _dense_cache[key] = (factor, diag, frac)
    return factor, diag, frac


def sample_field(
    kernel: CovarianceKernel,
    grid: GridSpec,
    seed: int,
    method: str = "circulant",
) -> ScalarField:
    """One centered Gaussian field realization on the grid.

    ``circulant`` embeds the stationary kernel on a torus of doubled side
    and synthesizes the field spectrally; ``dense_factor`` factorizes the
    covariance matrix directly (small grids only, works for any kernel).
    """
    if method == "circulant":
        if not kernel.stationary:
            raise NotStationary("circulant sampling needs a stationary (pure_log) kernel")
        lam, frac = _circulant_symbol(kernel, grid)
        y = _spectral_noise(lam, seed)
        full = np.fft.ifft2(y).real * np.sqrt(lam.size)
        vals = full[: grid.ny, : grid.nx]
        var = np.full(grid.shape, float(lam.mean()))
        return ScalarField(grid, vals, kernel, seed, method, var, frac,
                           eps_effective=kernel.eps_reg)
    if method == "dense_factor":
        if grid.n_cells > DENSE_CELL_CAP:
            raise DenseTooLarge(f"{grid.n_cells} cells exceed dense cap {DENSE_CELL_CAP}")
        factor, diag, frac = _dense_factor(kernel, grid)
        rng = make_rng(seed, _STREAM_FIELD)
        z = rng.normal(size=grid.n_cells)
        vals = (factor @ z).reshape(grid.shape)
        return ScalarField(grid, vals, kernel, seed, method, diag.reshape(grid.shape),
                           frac, eps_effective=kernel.eps_reg)
    raise ValueError(f"unknown sampling method {method!r}")


def _box_symbol(width_cells: int, shape: tuple[int, int]) -> np.ndarray:
    """Fourier symbol of the normalized square box kernel of odd width."""
    my, mx = shape
    box = np.zeros(shape)
    k = width_cells // 2
    wx = np.r_[0 : k + 1, mx - k : mx] if k > 0 else np.array([0])
    wy = np.r_[0 : k + 1, my - k : my] if k > 0 else np.array([0])
    box[np.ix_(wy % my, wx % mx)] = 1.0 / ((2 * k + 1) ** 2)
    return np.fft.fft2(box)


def sample_field_hierarchy(
    kernel: CovarianceKernel,
    grid: GridSpec,
    seed: int,
    levels: int,
) -> list[ScalarField]:
    """Coupled mollification hierarchy; level ell in 1..levels has effective
    scale eps_ell = eps_reg * 2^(levels - ell).

    A single spectral noise drives all levels: coarser fields are the box
    smoothing of the finest one, so masses built from them are L2-Cauchy.
    The last entry (ell = levels) equals ``sample_field`` at the same seed.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if not kernel.stationary:
        raise NotStationary("the hierarchy uses circulant sampling")
    lam, frac = _circulant_symbol(kernel, grid)
    y = _spectral_noise(lam, seed)
    out: list[ScalarField] = []
    for ell in range(1, levels + 1):
        eps_ell = kernel.eps_reg * 2.0 ** (levels - ell)
        width = max(1, int(round(eps_ell / grid.h)))
        if width % 2 == 0:
            width += 1
        if width == 1:
            lam_eff = lam
            y_eff = y
        else:
            sym = _box_symbol(width, lam.shape)
            lam_eff = lam * np.abs(sym) ** 2
            y_eff = y * sym
        full = np.fft.ifft2(y_eff).real * np.sqrt(lam.size)
        vals = full[: grid.ny, : grid.nx]
        var = np.full(grid.shape, float(lam_eff.mean()))
        out.append(ScalarField(grid, vals, kernel, seed, "circulant", var, frac,
                               level=ell, eps_effective=eps_ell))
    return out
