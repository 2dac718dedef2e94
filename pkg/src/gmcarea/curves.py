"""Curve generators: Brownian polylines, circle chains, subdivision.

Brownian paths are exact at their vertices (independent Gaussian
increments) and linear in between, so every winding and level-set
computation downstream is an exact polygon computation.
"""

from __future__ import annotations

import numpy as np

from .grid import Polyline
from .rng import make_rng


def sample_brownian(n_steps: int, seed: int, horizon: tuple[float, float] = (0.0, 1.0)) -> Polyline:
    """Planar Brownian polyline started at the origin.

    Vertices at t_k = t0 + k (t1 - t0) / n_steps with exact N(0, dt I)
    increments; deterministic per seed.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    t0, t1 = horizon
    rng = make_rng(seed, 0x42524F57)  # stream tag for Brownian increments
    dt = (t1 - t0) / n_steps
    incs = rng.normal(scale=np.sqrt(dt), size=(n_steps, 2))
    pts = np.vstack([[0.0, 0.0], np.cumsum(incs, axis=0)])
    times = t0 + np.arange(n_steps + 1) * dt
    times[-1] = t1
    return Polyline(times, pts, closed=False, kind="brownian", seed=seed)


def circle_chain(
    alpha_prime: float,
    m: int,
    verts_per_circle: int | None = None,
    grid_h: float | None = None,
    holder_alpha: float | None = None,
) -> Polyline:
    """Closed chain of nested circles tangent at the origin.

    Circle k (k = 1..m) has center (0, k^{-a'}) and radius k^{-a'}; the
    curve goes once counterclockwise along each circle in sequence, so the
    winding number equals N strictly between circle N and circle N+1.

    Vertex density: ``verts_per_circle`` fixed, or derived from ``grid_h``
    so that the chord sagitta stays below h/2.  Time parametrization is
    uniform per circle by default; with ``holder_alpha`` set, circle k gets
    a time slot proportional to radius^(1/alpha), which keeps the discrete
    Holder seminorm of exponent ``holder_alpha`` bounded.
    """
    if alpha_prime <= 0.5:
        raise ValueError("decay exponent must exceed 1/2")
    if m < 1:
        raise ValueError("need at least one circle")
    radii = np.arange(1, m + 1, dtype=float) ** (-alpha_prime)
    if holder_alpha is not None:
        weights = radii ** (1.0 / holder_alpha)
    else:
        weights = np.ones(m)
    slots = np.concatenate([[0.0], np.cumsum(weights / weights.sum())])
    slots[-1] = 1.0

    times: list[np.ndarray] = []
    pts: list[np.ndarray] = []
    for k in range(m):
        r = radii[k]
        if verts_per_circle is not None:
            nv = verts_per_circle
        elif grid_h is not None:
            # sagitta r (1 - cos(d/2)) ~ r d^2 / 8 < h/2  =>  d < 2 sqrt(h / r)
            nv = int(np.ceil(2 * np.pi / (2 * np.sqrt(grid_h / r))))
        else:
            nv = 64
        nv = max(16, nv)
        # start and end at the origin: angle -pi/2 around center (0, r)
        ang = -np.pi / 2 + 2 * np.pi * np.arange(nv) / nv
        circle = np.column_stack([r * np.cos(ang), r + r * np.sin(ang)])
        circle[0] = [0.0, 0.0]  # exact tangency point
        tt = slots[k] + (slots[k + 1] - slots[k]) * np.arange(nv) / nv
        times.append(tt)
        pts.append(circle)
    times.append(np.array([1.0]))
    pts.append(np.array([[0.0, 0.0]]))
    return Polyline(np.concatenate(times), np.vstack(pts), closed=True, kind="circle_chain")


def chain_level_area(alpha_prime: float, n: int) -> float:
    """Exact area of the region where the chain winds exactly n times."""
    return np.pi * (n ** (-2 * alpha_prime) - (n + 1) ** (-2 * alpha_prime))


def subdivide(path: Polyline, T: int) -> tuple[list[Polyline], Polyline]:
    """Split a path over [t0, t1] into T chord-closed pieces.

    Returns the pieces (each closed by the segment between its endpoints)
    and the closing polygon through the piece endpoints.  Concatenating the
    open pieces reproduces the original vertex list; the sum of the pieces'
    windings plus the closing polygon's winding equals the winding of the
    chord-closed full path, away from all the segments involved.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    t0, t1 = path.t0, path.t1
    cuts = t0 + (t1 - t0) * np.arange(T + 1) / T
    cuts[-1] = t1
    pieces = [path.slice(cuts[i], cuts[i + 1], closed=True) for i in range(T)]
    endpoints = np.vstack([p.points[0] for p in pieces] + [pieces[-1].points[-1]])
    closing = Polyline(np.arange(T + 1, dtype=float), endpoints, closed=True, kind="closing_chain")
    return pieces, closing


def holder_seminorm(path: Polyline, alpha: float, max_pairs: int = 30_000_000) -> float:
    """Discrete Holder seminorm max |z_t - z_s| / (t - s)^alpha.

    Exact over all vertex pairs when affordable; for long paths the maximum
    is taken over a geometric ladder of vertex lags, which is a lower bound
    that is tight in practice because the extremal pair sits at small lag.
    """
    if not (0 < alpha <= 1):
        raise ValueError("alpha must be in (0, 1]")
    n = path.n_vertices
    t, p = path.times, path.points
    if n * (n - 1) // 2 <= max_pairs:
        lags = range(1, n)
    else:
        lagset = set()
        lag = 1
        while lag < n:
            lagset.update((lag, lag + 1))
            lag = int(np.ceil(lag * 1.25))
        lags = sorted(l for l in lagset if l < n)
    best = 0.0
    for lag in lags:
        d = np.hypot(*(p[lag:] - p[:-lag]).T)
        dt = t[lag:] - t[:-lag]
        best = max(best, float(np.max(d / dt**alpha)))
    return best


def archimedean_spiral(
    turns: float, n_vertices: int = 2048, outer_radius: float = 1.0, center: tuple[float, float] = (0.0, 0.0)
) -> Polyline:
    """Closed spiral winding ``turns`` times; an adversarial non-Brownian
    test curve for the deterministic inclusion identities."""
    ang = 2 * np.pi * turns * np.arange(n_vertices) / n_vertices
    r = outer_radius * (0.02 + 0.98 * np.arange(n_vertices) / n_vertices)
    pts = np.column_stack([center[0] + r * np.cos(ang), center[1] + r * np.sin(ang)])
    times = np.arange(n_vertices, dtype=float) / n_vertices
    return Polyline(times, pts, closed=True, kind="spiral")
