"""Exact integer winding-number fields of closed polylines over grids.

Winding numbers are accumulated by a vectorized scanline sweep: every
non-horizontal edge contributes a signed crossing to the horizontal ray of
each row it spans, under the half-open vertex rule (an edge covers the rows
whose center height lies in [y_low, y_high) oriented by traversal), so no
crossing is ever double counted at a shared vertex.  Cell centers within
half a cell of the curve carry no winding value and are tracked in a
boundary mask.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import CellMask, GridMismatchError, GridSpec, Polyline, Triangle, triangle_mask


class OpenPathError(ValueError):
    """A closed polyline is required."""


class NotBrownianWarning(UserWarning):
    """A Brownian-law statistic was requested for a non-Brownian ensemble."""


@dataclass(frozen=True)
class WindingField:
    grid: GridSpec
    winding: np.ndarray  # int32, shape (ny, nx)
    boundary: np.ndarray  # bool, shape (ny, nx); cells with no winding value
    kind: str = "custom"

    def __post_init__(self):
        w = np.asarray(self.winding)
        b = np.asarray(self.boundary, dtype=bool)
        if w.shape != self.grid.shape or b.shape != self.grid.shape:
            raise ValueError("field shapes do not match the grid")
        for a in (w, b):
            a.flags.writeable = False

    @property
    def max_abs_winding(self) -> int:
        valid = self.winding[~self.boundary]
        return int(np.max(np.abs(valid))) if valid.size else 0

    def boundary_mask(self) -> CellMask:
        return CellMask(self.grid, self.boundary)

    def signed_area(self) -> float:
        """Sum of winding x cell area over non-boundary cells (discrete
        Green identity: approximates the shoelace signed area)."""
        return float(self.winding[~self.boundary].sum()) * self.grid.cell_area


def _first_center_at_or_above(v: np.ndarray, origin: float, h: float, n: int) -> np.ndarray:
    """Index of the first cell center >= v along one axis, clipped to [0, n]."""
    idx = np.ceil((np.asarray(v) - origin) / h - 0.5).astype(np.int64)
    return np.clip(idx, 0, n)


def _crossing_accumulate(verts: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Signed scanline crossing counts -> int32 winding array (ny, nx)."""
    x1, y1 = verts[:-1, 0], verts[:-1, 1]
    x2, y2 = verts[1:, 0], verts[1:, 1]
    up = y2 > y1
    lo_y = np.where(up, y1, y2)
    hi_y = np.where(up, y2, y1)
    j_lo = _first_center_at_or_above(lo_y, grid.origin_y, grid.h, grid.ny)
    j_hi = _first_center_at_or_above(hi_y, grid.origin_y, grid.h, grid.ny)
    counts = j_hi - j_lo  # horizontal edges give 0
    total = int(counts.sum())
    acc = np.zeros((grid.ny, grid.nx + 1), dtype=np.int32)
    if total == 0:
        return acc[:, : grid.nx]
    edge = np.repeat(np.arange(len(counts)), counts)
    offset = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    rows = j_lo[edge] + offset
    yc = grid.origin_y + (rows + 0.5) * grid.h
    frac = (yc - y1[edge]) / (y2[edge] - y1[edge])
    x_cross = x1[edge] + frac * (x2[edge] - x1[edge])
    sign = np.where(up[edge], np.int32(1), np.int32(-1))
    ix = _first_center_at_or_above(x_cross, grid.origin_x, grid.h, grid.nx)
    np.add.at(acc, (rows, np.zeros_like(rows)), sign)
    np.add.at(acc, (rows, ix), -sign)
    return np.cumsum(acc, axis=1, dtype=np.int32)[:, : grid.nx]


def curve_boundary_mask(verts: np.ndarray, grid: GridSpec, tol: float | None = None) -> CellMask:
    """Cells whose center lies within ``tol`` (default h/2) of the curve.

    Candidate cells are gathered from points sampled along each segment at
    spacing <= h/2, then kept by an exact point-to-segment distance test.
    """
    h = grid.h
    if tol is None:
        tol = 0.5 * h
    a, b = verts[:-1], verts[1:]
    seg = b - a
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    n_sub = np.maximum(1, np.ceil(seg_len / (0.5 * h)).astype(np.int64)) + 1
    total = int(n_sub.sum())
    edge = np.repeat(np.arange(len(a)), n_sub)
    offset = np.arange(total) - np.repeat(np.cumsum(n_sub) - n_sub, n_sub)
    frac = offset / np.maximum(n_sub[edge] - 1, 1)
    pts = a[edge] + frac[:, None] * seg[edge]

    reach = int(np.ceil(tol / h + 0.75)) + 1
    ci = np.floor((pts[:, 0] - grid.origin_x) / h - 0.5).astype(np.int64)
    cj = np.floor((pts[:, 1] - grid.origin_y) / h - 0.5).astype(np.int64)
    offs = np.arange(-reach, reach + 1)
    di, dj = np.meshgrid(offs, offs)
    cand_i = (ci[:, None] + di.ravel()[None, :]).ravel()
    cand_j = (cj[:, None] + dj.ravel()[None, :]).ravel()
    cand_e = np.repeat(edge, offs.size * offs.size)
    ok = (cand_i >= 0) & (cand_i < grid.nx) & (cand_j >= 0) & (cand_j < grid.ny)
    cand_i, cand_j, cand_e = cand_i[ok], cand_j[ok], cand_e[ok]
    # dedupe (cell, edge) pairs to keep the exact distance test small
    key = (cand_e * grid.ny + cand_j) * grid.nx + cand_i
    _, uniq = np.unique(key, return_index=True)
    cand_i, cand_j, cand_e = cand_i[uniq], cand_j[uniq], cand_e[uniq]

    cx = grid.origin_x + (cand_i + 0.5) * h
    cy = grid.origin_y + (cand_j + 0.5) * h
    ax, ay = a[cand_e, 0], a[cand_e, 1]
    sx, sy = seg[cand_e, 0], seg[cand_e, 1]
    denom = np.maximum(sx * sx + sy * sy, 1e-300)
    t = np.clip(((cx - ax) * sx + (cy - ay) * sy) / denom, 0.0, 1.0)
    d2 = (cx - (ax + t * sx)) ** 2 + (cy - (ay + t * sy)) ** 2
    hit = d2 <= tol * tol
    cells = np.zeros(grid.shape, dtype=bool)
    cells[cand_j[hit], cand_i[hit]] = True
    return CellMask(grid, cells)


def winding_field(path: Polyline, grid: GridSpec, boundary_tol: float | None = None) -> WindingField:
    """Exact winding number of the closed polyline at every cell center."""
    if not path.closed:
        raise OpenPathError("winding is defined for closed polylines")
    verts = path.closed_vertices()
    winding = _crossing_accumulate(verts, grid)
    boundary = curve_boundary_mask(verts, grid, boundary_tol).cells
    return WindingField(grid, winding, boundary, kind=path.kind)


def winding_number_at(path: Polyline, points: np.ndarray) -> np.ndarray:
    """Independent angle-accumulation oracle: the total signed turning of
    the closed polyline around each query point, divided by 2 pi."""
    verts = path.closed_vertices()
    pts = np.atleast_2d(points)
    d = verts[None, :, :] - pts[:, None, :]  # (q, m, 2)
    ang = np.arctan2(d[:, :, 1], d[:, :, 0])
    dang = np.diff(ang, axis=1)
    dang = (dang + np.pi) % (2 * np.pi) - np.pi
    return np.rint(dang.sum(axis=1) / (2 * np.pi)).astype(np.int64)


def level_set(wf: WindingField, N: int) -> CellMask:
    """D_N = {winding >= N} (N > 0) or D_{-|N|} = {winding <= N} (N < 0),
    boundary cells excluded."""
    if N == 0:
        raise ValueError("level must be nonzero")
    if N > 0:
        cells = (wf.winding >= N) & ~wf.boundary
    else:
        cells = (wf.winding <= N) & ~wf.boundary
    return CellMask(wf.grid, cells)


def level_sets(wf: WindingField, N_max: int) -> dict[int, CellMask]:
    """Masks D_N and D_{-N} for N = 1..N_max."""
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    out: dict[int, CellMask] = {}
    for N in range(1, N_max + 1):
        out[N] = level_set(wf, N)
        out[-N] = level_set(wf, -N)
    return out


def exact_level_area(wf: WindingField, n: int) -> float:
    """Area of {winding == n}, boundary cells excluded."""
    return float(((wf.winding == n) & ~wf.boundary).sum()) * wf.grid.cell_area


def werner_statistic(wfs: list[WindingField], n: int) -> dict:
    """Mean and standard error of n^2 |{theta = n}| and n |D_n| over an
    ensemble of winding fields, against the Brownian limit 1/(2 pi)."""
    if any(wf.kind != "brownian" for wf in wfs):
        warnings.warn("ensemble contains non-Brownian curves; the 1/(2 pi) "
                      "reference only applies to Brownian winding fields",
                      NotBrownianWarning, stacklevel=2)
    eq = np.array([n * n * exact_level_area(wf, n) for wf in wfs])
    ge = np.array([n * level_set(wf, n).area for wf in wfs])
    k = len(wfs)
    sem = lambda a: float(a.std(ddof=1) / np.sqrt(k)) if k > 1 else float("nan")
    return {
        "n": n,
        "n_paths": k,
        "reference": 1.0 / (2 * np.pi),
        "level_mean": float(eq.mean()),
        "level_sem": sem(eq),
        "tail_mean": float(ge.mean()),
        "tail_sem": sem(ge),
    }


def _check_same_grid(wfs: list[WindingField]) -> GridSpec:
    grid = wfs[0].grid
    for wf in wfs[1:]:
        if wf.grid != grid:
            raise GridMismatchError("winding fields live on different grids")
    return grid


def joint_pair_mask(wfs: list[WindingField], i: int, j: int, N: float, M1: float) -> CellMask:
    """{ |theta^i| >= N and |theta^j| >= M1 }, excluding every piece's
    boundary cells."""
    grid = _check_same_grid(wfs)
    excl = np.zeros(grid.shape, dtype=bool)
    for wf in wfs:
        excl |= wf.boundary
    cells = (np.abs(wfs[i].winding) >= N) & (np.abs(wfs[j].winding) >= M1) & ~excl
    return CellMask(grid, cells)


def joint_multi_mask(wfs: list[WindingField], M2: float, k: int) -> CellMask:
    """Cells where at least k distinct pieces wind at least M2 times in
    absolute value (the union over multi-indices of size k), excluding every
    piece's boundary cells."""
    grid = _check_same_grid(wfs)
    excl = np.zeros(grid.shape, dtype=bool)
    hits = np.zeros(grid.shape, dtype=np.int32)
    for wf in wfs:
        excl |= wf.boundary
        hits += (np.abs(wf.winding) >= M2).astype(np.int32)
    return CellMask(grid, (hits >= k) & ~excl)


def joint_level_sets(wfs: list[WindingField], spec: dict) -> CellMask:
    """Dispatch on a joint-set spec: {'pair': (i, j, N, M1)} or
    {'multi': (M2, k)}."""
    if "pair" in spec:
        return joint_pair_mask(wfs, *spec["pair"])
    if "multi" in spec:
        return joint_multi_mask(wfs, *spec["multi"])
    raise ValueError("spec must contain 'pair' or 'multi'")


def inclusion_check(path: Polyline, T: int, N: int, M1: int, M2: int, k: int, grid: GridSpec) -> dict:
    """Pixelwise check of the deterministic sandwich between the level set
    of the full curve and unions built from its T chord-closed pieces.

    Requires T*M2 <= N/k - T and k*M1 + (M2+1)*T < N.  Returns violation
    counts (both must be 0 for any curve).
    """
    from .curves import subdivide

    if not (T * M2 <= N / k - T):
        raise ValueError("hypothesis T*M2 <= N/k - T violated")
    if not (k * M1 + (M2 + 1) * T < N):
        raise ValueError("hypothesis k*M1 + (M2+1)*T < N violated")

    pieces, _ = subdivide(path, T)
    piece_wfs = [winding_field(p, grid) for p in pieces]
    closed_full = Polyline(path.times, path.points, closed=True, kind=path.kind)
    full_wf = winding_field(closed_full, grid)

    excl = full_wf.boundary.copy()
    for wf in piece_wfs:
        excl |= wf.boundary

    d_full = (full_wf.winding >= N) & ~excl

    def union_ge(level: float) -> np.ndarray:
        out = np.zeros(grid.shape, dtype=bool)
        for wf in piece_wfs:
            out |= wf.winding >= level
        return out

    pair_union = np.zeros(grid.shape, dtype=bool)
    abs_ge_nk = [np.abs(wf.winding) >= N / k for wf in piece_wfs]
    abs_ge_m1 = [np.abs(wf.winding) >= M1 for wf in piece_wfs]
    any_nk = np.zeros(grid.shape, dtype=bool)
    cnt_m1 = np.zeros(grid.shape, dtype=np.int32)
    for a in abs_ge_nk:
        any_nk |= a
    for a in abs_ge_m1:
        cnt_m1 += a.astype(np.int32)
    # |theta^i| >= N/k and |theta^j| >= M1 for some i != j.  Since N/k >= M1
    # is not guaranteed we form the union directly.
    for i in range(T):
        others_m1 = cnt_m1 - abs_ge_m1[i].astype(np.int32)
        pair_union |= abs_ge_nk[i] & (others_m1 >= 1)

    cnt_m2 = np.zeros(grid.shape, dtype=np.int32)
    for wf in piece_wfs:
        cnt_m2 += (np.abs(wf.winding) >= M2).astype(np.int32)
    multi_union = cnt_m2 >= k

    lower = union_ge(N + T * M1) & ~pair_union & ~excl
    upper = (union_ge(N - k * M1 - (M2 + 1) * T) | pair_union | multi_union) & ~excl

    lower_viol = int(np.count_nonzero(lower & ~d_full))
    upper_viol = int(np.count_nonzero(d_full & ~upper))
    return {
        "lower_violations": lower_viol,
        "upper_violations": upper_viol,
        "violations": lower_viol + upper_viol,
        "d_full_cells": int(np.count_nonzero(d_full)),
    }


def pointwise_chen_check(path: Polyline, s: float, u: float, t: float, grid: GridSpec) -> dict:
    """Maximum defect of theta_{s,t} = theta_{s,u} + theta_{u,t}
    + eps * 1_T over cells away from all the curves and chords involved.

    Exact integer arithmetic; the defect must be 0.
    """
    if not (s <= u <= t):
        raise ValueError("need s <= u <= t")

    def sub_wf(a: float, b: float) -> WindingField | None:
        if b - a <= 0:
            return None
        return winding_field(path.slice(a, b, closed=True), grid)

    wf_st = sub_wf(s, t)
    wf_su = sub_wf(s, u)
    wf_ut = sub_wf(u, t)
    if wf_st is None:
        return {"max_defect": 0, "checked_cells": 0, "epsilon": 0}

    zs, zu, zt = path.point_at(s), path.point_at(u), path.point_at(t)
    tri = Triangle(tuple(zs), tuple(zu), tuple(zt))
    eps = tri.orientation
    tri_cells = triangle_mask(tri, grid).cells if eps != 0 else np.zeros(grid.shape, dtype=bool)
    tri_edges = curve_boundary_mask(np.array([zs, zu, zt, zs]), grid)

    excl = wf_st.boundary | tri_edges.cells
    total = wf_st.winding.astype(np.int64).copy()
    for wf in (wf_su, wf_ut):
        if wf is not None:
            excl |= wf.boundary
            total = total - wf.winding
    total = total - eps * tri_cells.astype(np.int64)
    valid = ~excl
    defects = np.abs(total[valid])
    return {
        "max_defect": int(defects.max()) if defects.size else 0,
        "checked_cells": int(valid.sum()),
        "epsilon": eps,
    }
