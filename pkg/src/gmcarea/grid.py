"""Planar grids, cell masks, polylines, triangles and rectangles.

Everything downstream (fields, measures, winding fields) lives on a single
shared :class:`GridSpec` per experiment; cross-grid operations raise
:class:`GridMismatchError`.  The point-in-region rule is uniform: a cell
belongs to a region iff its *center* lies strictly inside, centers on an
edge are excluded.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np

MASK_MAGIC = b"CMK1"


class GridMismatchError(ValueError):
    """Two objects that must share a grid do not."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform square-cell grid over a rectangular window.

    Cell (i, j) has center (origin_x + (i + 1/2) h, origin_y + (j + 1/2) h)
    for 0 <= i < nx, 0 <= j < ny.  Arrays indexed over cells are row-major
    with shape (ny, nx), i.e. ``a[j, i]``.
    """

    origin_x: float
    origin_y: float
    h: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.h > 0):
            raise ValueError(f"cell size must be positive, got {self.h}")
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"grid must have at least one cell, got {self.nx}x{self.ny}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def x_max(self) -> float:
        return self.origin_x + self.nx * self.h

    @property
    def y_max(self) -> float:
        return self.origin_y + self.ny * self.h

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return (self.origin_x + (i + 0.5) * self.h, self.origin_y + (j + 0.5) * self.h)

    def center_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """1-D arrays of cell-center x (len nx) and y (len ny) coordinates."""
        xs = self.origin_x + (np.arange(self.nx) + 0.5) * self.h
        ys = self.origin_y + (np.arange(self.ny) + 0.5) * self.h
        return xs, ys

    def center_grids(self) -> tuple[np.ndarray, np.ndarray]:
        """(ny, nx) arrays X, Y of all cell-center coordinates."""
        xs, ys = self.center_coords()
        return np.meshgrid(xs, ys)

    def empty_mask(self) -> "CellMask":
        return CellMask(self, np.zeros(self.shape, dtype=bool))

    def full_mask(self) -> "CellMask":
        return CellMask(self, np.ones(self.shape, dtype=bool))


def _frozen_array(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class CellMask:
    """Boolean subset of a grid's cells; immutable after construction."""

    grid: GridSpec
    cells: np.ndarray  # bool, shape (ny, nx)

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=bool)
        if cells.shape != self.grid.shape:
            raise ValueError(f"mask shape {cells.shape} != grid shape {self.grid.shape}")
        object.__setattr__(self, "cells", _frozen_array(cells))

    def _check(self, other: "CellMask") -> None:
        if other.grid != self.grid:
            raise GridMismatchError("masks live on different grids")

    @property
    def count(self) -> int:
        return int(self.cells.sum())

    @property
    def area(self) -> float:
        return self.count * self.grid.cell_area

    def union(self, other: "CellMask") -> "CellMask":
        self._check(other)
        return CellMask(self.grid, self.cells | other.cells)

    def intersection(self, other: "CellMask") -> "CellMask":
        self._check(other)
        return CellMask(self.grid, self.cells & other.cells)

    def difference(self, other: "CellMask") -> "CellMask":
        self._check(other)
        return CellMask(self.grid, self.cells & ~other.cells)

    def complement(self) -> "CellMask":
        return CellMask(self.grid, ~self.cells)

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def centers(self) -> np.ndarray:
        """(k, 2) coordinates of the centers of the true cells."""
        jj, ii = np.nonzero(self.cells)
        xs, ys = self.grid.center_coords()
        return np.column_stack([xs[ii], ys[jj]])

    # -- serialization: 16-byte header + run-length-encoded payload --------

    def to_bytes(self) -> bytes:
        flat = self.cells.ravel()
        # run lengths of alternating values, starting with flat[0]
        changes = np.flatnonzero(np.diff(flat.view(np.int8)))
        bounds = np.concatenate([[0], changes + 1, [flat.size]])
        runs = np.diff(bounds).astype(np.uint32)
        buf = io.BytesIO()
        buf.write(MASK_MAGIC)
        buf.write(struct.pack("<HH", self.grid.nx, self.grid.ny))
        buf.write(struct.pack("<d", self.grid.h))
        buf.write(struct.pack("<IB", len(runs), int(flat[0]) if flat.size else 0))
        buf.write(runs.tobytes())
        return buf.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes, origin_x: float = 0.0, origin_y: float = 0.0) -> "CellMask":
        if data[:4] != MASK_MAGIC:
            raise ValueError("bad mask magic")
        nx, ny = struct.unpack_from("<HH", data, 4)
        (h,) = struct.unpack_from("<d", data, 8)
        n_runs, first = struct.unpack_from("<IB", data, 16)
        runs = np.frombuffer(data, dtype=np.uint32, count=n_runs, offset=21)
        flat = np.zeros(nx * ny, dtype=bool)
        pos = 0
        val = bool(first)
        for r in runs:
            if val:
                flat[pos : pos + r] = True
            pos += int(r)
            val = not val
        grid = GridSpec(origin_x, origin_y, h, nx, ny)
        return cls(grid, flat.reshape(ny, nx))


@dataclass(frozen=True)
class Triangle:
    """Triangle given by three planar vertices."""

    z1: tuple[float, float]
    z2: tuple[float, float]
    z3: tuple[float, float]

    @property
    def orientation(self) -> int:
        """+1 counterclockwise, -1 clockwise, 0 degenerate (collinear)."""
        (x1, y1), (x2, y2), (x3, y3) = self.z1, self.z2, self.z3
        cross = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)
        return int(np.sign(cross))

    @property
    def signed_area(self) -> float:
        (x1, y1), (x2, y2), (x3, y3) = self.z1, self.z2, self.z3
        return 0.5 * ((x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1))

    @property
    def perimeter(self) -> float:
        p = np.array([self.z1, self.z2, self.z3, self.z1])
        return float(np.sum(np.hypot(*np.diff(p, axis=0).T)))


@dataclass(frozen=True)
class Polyline:
    """Time-parametrized planar polyline.

    ``times`` strictly increasing, ``points`` of shape (n, 2).  When
    ``closed`` is true the straight segment from the last vertex back to the
    first is appended once when the curve is traversed (the chord closure).
    """

    times: np.ndarray
    points: np.ndarray
    closed: bool = False
    kind: str = "custom"
    seed: int | None = field(default=None, compare=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.points, dtype=float)
        if t.ndim != 1 or p.ndim != 2 or p.shape[1] != 2 or len(t) != len(p):
            raise ValueError("need times (n,) and points (n, 2)")
        if len(t) < 2:
            raise ValueError("polyline needs at least 2 vertices")
        if not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", _frozen_array(t))
        object.__setattr__(self, "points", _frozen_array(p))

    @property
    def n_vertices(self) -> int:
        return len(self.times)

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t1(self) -> float:
        return float(self.times[-1])

    def closed_vertices(self) -> np.ndarray:
        """Vertex array with the closing vertex appended when closed."""
        if self.closed and not np.array_equal(self.points[0], self.points[-1]):
            return np.vstack([self.points, self.points[:1]])
        return self.points

    def length(self) -> float:
        v = self.closed_vertices()
        return float(np.sum(np.hypot(*np.diff(v, axis=0).T)))

    def bounding_box(self) -> tuple[float, float, float, float]:
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        return (float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1]))

    def point_at(self, t: float) -> np.ndarray:
        """Linear interpolation along the open polyline."""
        x = np.interp(t, self.times, self.points[:, 0])
        y = np.interp(t, self.times, self.points[:, 1])
        return np.array([x, y])

    def slice(self, s: float, t: float, closed: bool = True) -> "Polyline":
        """Restriction to [s, t], interpolating at both ends."""
        if not (self.t0 - 1e-12 <= s <= t <= self.t1 + 1e-12):
            raise ValueError(f"[{s}, {t}] outside horizon [{self.t0}, {self.t1}]")
        s = min(max(s, self.t0), self.t1)
        t = min(max(t, self.t0), self.t1)
        if t <= s:
            raise ValueError("empty time slice")
        inside = (self.times > s) & (self.times < t)
        ts = np.concatenate([[s], self.times[inside], [t]])
        ps = np.vstack([self.point_at(s), self.points[inside], self.point_at(t)])
        # interpolation may duplicate an existing vertex at the boundary
        keep = np.concatenate([[True], np.diff(ts) > 0])
        return Polyline(ts[keep], ps[keep], closed=closed, kind=self.kind, seed=self.seed)

    def reversed(self) -> "Polyline":
        t = self.times[-1] + self.times[0] - self.times[::-1]
        return Polyline(t, self.points[::-1], closed=self.closed, kind=self.kind, seed=self.seed)

    def to_csv(self) -> str:
        lines = ["t,x,y"]
        for t, (x, y) in zip(self.times, self.points):
            lines.append(f"{float(t)!r},{float(x)!r},{float(y)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str, closed: bool = False) -> "Polyline":
        rows = [r for r in text.strip().splitlines()[1:] if r]
        data = np.array([[float(v) for v in r.split(",")] for r in rows])
        return cls(data[:, 0], data[:, 1:3], closed=closed)

    def to_bytes(self) -> bytes:
        kind = self.kind.encode()
        head = struct.pack("<4sIBB", b"PLY1", self.n_vertices, int(self.closed),
                           len(kind)) + kind
        body = np.column_stack([self.times, self.points]).astype("<f8").tobytes()
        return head + body

    @classmethod
    def from_bytes(cls, data: bytes) -> "Polyline":
        magic, n, closed, klen = struct.unpack_from("<4sIBB", data, 0)
        if magic != b"PLY1":
            raise ValueError("bad polyline magic")
        kind = data[10:10 + klen].decode()
        arr = np.frombuffer(data, dtype="<f8", count=3 * n,
                            offset=10 + klen).reshape(n, 3)
        return cls(arr[:, 0], arr[:, 1:3], closed=bool(closed), kind=kind)


def triangle_mask(tri: Triangle, grid: GridSpec) -> CellMask:
    """Cells whose centers lie strictly inside the triangle.

    Centers on an edge are excluded; a degenerate triangle gives an empty
    mask.
    """
    orient = tri.orientation
    if orient == 0:
        return grid.empty_mask()
    X, Y = grid.center_grids()
    verts = [tri.z1, tri.z2, tri.z3]
    inside = np.ones(grid.shape, dtype=bool)
    for k in range(3):
        (ax, ay), (bx, by) = verts[k], verts[(k + 1) % 3]
        side = (bx - ax) * (Y - ay) - (by - ay) * (X - ax)
        inside &= (orient * side) > 0
    return CellMask(grid, inside)


def rectangle_mask(x_lo: float, x_hi: float, y_lo: float, y_hi: float, grid: GridSpec) -> CellMask:
    """Cells whose centers lie strictly inside the open rectangle."""
    if x_lo > x_hi or y_lo > y_hi:
        raise ValueError("rectangle bounds must be ordered")
    xs, ys = grid.center_coords()
    in_x = (xs > x_lo) & (xs < x_hi)
    in_y = (ys > y_lo) & (ys < y_hi)
    return CellMask(grid, in_y[:, None] & in_x[None, :])


def shift_mask(mask: CellMask, dz: tuple[int, int]) -> tuple[CellMask, int]:
    """Translate a mask by (dx, dy) whole cells.

    Cells shifted off the grid are dropped; returns the shifted mask and the
    number of dropped cells.
    """
    dx, dy = int(dz[0]), int(dz[1])
    ny, nx = mask.grid.shape
    out = np.zeros((ny, nx), dtype=bool)
    src_x = slice(max(0, -dx), min(nx, nx - dx))
    src_y = slice(max(0, -dy), min(ny, ny - dy))
    dst_x = slice(max(0, dx), min(nx, nx + dx))
    dst_y = slice(max(0, dy), min(ny, ny + dy))
    out[dst_y, dst_x] = mask.cells[src_y, src_x]
    dropped = mask.count - int(out.sum())
    return CellMask(mask.grid, out), dropped
