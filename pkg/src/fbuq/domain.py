"""Discretized parameter domains and basis-function families.

A :class:`DomainGrid` is a finite lattice of parameters ordered row-major over
its axes; every index-valued set used elsewhere in the package refers to this
ordering.  A :class:`BasisFamily` evaluated on a grid yields an ``N x R``
matrix whose column ``r`` holds basis function ``r`` at every grid point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import itertools
import math
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

__all__ = [
    "DomainGrid",
    "BasisFamily",
    "DesignMatrix",
    "build_grid",
    "matern32",
    "eval_basis",
    "vandermonde",
    "haar_index",
]

DEFAULT_FREQUENCY_STEP = 0.05 * math.pi


@dataclass(frozen=True, eq=False)
class DomainGrid:
    """Finite set of ``N`` distinct points in ``R^n``.

    Parameters
    ----------
    points : array_like, shape (N, n)
    bounds : array_like, shape (n, 2)
        Per-axis ``[lo, hi]`` box containing every point.
    points_per_axis : tuple of int
        Lattice shape; its product must equal ``N``.
    """

    points: np.ndarray
    bounds: np.ndarray
    points_per_axis: tuple

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2:
            raise ValueError("points must be a 2-D array")
        bnd = np.asarray(self.bounds, dtype=float).reshape(-1, 2)
        ppa = tuple(int(p) for p in self.points_per_axis)
        if bnd.shape[0] != pts.shape[1] or len(ppa) != pts.shape[1]:
            raise ValueError("bounds / points_per_axis do not match the point dimension")
        if pts.shape[0] < 1 or math.prod(ppa) != pts.shape[0]:
            raise ValueError("number of points must equal prod(points_per_axis) >= 1")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(bnd)):
            raise ValueError("grid points and bounds must be finite")
        if np.any(pts < bnd[:, 0]) or np.any(pts > bnd[:, 1]):
            raise ValueError("grid point outside bounds")
        if len(np.unique(pts, axis=0)) != pts.shape[0]:
            raise ValueError("grid points must be distinct")
        if pts.shape[1] == 1 and np.any(np.diff(pts[:, 0]) <= 0):
            raise ValueError("1-D grid points must be strictly increasing")
        pts.setflags(write=False)
        bnd.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "bounds", bnd)
        object.__setattr__(self, "points_per_axis", ppa)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def ndim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.size

    def index_of(self, a, atol: float = 1e-12) -> int:
        """Grid index of parameter ``a``; raises ``KeyError`` when off-grid."""
        a = np.asarray(a, dtype=float).reshape(-1)
        if a.shape[0] != self.ndim:
            raise KeyError(f"parameter {a} has wrong dimension")
        dist = np.max(np.abs(self.points - a), axis=1)
        idx = int(np.argmin(dist))
        if dist[idx] > atol * (1.0 + np.max(np.abs(a))):
            raise KeyError(f"parameter {a.tolist()} is not a grid point")
        return idx

    def nearest_index(self, a) -> int:
        a = np.asarray(a, dtype=float).reshape(-1)
        return int(np.argmin(np.linalg.norm(self.points - a, axis=1)))


def build_grid(bounds: Sequence[Sequence[float]], points_per_axis: Sequence[int]) -> DomainGrid:
    """Row-major lattice of equidistant points.

    >>> build_grid([[0, 1]], [3]).points.ravel().tolist()
    [0.0, 0.5, 1.0]
    """
    bnd = np.asarray(bounds, dtype=float).reshape(-1, 2)
    ppa = [int(p) for p in points_per_axis]
    if len(ppa) != bnd.shape[0]:
        raise ValueError("one point count per axis is required")
    if not np.all(np.isfinite(bnd)):
        raise ValueError("bounds must be finite")
    axes = []
    for (lo, hi), n in zip(bnd, ppa):
        if n < 1:
            raise ValueError("each axis needs at least one point")
        if n == 1:
            if lo != hi:
                raise ValueError("a single-point axis requires lo == hi")
            axes.append(np.array([lo]))
        else:
            if not lo < hi:
                raise ValueError("axis bounds must satisfy lo < hi")
            axes.append(np.linspace(lo, hi, n))
    pts = np.array(list(itertools.product(*axes)), dtype=float)
    return DomainGrid(pts, bnd, tuple(ppa))


def matern32(x: np.ndarray, y: np.ndarray, lengthscale: float) -> np.ndarray:
    """Unit-variance Matern-3/2 kernel matrix between row sets ``x`` and ``y``."""
    r = cdist(np.atleast_2d(x), np.atleast_2d(y)) * (math.sqrt(3.0) / lengthscale)
    return (1.0 + r) * np.exp(-r)


def haar_index(r: int) -> tuple[int, int]:
    """Map column ``r >= 1`` to its ``(level, shift)`` wavelet index."""
    level = int(r).bit_length() - 1
    return level, r - (1 << level)


@dataclass(frozen=True)
class BasisFamily:
    """Family of ``R`` fixed basis functions.

    ``kind`` is one of ``"kernel_sections"``, ``"trigonometric"`` or
    ``"haar"``.  ``size`` of ``None`` means one function per grid point.
    """

    kind: str
    size: int | None = None
    kernel: str = "matern32"
    lengthscale: float = 1e-2
    frequency_step: float = DEFAULT_FREQUENCY_STEP

    def __post_init__(self):
        if self.kind not in ("kernel_sections", "trigonometric", "haar"):
            raise ValueError(f"unknown basis kind {self.kind!r}")
        if self.size is not None and self.size < 1:
            raise ValueError("basis size must be positive")
        if self.kind == "kernel_sections":
            if self.kernel != "matern32":
                raise ValueError(f"unsupported kernel {self.kernel!r}")
            if not (self.lengthscale > 0 and math.isfinite(self.lengthscale)):
                raise ValueError("kernel lengthscale must be positive")
        if self.kind == "trigonometric" and not math.isfinite(self.frequency_step):
            raise ValueError("frequency step must be finite")

    def num_functions(self, grid: DomainGrid) -> int:
        if self.kind == "kernel_sections":
            if self.size not in (None, grid.size):
                raise ValueError("kernel sections are centred on every grid point")
            return grid.size
        return grid.size if self.size is None else int(self.size)

    def evaluate(self, grid: DomainGrid, x: np.ndarray) -> np.ndarray:
        """Evaluate all basis functions at the rows of ``x``; shape (len(x), R)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        R = self.num_functions(grid)
        if self.kind == "kernel_sections":
            return matern32(grid.points, x, self.lengthscale).T
        if grid.ndim != 1:
            raise ValueError(f"{self.kind} basis is only defined on 1-D domains")
        if self.kind == "trigonometric":
            return np.cos(self.frequency_step * np.outer(x[:, 0], np.arange(R)))
        return _haar_columns(x[:, 0], grid.bounds[0], R)


def _haar_columns(x: np.ndarray, bounds: np.ndarray, R: int) -> np.ndarray:
    lo, hi = bounds
    span = hi - lo
    u = (x - lo) / span if span > 0 else np.zeros_like(x)
    # the right endpoint joins the last dyadic cell
    u = np.clip(u, 0.0, np.nextafter(1.0, 0.0))
    out = np.empty((x.shape[0], R))
    out[:, 0] = 1.0
    for r in range(1, R):
        level, shift = haar_index(r)
        z = u * (1 << level) - shift
        scale = 2.0 ** (level / 2.0)
        out[:, r] = np.where((z >= 0) & (z < 0.5), scale, np.where((z >= 0.5) & (z < 1.0), -scale, 0.0))
    return out


def eval_basis(family: BasisFamily, grid: DomainGrid) -> np.ndarray:
    """``N x R`` matrix of every basis function at every grid point."""
    return family.evaluate(grid, grid.points)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Generalized Vandermonde matrix ``entries[t, r] = phi_r(a_t)``."""

    entries: np.ndarray
    row_indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def shape(self):
        return self.entries.shape


def vandermonde(family: BasisFamily, grid: DomainGrid, sampled, basis_matrix: np.ndarray | None = None) -> DesignMatrix:
    """Design matrix for sampled parameters.

    ``sampled`` holds either grid indices (integers) or parameter vectors;
    every entry must be a grid point.  Rows are copied from the full basis
    matrix so they agree with :func:`eval_basis` exactly.
    """
    idx = _as_indices(grid, sampled)
    B = eval_basis(family, grid) if basis_matrix is None else basis_matrix
    return DesignMatrix(B[idx].copy(), idx)


def _as_indices(grid: DomainGrid, sampled) -> np.ndarray:
    arr = np.asarray(sampled)
    if arr.size == 0:
        return np.zeros(0, dtype=int)
    if np.issubdtype(arr.dtype, np.integer):
        idx = arr.reshape(-1).astype(int)
        if np.any(idx < 0) or np.any(idx >= grid.size):
            raise KeyError("grid index out of range")
        return idx
    arr = np.asarray(arr, dtype=float).reshape(-1, grid.ndim)
    return np.array([grid.index_of(a) for a in arr], dtype=int)
