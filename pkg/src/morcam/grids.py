"""Cell-centered grids on a truncated box and complex fields living on them.

Grid nodes are cell centers offset by h/2 in every coordinate, so no node
sits at the origin and weights like 1/|x|, 1/|x|^2, 1/|x|^3 stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = ["RadialGrid", "ScalarField", "save_field", "load_field"]


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    """Uniform cell-centered grid on [-L, L]^n with spacing h.

    1-D node coordinates are -L + (i + 1/2)h for i = 0..m-1 with m = 2L/h;
    L/h must be an integer.  Radial shells are bins of thickness h in |x|,
    shell k collecting nodes with k*h <= |x| < (k+1)*h.
    """

    n: int
    L: float
    h: float

    def __post_init__(self):
        if self.n < 1:
            raise GridError(f"dimension must be >= 1, got {self.n}")
        if self.L <= 0 or self.h <= 0:
            raise GridError("L and h must be positive")
        ratio = self.L / self.h
        if abs(ratio - round(ratio)) > 1e-9:
            raise GridError(f"L/h must be an integer, got {ratio}")

    @property
    def m(self) -> int:
        """Nodes per axis."""
        return 2 * int(round(self.L / self.h))

    @property
    def shape(self) -> tuple:
        return (self.m,) * self.n

    @property
    def size(self) -> int:
        return self.m ** self.n

    @property
    def cell_volume(self) -> float:
        return self.h ** self.n

    @cached_property
    def coords_1d(self) -> np.ndarray:
        i = np.arange(self.m)
        return -self.L + (i + 0.5) * self.h

    @cached_property
    def points(self) -> np.ndarray:
        """Node coordinates, shape (*grid.shape, n)."""
        axes = np.meshgrid(*([self.coords_1d] * self.n), indexing="ij")
        return np.stack(axes, axis=-1)

    @cached_property
    def radii(self) -> np.ndarray:
        return np.sqrt(np.sum(self.points ** 2, axis=-1))

    @cached_property
    def shell_index(self) -> np.ndarray:
        return np.floor(self.radii / self.h).astype(np.int64)

    @property
    def n_shells(self) -> int:
        return int(self.shell_index.max()) + 1

    @cached_property
    def shell_radii(self) -> np.ndarray:
        """Representative radius (k + 1/2)h of each shell."""
        return (np.arange(self.n_shells) + 0.5) * self.h

    @cached_property
    def radii_sort(self) -> np.ndarray:
        """Flat indices sorting nodes by |x| (used for sup_R scans)."""
        return np.argsort(self.radii, axis=None, kind="stable")

    def integrate(self, values: np.ndarray) -> complex | float:
        return values.sum() * self.cell_volume

    def shell_sums(self, values: np.ndarray) -> np.ndarray:
        """Sum of values*h^n per radial shell."""
        return np.bincount(
            self.shell_index.ravel(), weights=np.asarray(values, float).ravel(),
            minlength=self.n_shells,
        ) * self.cell_volume

    def surface_integral(self, values: np.ndarray, R: float) -> float:
        """Approximate integral over the sphere |x| = R by a shell-volume
        average over R - h/2 <= |x| < R + h/2."""
        r = self.radii
        mask = (r >= R - self.h / 2) & (r < R + self.h / 2)
        return float(np.sum(np.asarray(values, float)[mask]) * self.cell_volume / self.h)

    def origin_neighbors(self) -> np.ndarray:
        """Flat indices of the 2^n nodes nearest the origin."""
        lo = self.m // 2 - 1
        idx_1d = np.array([lo, lo + 1])
        grids = np.meshgrid(*([idx_1d] * self.n), indexing="ij")
        flat = np.ravel_multi_index([g.ravel() for g in grids], self.shape)
        return flat

    def interpolate_origin(self, values: np.ndarray) -> complex:
        """Multilinear interpolation to x = 0 (plain average of the 2^n
        symmetric nearest nodes)."""
        return complex(values.ravel()[self.origin_neighbors()].mean())


@dataclass
class ScalarField:
    """Complex scalar samples attached to a RadialGrid."""

    grid: RadialGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            if self.values.size == self.grid.size:
                self.values = self.values.reshape(self.grid.shape)
            else:
                raise GridError(
                    f"value shape {self.values.shape} does not match grid {self.grid.shape}"
                )
        if not np.all(np.isfinite(self.values)):
            raise GridError("field values must be finite")

    @classmethod
    def from_callable(cls, grid: RadialGrid, fn) -> "ScalarField":
        return cls(grid, np.asarray(fn(grid.points), dtype=np.complex128))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    def abs2(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def l2_norm_sq(self) -> float:
        return float(self.grid.integrate(self.abs2()))

    def __add__(self, other):
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other):
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return ScalarField(self.grid, self.values * c)

    __rmul__ = __mul__


_MAGIC = b"MORCAMF1"


def save_field(f: ScalarField, path) -> None:
    """Binary snapshot: magic, header (n, L, h), then raw complex128 values.

    Round-trips bit-exactly (IEEE doubles are written verbatim,
    little-endian).
    """
    g = f.grid
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        np.array([g.n], dtype="<i8").tofile(fh)
        np.array([g.L, g.h], dtype="<f8").tofile(fh)
        f.values.astype("<c16").tofile(fh)


def load_field(path) -> ScalarField:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise GridError(f"not a field snapshot: {path}")
        n = int(np.fromfile(fh, dtype="<i8", count=1)[0])
        L, h = np.fromfile(fh, dtype="<f8", count=2)
        grid = RadialGrid(n, float(L), float(h))
        vals = np.fromfile(fh, dtype="<c16", count=grid.size)
    if vals.size != grid.size:
        raise GridError("truncated field snapshot")
    return ScalarField(grid, vals.reshape(grid.shape))
