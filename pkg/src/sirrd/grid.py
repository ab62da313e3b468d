"""Cell-centred square grid on (0, L)^2 with no-flux boundaries."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class Grid:
    L: float
    nx: int

    def __post_init__(self):
        if int(self.nx) != self.nx or self.nx < 4:
            raise ValueError(f"nx must be an integer >= 4, got {self.nx!r}")
        if not self.L > 0:
            raise ValueError(f"side length must be positive, got {self.L!r}")

    @property
    def h(self) -> float:
        return self.L / self.nx

    @property
    def area(self) -> float:
        return self.L * self.L

    @cached_property
    def centers(self) -> np.ndarray:
        """1-D cell-centre coordinates (j + 1/2) h."""
        return (np.arange(self.nx) + 0.5) * self.h

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """(X, Y) arrays indexed (iy, ix)."""
        x = self.centers
        return np.meshgrid(x, x, indexing="xy")

    def field(self, values) -> "Field":
        return Field(self, values)

    def constant(self, c: float) -> "Field":
        return Field(self, np.full((self.nx, self.nx), float(c)))


class Field:
    """Samples of a scalar function at the cell centres of ``grid``.

    The value array is copied and made read-only on construction.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        v = np.array(values, dtype=float, order="C")
        if v.shape != (grid.nx, grid.nx):
            raise ValueError(f"field shape {v.shape} does not match grid {grid.nx}x{grid.nx}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v.flags.writeable = False
        self.grid = grid
        self.values = v

    def _check(self, other: "Field"):
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values + other.values)
        return Field(self.grid, self.values + other)

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values - other.values)
        return Field(self.grid, self.values - other)

    def __mul__(self, a):
        return Field(self.grid, self.values * a)

    __rmul__ = __mul__
    __radd__ = __add__

    def __repr__(self):
        return f"Field(nx={self.grid.nx}, L={self.grid.L}, range=[{self.values.min():.4g}, {self.values.max():.4g}])"


def laplacian_neumann(f: Field) -> Field:
    """Five-point Laplacian with mirror ghosts (zero normal derivative)."""
    return Field(f.grid, _kernels.laplacian(np.ascontiguousarray(f.values), f.grid.h))


def _sum(a: np.ndarray) -> float:
    # numpy's contiguous reduction is pairwise and order-fixed for a given shape
    return float(np.sum(np.ascontiguousarray(a).ravel()))


def integrate(f: Field) -> float:
    """Midpoint-rule integral over the square."""
    h = f.grid.h
    return h * h * _sum(f.values)


def norm(f: Field, kind: str = "l2") -> float:
    """Discrete ``linf``, ``l2`` or ``h1_semi`` norm.

    ``h1_semi`` uses forward differences on both axes; the difference leaving
    the far boundary is zero (mirror ghost).
    """
    v = f.values
    h = f.grid.h
    if kind == "linf":
        return float(np.max(np.abs(v)))
    if kind == "l2":
        return float(np.sqrt(h * h * _sum(v * v)))
    if kind == "h1_semi":
        dx = np.zeros_like(v)
        dy = np.zeros_like(v)
        dx[:, :-1] = (v[:, 1:] - v[:, :-1]) / h
        dy[:-1, :] = (v[1:, :] - v[:-1, :]) / h
        return float(np.sqrt(h * h * _sum(dx * dx + dy * dy)))
    raise ValueError(f"unknown norm kind {kind!r}")
