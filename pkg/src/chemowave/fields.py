"""Uniform 1D grids and scalar fields sampled on them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Grid:
    """Uniform grid x_i = x0 + i*h, i = 0..n-1."""

    x0: float
    h: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.x0):
            raise DomainError("x0 non-finite")
        if not (self.h > 0 and np.isfinite(self.h)):
            raise DomainError("h must be > 0 and finite")
        if self.n < 8:
            raise DomainError("n must be >= 8")

    @classmethod
    def from_bounds(cls, left: float, right: float, h: float) -> "Grid":
        """Grid covering [left, right]; right endpoint snapped to the lattice."""
        if right <= left:
            raise DomainError("right must exceed left")
        n = int(round((right - left) / h)) + 1
        return cls(left, h, n)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n)

    @property
    def x1(self) -> float:
        """Right endpoint."""
        return self.x0 + self.h * (self.n - 1)

    def interior(self) -> "Grid":
        """Grid with the first and last node dropped."""
        return Grid(self.x0 + self.h, self.h, self.n - 2)


@dataclass(frozen=True)
class Field:
    """Scalar function sampled on a grid. Values are copied and frozen."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.shape != (self.grid.n,):
            raise DomainError(
                f"values shape {v.shape} does not match grid ({self.grid.n},)")
        if not np.all(np.isfinite(v)):
            raise DomainError("field values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def max(self) -> float:
        return float(self.values.max())

    def min(self) -> float:
        return float(self.values.min())

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)


def centered_derivative(f: Field) -> Field:
    """Second-order centered d/dx on the interior grid."""
    v = f.values
    d = (v[2:] - v[:-2]) / (2.0 * f.grid.h)
    return Field(f.grid.interior(), d)


def centered_second(f: Field) -> Field:
    """Second-order centered d2/dx2 on the interior grid."""
    v = f.values
    d = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (f.grid.h ** 2)
    return Field(f.grid.interior(), d)
