"""
Grid and field value types.

Everything here is immutable: grids are frozen pydantic models and the sample
arrays carried by fields and spectra are private read-only copies.
"""

import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


def _frozen_complex(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128, copy=True).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite (no NaN/Inf)")
    arr.flags.writeable = False
    return arr


class SpatialGrid(BaseModel):
    """Uniform periodic grid x_m = center - L/2 + m*dx, m = 0..n-1."""

    model_config = ConfigDict(frozen=True)

    center: float
    spacing: float
    count: int

    @field_validator("spacing")
    @classmethod
    def _positive_spacing(cls, v: float) -> float:
        if not math.isfinite(v) or v <= 0:
            raise ValueError("spacing must be finite and > 0")
        return v

    @field_validator("count")
    @classmethod
    def _power_of_two(cls, v: int) -> int:
        if v < 4 or v & (v - 1):
            raise ValueError("count must be a power of two >= 4")
        return v

    @property
    def length(self) -> float:
        return self.count * self.spacing

    @property
    def origin(self) -> float:
        return self.center - 0.5 * self.length

    @property
    def points(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.count)

    @property
    def nyquist(self) -> float:
        return math.pi / self.spacing

    def rescaled(self, lam: float) -> "SpatialGrid":
        """Grid for x -> lam*x: spacing and center scale, count is kept."""
        return SpatialGrid(
            center=self.center * lam, spacing=self.spacing * lam, count=self.count
        )

    def same_as(self, other: "SpatialGrid") -> bool:
        return (
            self.count == other.count
            and self.spacing == other.spacing
            and self.center == other.center
        )


class FrequencyGrid(BaseModel):
    """Signed frequencies xi_m = dxi*m, m in {-n/2, ..., n/2-1}, ascending."""

    model_config = ConfigDict(frozen=True)

    spacing: float
    count: int

    @property
    def frequencies(self) -> np.ndarray:
        half = self.count // 2
        return self.spacing * np.arange(-half, half)

    @property
    def nyquist(self) -> float:
        return 0.5 * self.count * self.spacing


class Field(BaseModel):
    """Complex samples of a function on a SpatialGrid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: SpatialGrid
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _copy_values(cls, v) -> np.ndarray:
        return _frozen_complex(v)

    @model_validator(mode="after")
    def _length_matches(self) -> "Field":
        if self.values.shape[0] != self.grid.count:
            raise ValueError(
                f"values length {self.values.shape[0]} != grid count {self.grid.count}"
            )
        return self

    def norm(self, p: float = 2.0) -> float:
        """Discrete L^p norm with rectangle weights dx."""
        mags = np.abs(self.values)
        if math.isinf(p):
            return float(mags.max(initial=0.0))
        return float((np.sum(mags**p) * self.grid.spacing) ** (1.0 / p))

    def with_values(self, values) -> "Field":
        return Field(grid=self.grid, values=values)

    def scaled(self, c: complex) -> "Field":
        return Field(grid=self.grid, values=self.values * c)

    def _check_grid(self, other: "Field") -> None:
        if not self.grid.same_as(other.grid):
            raise ValueError("fields live on different grids")

    def __add__(self, other: "Field") -> "Field":
        self._check_grid(other)
        return Field(grid=self.grid, values=self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        self._check_grid(other)
        return Field(grid=self.grid, values=self.values - other.values)


class Spectrum(BaseModel):
    """Samples of f^(xi_m) in signed ascending order.

    `grid` is the spatial grid the spectrum inverts onto; the phase of every
    bin is referenced to absolute coordinates on that grid.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fgrid: FrequencyGrid
    grid: SpatialGrid
    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _copy_values(cls, v) -> np.ndarray:
        return _frozen_complex(v)

    @model_validator(mode="after")
    def _length_matches(self) -> "Spectrum":
        if self.values.shape[0] != self.fgrid.count:
            raise ValueError("spectrum length does not match its frequency grid")
        return self

    def norm(self, p: float = 2.0) -> float:
        mags = np.abs(self.values)
        if math.isinf(p):
            return float(mags.max(initial=0.0))
        return float((np.sum(mags**p) * self.fgrid.spacing) ** (1.0 / p))

    def with_values(self, values) -> "Spectrum":
        return Spectrum(fgrid=self.fgrid, grid=self.grid, values=values)


class SpaceTimeField(BaseModel):
    """u(t_k, x) at strictly increasing times, all slices on one grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: Tuple[float, ...]
    slices: Tuple[Field, ...]

    @model_validator(mode="after")
    def _consistent(self) -> "SpaceTimeField":
        if len(self.times) != len(self.slices):
            raise ValueError("one slice per time is required")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if self.slices:
            grid = self.slices[0].grid
            if any(not s.grid.same_as(grid) for s in self.slices):
                raise ValueError("all slices must share one grid")
        return self

    @property
    def grid(self) -> SpatialGrid:
        return self.slices[0].grid
