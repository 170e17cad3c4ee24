"""
Uniform periodic grids, their frequency duals, and sampled fields.
"""

import math
from typing import Callable

import numpy as np

from src.models.grid import Field, FrequencyGrid, SpatialGrid, Spectrum
from src.models.params import DispersionParams, Propagator
from src.utils.errors import InvalidArgumentError, InvalidDataError
from src.utils.logger import get_logger

logger = get_logger(__name__)


def make_grid(center: float, length: float, count: int) -> SpatialGrid:
    """Build a grid with spacing length/count centered at `center`."""
    if not math.isfinite(length) or length <= 0:
        raise InvalidArgumentError(f"length must be > 0, got {length}", "length")
    if count < 4 or count & (count - 1):
        raise InvalidArgumentError(
            f"count must be a power of two >= 4, got {count}", "count"
        )
    if not math.isfinite(center):
        raise InvalidArgumentError("center must be finite", "center")
    return SpatialGrid(center=center, spacing=length / count, count=count)


def dual_grid(grid: SpatialGrid) -> FrequencyGrid:
    return FrequencyGrid(spacing=2.0 * math.pi / grid.length, count=grid.count)


def sample(function: Callable[[np.ndarray], np.ndarray], grid: SpatialGrid) -> Field:
    """Evaluate `function` pointwise at the grid points."""
    x = grid.points
    values = np.asarray(function(x), dtype=np.complex128)
    if values.shape == ():
        values = np.full(grid.count, values, dtype=np.complex128)
    bad = ~np.isfinite(values)
    if bad.any():
        first = int(np.argmax(bad))
        raise InvalidDataError(
            f"non-finite sample at x = {x[first]!r}", "function"
        )
    return Field(grid=grid, values=values)


def effective_band(spectrum: Spectrum, tol: float = 1e-10) -> float:
    """Smallest B with |f^(xi)| < tol*max|f^| for all |xi| > B."""
    mags = np.abs(spectrum.values)
    peak = mags.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    xi = spectrum.fgrid.frequencies
    return float(np.abs(xi[mags >= tol * peak]).max())


def support_radius(field: Field, tol: float = 1e-10, origin: float = 0.0) -> float:
    """Largest |x - origin| at which |f(x)| >= tol*max|f|."""
    mags = np.abs(field.values)
    peak = mags.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    x = field.grid.points
    return float(np.abs(x[mags >= tol * peak] - origin).max())


def wrap_amplitude(
    spectrum: Spectrum,
    disp: DispersionParams,
    t_max: float,
    alpha: float = 0.0,
    propagator: Propagator = Propagator.FOURTH,
) -> float:
    """Largest relative amplitude transported further than L/2 within |t| <= t_max.

    A value below 1e-10 means periodic wrap-around is invisible at that level.
    """
    xi = spectrum.fgrid.frequencies
    weight = np.abs(disp.mu + 6.0 * xi**2) ** (alpha / 2.0) if alpha > 0 else 1.0
    mags = np.abs(spectrum.values) * weight
    peak = mags.max(initial=0.0)
    if peak == 0.0:
        return 0.0
    if Propagator(propagator) is Propagator.SCHRODINGER:
        speed = 2.0 * xi
    else:
        speed = disp.group_velocity(xi)
    travel = np.abs(speed) * t_max
    escaped = travel > 0.5 * spectrum.grid.length
    if not escaped.any():
        return 0.0
    return float(mags[escaped].max() / peak)


def grid_description(grid: SpatialGrid) -> dict:
    return {"center": grid.center, "dx": grid.spacing, "n": grid.count}
