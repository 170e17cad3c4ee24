"""
Refined Strichartz functional sup_tau |tau|^(1/2 - 1/p) ||f^||_{L^p(tau)}.

Intervals are runs of consecutive frequency bins; a run of w bins starting at
bin i is the interval [xi_i - dxi/2, xi_{i+w-1} + dxi/2] of length w*dxi.
"""

import math
from typing import Dict, Tuple

import numpy as np

from src.models.grid import Field, Spectrum
from src.models.params import DispersionParams, TimeWindow
from src.models.reports import RefinedResult
from src.services.quadrature import STRICHARTZ_ALPHA, STRICHARTZ_Q, spacetime_norm
from src.services.spectral import forward_transform
from src.utils.errors import DegenerateInputError, InvalidArgumentError

DEFAULT_P = 4.0 / 3.0


def _check_p(p: float) -> None:
    if not (math.isfinite(p) and p > 1):
        raise InvalidArgumentError(f"p must be > 1, got {p}", "p")


def _bin_masses(F: Spectrum, p: float) -> np.ndarray:
    """Prefix sums of |f^|^p dxi, prepended with 0."""
    weights = np.abs(F.values) ** p * F.fgrid.spacing
    return np.concatenate(([0.0], np.cumsum(weights)))


def _interval(F: Spectrum, start: int, width: int) -> Tuple[float, float]:
    xi = F.fgrid.frequencies
    half = 0.5 * F.fgrid.spacing
    return float(xi[start] - half), float(xi[start + width - 1] + half)


def _scan(F: Spectrum, p: float, prefix: np.ndarray, width: int) -> Tuple[int, float]:
    """Best start and objective over all runs of `width` bins."""
    mass = np.maximum(prefix[width:] - prefix[:-width], 0.0)
    tau = width * F.fgrid.spacing
    objective = tau ** (0.5 - 1.0 / p) * mass ** (1.0 / p)
    start = int(np.argmax(objective))
    return start, float(objective[start])


def _best_over(F: Spectrum, p: float, widths) -> RefinedResult:
    prefix = _bin_masses(F, p)
    best, where = 0.0, (0, 1)
    for width in widths:
        start, value = _scan(F, p, prefix, width)
        if value > best:
            best, where = value, (start, width)
    if best == 0.0:
        return RefinedResult(value=0.0, best_interval=(0.0, 0.0), p=p)
    return RefinedResult(value=best, best_interval=_interval(F, *where), p=p)


def refined_functional(F: Spectrum, p: float = DEFAULT_P) -> RefinedResult:
    """Search over runs of 2^j bins at every offset."""
    _check_p(p)
    n = F.fgrid.count
    widths = [1 << j for j in range(n.bit_length()) if (1 << j) <= n]
    return _best_over(F, p, widths)


def exhaustive_functional(F: Spectrum, p: float = DEFAULT_P) -> RefinedResult:
    """Search over every run of bins; quadratic in the grid size."""
    _check_p(p)
    return _best_over(F, p, range(1, F.fgrid.count + 1))


def window_objective(F: Spectrum, p: float, start: int, width: int) -> float:
    """|tau|^(1/2 - 1/p) ||f^||_{L^p(tau)} for the run of `width` bins at `start`."""
    _check_p(p)
    if width < 1 or start < 0 or start + width > F.fgrid.count:
        raise InvalidArgumentError("window does not fit the frequency grid", "width")
    mass = float(np.sum(np.abs(F.values[start : start + width]) ** p) * F.fgrid.spacing)
    return (width * F.fgrid.spacing) ** (0.5 - 1.0 / p) * mass ** (1.0 / p)


def refined_inequality_ratio(
    f: Field, disp: DispersionParams, p: float, window: TimeWindow
) -> float:
    """||D^(1/3) S(t) f||_6 / (refined functional^(1/3) ||f||_2^(2/3))."""
    norm2 = f.norm()
    if norm2 == 0.0:
        raise DegenerateInputError("the refined quotient is undefined for f = 0", "f")
    lhs = spacetime_norm(f, disp, STRICHARTZ_ALPHA, STRICHARTZ_Q, window).value
    functional = refined_functional(forward_transform(f), p).value
    return lhs / (functional ** (1.0 / 3.0) * norm2 ** (2.0 / 3.0))


def levelset_split(F: Spectrum, interval: Tuple[float, float]) -> Dict[int, Spectrum]:
    """Split F restricted to the interval by the height band of |f^| |I|^(1/2).

    Piece n lives where |f^| lies in [2^n |I|^(-1/2), 2^(n+1) |I|^(-1/2)).
    """
    lo, hi = interval
    if not hi > lo:
        raise InvalidArgumentError(f"empty interval [{lo}, {hi}]", "interval")
    xi = F.fgrid.frequencies
    inside = (xi >= lo) & (xi < hi)
    heights = np.abs(F.values) * math.sqrt(hi - lo)
    live = inside & (heights > 0)
    bands = np.full(xi.shape, np.iinfo(np.int64).min, dtype=np.int64)
    # Slack absorbs rounding at exact band edges.
    bands[live] = np.floor(np.log2(heights[live]) + 1e-12).astype(np.int64)
    pieces = {}
    for n in np.unique(bands[live]):
        mask = live & (bands == n)
        pieces[int(n)] = F.with_values(np.where(mask, F.values, 0.0))
    return pieces
