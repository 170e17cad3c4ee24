"""
Spatial and space-time Lebesgue norms of free evolutions.

Time integrals use the composite trapezoid rule on window.steps + 1 uniform
samples of [-T, T]; per-time values are computed in chunks and reduced in
index order so results are bit-stable.
"""

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import linregress

from src.models.grid import Field, Spectrum
from src.models.params import DispersionParams, Propagator, TailPolicy, TimeWindow
from src.models.reports import RatioReport
from src.services.grid import grid_description, wrap_amplitude
from src.services.spectral import (
    FourierMultiplier,
    forward_transform,
    inverse_transform,
    iter_time_chunks,
)
from src.utils.errors import DegenerateInputError, InvalidArgumentError
from src.utils.logger import get_logger

logger = get_logger(__name__)

STRICHARTZ_ALPHA = 1.0 / 3.0
STRICHARTZ_Q = 6.0
# Fraction of the window used to fit the dispersive decay constant.
FIT_FRACTION = 0.25
TAIL_WARN_FRACTION = 0.01
WRAP_WARN_LEVEL = 1e-10


def window_times(window: TimeWindow) -> np.ndarray:
    return np.linspace(-window.t_max, window.t_max, window.steps + 1)


def trapezoid_weights(window: TimeWindow) -> np.ndarray:
    """Weights w with sum(w * y) equal to the composite trapezoid rule."""
    dt = 2.0 * window.t_max / window.steps
    weights = np.full(window.steps + 1, dt)
    weights[0] = weights[-1] = 0.5 * dt
    return weights


def functional_weights(window: TimeWindow, q: float) -> np.ndarray:
    """Trapezoid weights, with the extrapolated tail folded into the end points."""
    weights = trapezoid_weights(window)
    if TailPolicy(window.tail_policy) is TailPolicy.EXTRAPOLATE and q > 4:
        weights[0] += 2.0 * window.t_max / (q - 4.0)
        weights[-1] += 2.0 * window.t_max / (q - 4.0)
    return weights


def spatial_norm(f: Field, p: float) -> float:
    if not p >= 1:
        raise InvalidArgumentError(f"p must be in [1, inf], got {p}", "p")
    return f.norm(p)


@dataclass
class WindowIntegral:
    """int ||M(t) f||_q^q dt over a window, with tail estimates."""

    integral: float
    tail_bound: float
    extrapolated: float = 0.0
    warnings: List[str] = field(default_factory=list)

    @property
    def total(self) -> float:
        return self.integral + self.extrapolated


def slice_profiles(
    mult: FourierMultiplier, values: np.ndarray, times: np.ndarray, q: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-time sum |u|^q dx and sup |u| for u(t) = M(t) values."""
    dx = mult.grid.spacing
    lq = np.empty(len(times))
    sup = np.empty(len(times))
    for part in iter_time_chunks(times):
        mags = np.abs(mult.slices(values, times[part]))
        lq[part] = np.sum(mags**q, axis=1) * dx
        sup[part] = mags.max(axis=1)
    return lq, sup


def dispersive_tail_bound(
    times: np.ndarray, sup: np.ndarray, mass: float, q: float, t_max: float
) -> float:
    """Bound on int_{|t|>T} ||u||_q^q dt from ||u(t)||_inf <= C (1+|t|)^(-1/2).

    C is fitted on the outer quarter of the window; ||u||_q^q <= ||u||_inf^(q-2) ||u||_2^2.
    """
    decay = 0.5 * (q - 2.0)
    if decay <= 1.0:
        return math.inf
    outer = np.abs(times) >= (1.0 - FIT_FRACTION) * t_max
    c_fit = float(np.max(sup[outer] * np.sqrt(1.0 + np.abs(times[outer]))))
    return 2.0 * c_fit ** (q - 2.0) * mass * t_max ** (1.0 - decay) / (decay - 1.0)


def window_integral(
    mult: FourierMultiplier, values: np.ndarray, q: float, window: TimeWindow
) -> WindowIntegral:
    times = window_times(window)
    lq, sup = slice_profiles(mult, values, times, q)
    integral = float(trapezoid(lq, times))
    result = WindowIntegral(integral=integral, tail_bound=0.0)
    policy = TailPolicy(window.tail_policy)
    if policy is TailPolicy.NONE or integral == 0.0:
        return result

    # ||M(t) f||_2 is conserved, so the slice at t = 0 gives it.
    mass = float(np.sum(np.abs(mult.apply(values, 0.0)) ** 2) * mult.grid.spacing)
    result.tail_bound = dispersive_tail_bound(times, sup, mass, q, window.t_max)
    if policy is TailPolicy.EXTRAPOLATE and q > 4:
        result.extrapolated = 2.0 * window.t_max * (lq[0] + lq[-1]) / (q - 4.0)
    if result.tail_bound > TAIL_WARN_FRACTION * result.total:
        message = (
            f"window too small: tail bound {result.tail_bound:.3g} exceeds "
            f"{TAIL_WARN_FRACTION:.0%} of the integral {result.total:.3g}"
        )
        logger.warning(message, t_max=window.t_max, q=q)
        result.warnings.append(message)
    return result


class SpaceTimeNorm(NamedTuple):
    """||D^alpha S(t) f||_{L^q_{t,x}}, the tail bound on its q-th power, and window warnings."""

    value: float
    tail_bound: float
    warnings: Tuple[str, ...] = ()


def spacetime_norm(
    f: Field,
    disp: DispersionParams,
    weight_alpha: float,
    q: float,
    window: TimeWindow,
    propagator: Propagator = Propagator.FOURTH,
) -> SpaceTimeNorm:
    if not q >= 1:
        raise InvalidArgumentError(f"q must be >= 1, got {q}", "q")
    mult = FourierMultiplier.for_propagator(f.grid, propagator, disp, weight_alpha)
    result = window_integral(mult, f.values, q, window)
    return SpaceTimeNorm(
        value=result.total ** (1.0 / q),
        tail_bound=result.tail_bound,
        warnings=tuple(result.warnings),
    )


def strichartz_ratio(
    f: Field,
    disp: DispersionParams,
    window: TimeWindow,
    propagator: Propagator = Propagator.FOURTH,
    alpha: Optional[float] = None,
) -> RatioReport:
    """||D^(1/3) S(t) f||_{L^6_{t,x}} / ||f||_2; the Schrodinger variant uses alpha = 0."""
    propagator = Propagator(propagator)
    if alpha is None:
        alpha = STRICHARTZ_ALPHA if propagator is Propagator.FOURTH else 0.0
    norm2 = f.norm()
    if norm2 == 0.0:
        raise DegenerateInputError("the quotient is undefined for f = 0", "f")

    mult = FourierMultiplier.for_propagator(f.grid, propagator, disp, alpha)
    result = window_integral(mult, f.values, STRICHARTZ_Q, window)
    norm6 = result.total ** (1.0 / STRICHARTZ_Q)

    wrap = wrap_amplitude(forward_transform(f), disp, window.t_max, alpha, propagator)
    warnings = list(result.warnings)
    if wrap > WRAP_WARN_LEVEL:
        message = f"wrap-around: relative amplitude {wrap:.3g} crosses half the domain"
        logger.warning(message, t_max=window.t_max, length=f.grid.length)
        warnings.append(message)

    return RatioReport(
        value=norm6 / norm2,
        norm6=norm6,
        norm2=norm2,
        tail_bound=result.tail_bound,
        grid_meta=grid_description(f.grid),
        window_meta={
            "t_max": window.t_max,
            "steps": window.steps,
            "tail_policy": TailPolicy(window.tail_policy).value,
        },
        wrap_amplitude=wrap,
        propagator=propagator,
        mu=disp.mu,
        warnings=tuple(warnings),
    )


def localized_restriction_ratio(
    xi0: float,
    R: float,
    q: float,
    ghat: Spectrum,
    disp: DispersionParams,
    window: TimeWindow,
) -> float:
    """||D^(2/q) S(t) G||_{L^q_{t,x}} / ||G^||_inf for G^ supported in B(xi0, R)."""
    if not 4.0 < q < 6.0:
        raise InvalidArgumentError(f"q must lie in (4, 6), got {q}", "q")
    if not R > 0:
        raise InvalidArgumentError(f"R must be > 0, got {R}", "R")
    xi = ghat.fgrid.frequencies
    mags = np.abs(ghat.values)
    outside = np.abs(xi - xi0) > R + 1e-9 * ghat.fgrid.spacing
    if np.any(mags[outside] > 0):
        raise InvalidArgumentError(
            f"spectrum is not supported in B({xi0}, {R})", "ghat"
        )
    sup = float(mags.max(initial=0.0))
    if sup == 0.0:
        raise DegenerateInputError("G^ vanishes identically", "ghat")
    value = spacetime_norm(inverse_transform(ghat), disp, 2.0 / q, q, window).value
    return value / sup


def dispersive_decay_slope(
    f: Field,
    disp: DispersionParams,
    times: Sequence[float],
    alpha: float = STRICHARTZ_ALPHA,
) -> float:
    """Least-squares slope of log ||D^alpha S(t) f||_inf against log t."""
    times = np.asarray(times, dtype=float)
    if np.any(times <= 0):
        raise InvalidArgumentError("decay times must be positive", "times")
    mult = FourierMultiplier.fourth(f.grid, disp, alpha)
    sup = np.abs(mult.slices(f.values, times)).max(axis=1)
    fit = linregress(np.log(times), np.log(sup))
    logger.debug("Fitted dispersive decay", slope=fit.slope, rvalue=fit.rvalue)
    return float(fit.slope)
