"""
Fourier multipliers on periodic grids.

Convention: f^(xi) = int e^{-i x xi} f(x) dx, discretized as
dx * sum_m f(x_m) e^{-i x_m xi} with the true coordinates x_m, and the inverse
carries 1/(2 pi) so that every propagator is the identity at t = 0.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.fft import fft, fftfreq, fftshift, ifft, ifftshift

from src.models.grid import Field, SpaceTimeField, SpatialGrid, Spectrum
from src.models.params import DispersionParams, ProfileParams, Propagator
from src.models.reports import GalileanReport
from src.services.grid import dual_grid, effective_band, support_radius
from src.utils.errors import ResolutionError, SingularMultiplierError
from src.utils.logger import get_logger

logger = get_logger(__name__)

_FFT_WORKERS = 1
# Relative magnitude below which spectral content is treated as absent.
RESOLUTION_TOL = 1e-10
# Number of time slices evolved per FFT batch.
SLICE_CHUNK = 64


def configure(workers: int) -> None:
    """Set the scipy.fft worker count used by every transform (negative counts from the core count)."""
    global _FFT_WORKERS
    _FFT_WORKERS = int(workers) or 1


def fft_workers() -> int:
    return _FFT_WORKERS


def fft_frequencies(grid: SpatialGrid) -> np.ndarray:
    """Angular frequencies in FFT (unshifted) order."""
    return 2.0 * math.pi * fftfreq(grid.count, d=grid.spacing)


def forward_transform(f: Field) -> Spectrum:
    grid = f.grid
    xi = fft_frequencies(grid)
    raw = fft(f.values, workers=_FFT_WORKERS)
    values = grid.spacing * np.exp(-1j * grid.origin * xi) * raw
    return Spectrum(fgrid=dual_grid(grid), grid=grid, values=fftshift(values))


def inverse_transform(F: Spectrum) -> Field:
    grid = F.grid
    xi = fft_frequencies(grid)
    raw = ifftshift(F.values) * np.exp(1j * grid.origin * xi) / grid.spacing
    return Field(grid=grid, values=ifft(raw, workers=_FFT_WORKERS))


def derivative_weight(xi: np.ndarray, alpha: float, disp: DispersionParams) -> np.ndarray:
    """(mu + 6 xi^2)^(alpha/2); the xi = 0 bin is set to 0 when it is singular."""
    base = disp.mu + 6.0 * xi**2
    if alpha == 0:
        return np.ones_like(xi)
    with np.errstate(divide="ignore"):
        weight = base ** (alpha / 2.0)
    weight[~np.isfinite(weight)] = 0.0
    return weight


@dataclass(frozen=True)
class FourierMultiplier:
    """weight(xi) * exp(i t phase(xi)) on one grid; arrays in FFT order."""

    grid: SpatialGrid
    phase: np.ndarray
    weight: Optional[np.ndarray] = None

    @classmethod
    def fourth(
        cls, grid: SpatialGrid, disp: DispersionParams, alpha: float = 0.0
    ) -> "FourierMultiplier":
        xi = fft_frequencies(grid)
        weight = derivative_weight(xi, alpha, disp) if alpha else None
        return cls(grid=grid, phase=disp.symbol(xi), weight=weight)

    @classmethod
    def schrodinger(cls, grid: SpatialGrid) -> "FourierMultiplier":
        xi = fft_frequencies(grid)
        return cls(grid=grid, phase=xi**2)

    @classmethod
    def for_propagator(
        cls,
        grid: SpatialGrid,
        propagator: Propagator,
        disp: DispersionParams,
        alpha: float,
    ) -> "FourierMultiplier":
        if Propagator(propagator) is Propagator.SCHRODINGER:
            mult = cls.schrodinger(grid)
            if alpha:
                xi = fft_frequencies(grid)
                mult = cls(grid=grid, phase=mult.phase, weight=derivative_weight(xi, alpha, disp))
            return mult
        return cls.fourth(grid, disp, alpha)

    def _symbol(self, t: float) -> np.ndarray:
        sym = np.exp(1j * t * self.phase)
        if self.weight is not None:
            sym = sym * self.weight
        return sym

    def apply(self, values: np.ndarray, t: float) -> np.ndarray:
        spec = fft(values, workers=_FFT_WORKERS)
        return ifft(self._symbol(t) * spec, workers=_FFT_WORKERS)

    def slices(self, values: np.ndarray, times: Sequence[float]) -> np.ndarray:
        """Rows are the multiplier applied at each time in `times`."""
        spec = fft(values, workers=_FFT_WORKERS)
        times = np.asarray(times, dtype=float)
        sym = np.exp(1j * np.outer(times, self.phase))
        if self.weight is not None:
            sym *= self.weight
        return ifft(sym * spec, axis=-1, workers=_FFT_WORKERS)

    def adjoint_sum(
        self, slabs: np.ndarray, times: Sequence[float], weights: Sequence[float]
    ) -> np.ndarray:
        """sum_k weights[k] * M(t_k)^* slabs[k], the adjoint of `slices` under dx-weighted sums."""
        times = np.asarray(times, dtype=float)
        sym = np.exp(-1j * np.outer(times, self.phase))
        if self.weight is not None:
            sym *= self.weight
        spec = fft(slabs, axis=-1, workers=_FFT_WORKERS)
        summed = np.asarray(weights, dtype=float) @ (sym * spec)
        return ifft(summed, workers=_FFT_WORKERS)


def iter_time_chunks(times: np.ndarray, chunk: int = SLICE_CHUNK) -> Iterable[slice]:
    for start in range(0, len(times), chunk):
        yield slice(start, min(start + chunk, len(times)))


def fractional_derivative(f: Field, alpha: float, disp: DispersionParams) -> Field:
    """Apply D_mu^alpha, the multiplier (mu + 6 xi^2)^(alpha/2)."""
    if alpha == 0:
        return f
    if disp.mu == 0 and alpha < 0:
        spec = fft(f.values, workers=_FFT_WORKERS)
        peak = np.abs(spec).max(initial=0.0)
        if peak > 0 and abs(spec[0]) > 1e-12 * peak:
            raise SingularMultiplierError(
                "D_0^alpha with alpha < 0 is singular on input with mass at xi = 0",
                "alpha",
            )
    mult = FourierMultiplier(
        grid=f.grid,
        phase=np.zeros(f.grid.count),
        weight=derivative_weight(fft_frequencies(f.grid), alpha, disp),
    )
    return f.with_values(mult.apply(f.values, 0.0))


def propagate_fourth(f: Field, t: float, disp: DispersionParams) -> Field:
    """S_mu(t) f, the multiplier exp(i t (xi^4 + mu xi^2))."""
    if t == 0:
        return f
    return f.with_values(FourierMultiplier.fourth(f.grid, disp).apply(f.values, t))


def propagate_schrodinger(f: Field, t: float) -> Field:
    """e^{-it Delta} f, the multiplier exp(i t xi^2)."""
    if t == 0:
        return f
    return f.with_values(FourierMultiplier.schrodinger(f.grid).apply(f.values, t))


def evolve(
    f: Field,
    times: Sequence[float],
    disp: DispersionParams,
    propagator: Propagator = Propagator.FOURTH,
) -> SpaceTimeField:
    mult = FourierMultiplier.for_propagator(f.grid, propagator, disp, 0.0)
    times = np.asarray(times, dtype=float)
    rows = mult.slices(f.values, times)
    return SpaceTimeField(
        times=tuple(float(t) for t in times),
        slices=tuple(f.with_values(row) for row in rows),
    )


def spectrum_at(phi: Field, eta: np.ndarray, chunk: int = 512) -> np.ndarray:
    """phi^(eta) at arbitrary frequencies from the samples of phi.

    Frequencies beyond the Nyquist limit of phi's grid get 0.
    """
    grid = phi.grid
    y = grid.points
    out = np.zeros(eta.shape, dtype=np.complex128)
    inside = np.abs(eta) <= grid.nyquist
    idx = np.flatnonzero(inside)
    for start in range(0, idx.size, chunk):
        sel = idx[start : start + chunk]
        kernel = np.exp(-1j * np.outer(eta[sel], y))
        out[sel] = grid.spacing * (kernel @ phi.values)
    return out


def _direct_profile_map(phi: Field, p: ProfileParams, target: SpatialGrid) -> Optional[np.ndarray]:
    """Samples of g[e^{i . h xi} phi] when x = x0 + h*y maps core points onto target points."""
    core = phi.grid
    if core.count != target.count:
        return None
    if not math.isclose(core.spacing * p.h, target.spacing, rel_tol=1e-12):
        return None
    offset = ((target.origin - p.x0) / p.h - core.origin) / core.spacing
    shift = round(offset)
    if abs(offset - shift) > 1e-6:
        return None
    x = target.points
    values = np.roll(phi.values, -shift)
    return values * np.exp(1j * (x - p.x0) * p.xi) / math.sqrt(p.h)


def _check_profile_resolution(
    phi: Field, p: ProfileParams, disp: DispersionParams, target: SpatialGrid
) -> None:
    band = effective_band(forward_transform(phi), RESOLUTION_TOL)
    top = abs(p.xi) + band / p.h
    if top >= target.nyquist:
        raise ResolutionError(
            f"profile band |xi| + B/h = {top:.6g} reaches the Nyquist limit "
            f"{target.nyquist:.6g} of the target grid",
            "h",
        )
    radius = support_radius(phi, RESOLUTION_TOL) * p.h
    if p.t0:
        lo, hi = p.xi - band / p.h, p.xi + band / p.h
        speeds = disp.group_velocity(np.linspace(lo, hi, 65))
        radius += 0.5 * abs(p.t0) * float(speeds.max() - speeds.min())
    if radius > 0.5 * target.length:
        raise ResolutionError(
            f"profile support radius {radius:.6g} (including transport spread) "
            f"exceeds half the domain length {0.5 * target.length:.6g}",
            "x0",
        )


def apply_profile(
    phi: Field,
    p: ProfileParams,
    disp: DispersionParams,
    grid: Optional[SpatialGrid] = None,
) -> Field:
    """S_mu(t0) g[e^{i(.) h xi} phi] with g(phi)(x) = h^{-1/2} phi((x - x0)/h)."""
    target = grid or phi.grid
    values = _direct_profile_map(phi, p, target)
    if values is None:
        _check_profile_resolution(phi, p, disp, target)
        k = dual_grid(target).frequencies
        eta = p.h * (k - p.xi)
        spec = math.sqrt(p.h) * np.exp(-1j * p.x0 * k) * spectrum_at(phi, eta)
        values = inverse_transform(
            Spectrum(fgrid=dual_grid(target), grid=target, values=spec)
        ).values
    if p.t0:
        values = FourierMultiplier.fourth(target, disp).apply(values, p.t0)
    return Field(grid=target, values=values)


def galilean_check(phi: Field, N: float, t: float) -> GalileanReport:
    """Check S(t)[e^{ixN} phi] = e^{ixN+itN^4} [M phi](x + 4tN^3) for mu = 0.

    M is the multiplier exp(i t (xi^4 + 4N xi^3 + 6N^2 xi^2)). N is snapped to
    the frequency lattice so both sides are exact on the periodic grid.
    """
    grid = phi.grid
    dxi = dual_grid(grid).spacing
    snapped = round(N / dxi) * dxi
    if not math.isclose(snapped, N, rel_tol=1e-12, abs_tol=1e-12 * dxi):
        logger.warning("Snapping N to the frequency lattice", requested=N, used=snapped)
    N = snapped
    shift = 4.0 * t * N**3
    wrapped = abs(shift) > 0.5 * grid.length
    norm = phi.norm()
    if norm == 0:
        return GalileanReport(residual=0.0, shift=shift, wrapped=wrapped)
    band = effective_band(forward_transform(phi), RESOLUTION_TOL)
    if band + abs(N) >= grid.nyquist:
        raise ResolutionError(
            f"band {band:.6g} plus |N| = {abs(N):.6g} reaches the Nyquist limit "
            f"{grid.nyquist:.6g}",
            "N",
        )
    if wrapped:
        logger.warning(
            "Galilean translation wraps around the periodic domain",
            shift=shift,
            half_length=0.5 * grid.length,
        )

    x = grid.points
    xi = fft_frequencies(grid)
    modulation = np.exp(1j * x * N)
    lhs = FourierMultiplier.fourth(grid, DispersionParams(mu=0.0)).apply(
        modulation * phi.values, t
    )
    mixed = np.exp(1j * t * (xi**4 + 4 * N * xi**3 + 6 * N**2 * xi**2) + 1j * xi * shift)
    rhs = ifft(mixed * fft(phi.values, workers=_FFT_WORKERS), workers=_FFT_WORKERS)
    rhs = rhs * modulation * np.exp(1j * t * N**4)
    defect = math.sqrt(np.sum(np.abs(lhs - rhs) ** 2) * grid.spacing)
    return GalileanReport(residual=defect / norm, shift=shift, wrapped=wrapped)


def galilean_residual(phi: Field, N: float, t: float) -> float:
    """Relative L2 defect of the Galilean decomposition; 0 in exact arithmetic."""
    return galilean_check(phi, N, t).residual
