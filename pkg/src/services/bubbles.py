"""
Profile synthesis, orthogonality predicates, bubble extraction and decoupling.

Extraction runs in two stages. Stage one peels frequency-localized pieces off
the spectrum using the refined functional; stage two looks for a space-time
core inside each piece with a matched filter in the piece's rescaled
variables (y = rho x, s = rho^4 t).
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.fft import fft, ifft
from scipy.integrate import trapezoid

from src.models.grid import Field, SpatialGrid
from src.models.params import (
    DispersionParams,
    ExtractionConfig,
    ProfileParams,
    ScaleFreq,
    TimeWindow,
)
from src.models.reports import (
    BubbleDecomposition,
    CoreExtraction,
    DecouplingReport,
    FrequencyExtraction,
    FrequencyPiece,
    Profile,
)
from src.services.grid import dual_grid
from src.services.presets import gaussian
from src.services.quadrature import (
    STRICHARTZ_ALPHA,
    STRICHARTZ_Q,
    spacetime_norm,
    window_times,
)
from src.services.refined import refined_functional
from src.services.spectral import (
    FourierMultiplier,
    apply_profile,
    fft_frequencies,
    fft_workers,
    forward_transform,
    inverse_transform,
    iter_time_chunks,
)
from src.utils.errors import (
    DegenerateInputError,
    InvalidArgumentError,
    ResolutionError,
    WrongBranchError,
)
from src.utils.logger import get_logger

logger = get_logger(__name__)

ProfileSpec = Tuple[ProfileParams, Field]

# Peak-to-median ratio of the concentration profile below which no core is reported.
FLAT_RATIO = 2.0
# Remainders below this fraction of the piece norm are treated as exhausted.
EXHAUSTED = 1e-10
TAPER_START = 0.75
AXES = ("space", "frequency", "scale")


def synthesize(
    specs: Sequence[ProfileSpec], disp: DispersionParams, grid: SpatialGrid
) -> Field:
    """Sum of S(t0) g[e^{i . h xi} phi] over the given profiles."""
    total = np.zeros(grid.count, dtype=np.complex128)
    for j, (params, core) in enumerate(specs):
        try:
            total += apply_profile(core, params, disp, grid).values
        except ResolutionError as exc:
            raise ResolutionError(f"profile {j}: {exc}", exc.parameter) from exc
    return Field(grid=grid, values=total)


def scale_freq_separation(a: ScaleFreq, b: ScaleFreq) -> float:
    """rho_a/rho_b + rho_b/rho_a + |xi_a - xi_b|/rho_a; at least 2."""
    return a.rho / b.rho + b.rho / a.rho + abs(a.xi - b.xi) / a.rho


def spacetime_separation(
    a: ProfileParams, b: ProfileParams, disp: DispersionParams
) -> float:
    """Space-time separation of two profiles sharing (h, xi).

    The last term measures the spatial gap in the frame moving with the group
    velocity 2(2 xi^2 + mu) xi.
    """
    if not (
        math.isclose(a.h, b.h, rel_tol=1e-12)
        and math.isclose(a.xi, b.xi, rel_tol=1e-12, abs_tol=1e-12)
    ):
        raise WrongBranchError(
            "profiles differ in (h, xi); use scale_freq_separation instead", "h"
        )
    h, xi, mu = a.h, a.xi, disp.mu
    dt = b.t0 - a.t0
    drift = a.x0 - b.x0 - 2.0 * (a.t0 - b.t0) * (2.0 * xi**2 + mu) * xi
    return abs(dt) / h**4 + abs(dt * (mu + 6.0 * xi**2)) / h**2 + abs(drift) / h


def _group_pieces(
    raw: List[Tuple[ScaleFreq, np.ndarray]], threshold: float
) -> List[Tuple[ScaleFreq, np.ndarray]]:
    """Merge each piece into the first earlier anchor it is not separated from."""
    groups: List[Tuple[ScaleFreq, np.ndarray]] = []
    for sf, values in raw:
        for k, (anchor, total) in enumerate(groups):
            separation = min(
                scale_freq_separation(anchor, sf), scale_freq_separation(sf, anchor)
            )
            if separation < threshold:
                groups[k] = (anchor, total + values)
                break
        else:
            groups.append((sf, values.copy()))
    return groups


def extract_frequency_bubbles(
    f: Field,
    cfg: ExtractionConfig,
    disp: DispersionParams,
    window: Optional[TimeWindow] = None,
) -> FrequencyExtraction:
    """Peel amplitude-capped pieces off the located intervals until the functional drops below delta.

    The loop runs on f / max(1, ||f||_2), so the amplitude cap and delta refer to an
    input in the unit ball; pieces and remainder are scaled back to f and the
    functional trace stays in the normalized units.
    """
    spectrum = forward_transform(f)
    xi = spectrum.fgrid.frequencies
    scale = max(1.0, f.norm())
    remainder = np.array(spectrum.values) / scale
    raw: List[Tuple[ScaleFreq, np.ndarray]] = []
    trace: List[float] = []
    warnings: List[str] = []
    converged = False

    for _ in range(cfg.max_bubbles + 1):
        located = refined_functional(spectrum.with_values(remainder), cfg.p)
        trace.append(located.value)
        if located.value < cfg.delta:
            converged = True
            break
        if len(raw) == cfg.max_bubbles:
            break
        lo, hi = located.best_interval
        sf = ScaleFreq(rho=located.half_width, xi=located.center)
        cap = cfg.amplitude_constant / math.sqrt(sf.rho)
        mags = np.abs(remainder)
        mask = (xi >= lo) & (xi <= hi) & (mags <= cap) & (mags > 0)
        if not mask.any():
            message = "extraction stalled: located interval holds only capped amplitudes"
            logger.warning(message, rho=sf.rho, xi=sf.xi, cap=cap)
            warnings.append(message)
            break
        raw.append((sf, np.where(mask, remainder, 0.0)))
        remainder[mask] = 0.0
        logger.debug("Extracted frequency piece", rho=sf.rho, xi=sf.xi, value=located.value)

    if not converged:
        message = f"functional of the remainder stayed above delta = {cfg.delta}"
        logger.warning(message, pieces=len(raw), functional=trace[-1])
        warnings.append(message)

    pieces = []
    for sf, values in _group_pieces(raw, cfg.ortho_threshold):
        piece = spectrum.with_values(values * scale)
        pieces.append(
            FrequencyPiece(
                scale_freq=sf,
                field=inverse_transform(piece),
                functional=refined_functional(piece, cfg.p).value,
            )
        )
    remainder_field = inverse_transform(spectrum.with_values(remainder * scale))
    strichartz = None
    if window is not None:
        remainder_norm = spacetime_norm(
            remainder_field, disp, STRICHARTZ_ALPHA, STRICHARTZ_Q, window
        )
        strichartz = remainder_norm.value
        warnings.extend(remainder_norm.warnings)
    logger.info(
        "Frequency extraction finished",
        pieces=len(pieces),
        iterations=len(raw),
        converged=converged,
    )
    return FrequencyExtraction(
        pieces=tuple(pieces),
        remainder=remainder_field,
        converged=converged,
        functional_trace=tuple(trace),
        remainder_strichartz=strichartz,
        warnings=tuple(warnings),
    )


def _taper(distance: np.ndarray, radius: float) -> np.ndarray:
    """1 inside TAPER_START*radius, cos^2 roll-off to 0 at radius."""
    r = np.abs(distance) / radius
    out = np.ones_like(r)
    ramp = (r > TAPER_START) & (r < 1.0)
    out[ramp] = np.cos(0.5 * math.pi * (r[ramp] - TAPER_START) / (1.0 - TAPER_START)) ** 2
    out[r >= 1.0] = 0.0
    return out


def _periodic_offset(points: np.ndarray, center: float, length: float) -> np.ndarray:
    return (points - center + 0.5 * length) % length - 0.5 * length


class _RescaledPiece:
    """A piece in the variables y = rho x with the frequency center removed.

    Evolution there is the multiplier exp(i s Psi(eta)) with
    Psi(eta) = phi_{mu/rho^2}(eta + xi/rho); it is split into the constant and
    transport parts Psi(0) + v eta and the dispersive part psi_c.
    """

    def __init__(self, piece: Field, sf: ScaleFreq, disp: DispersionParams):
        grid = piece.grid
        self.rho = sf.rho
        self.xi = round(sf.xi / dual_grid(grid).spacing) * dual_grid(grid).spacing
        self.grid = grid.rescaled(self.rho)
        self.a = self.xi / self.rho
        self.mu = disp.mu / self.rho**2
        eta = fft_frequencies(self.grid)
        self.eta = eta
        self.psi0 = self.a**4 + self.mu * self.a**2
        self.velocity = 4.0 * self.a**3 + 2.0 * self.mu * self.a
        self.psi_c = (6.0 * self.a**2 + self.mu) * eta**2 + 4.0 * self.a * eta**3 + eta**4
        self._demodulation = np.exp(-1j * self.xi * grid.points) / math.sqrt(self.rho)

    def values(self, remainder: np.ndarray) -> np.ndarray:
        return remainder * self._demodulation

    def scan_range(self, spec: np.ndarray, phase_range: float) -> float:
        """Time range over which the dispersive phase across the band reaches phase_range."""
        weights = np.abs(spec) ** 2
        total = weights.sum()
        if total == 0:
            return 0.0
        mean = float(np.sum(weights * self.eta) / total)
        var = float(np.sum(weights * (self.eta - mean) ** 2) / total)
        curvature = 6.0 * (self.a + mean) ** 2 + self.mu
        spread = curvature * var + var**2
        return phase_range / spread if spread > 0 else 0.0

    def comoving(self, spec: np.ndarray, times: np.ndarray) -> np.ndarray:
        """Rows S_c(-s) P for each s, with the transport and constant phase removed."""
        return ifft(
            np.exp(-1j * np.outer(times, self.psi_c)) * spec, axis=-1, workers=fft_workers()
        )

    def full(self, spec: np.ndarray, s: float) -> np.ndarray:
        phase = self.psi0 + self.velocity * self.eta + self.psi_c
        return ifft(np.exp(-1j * s * phase) * spec, workers=fft_workers())


def extract_spacetime_core(
    piece: Field,
    sf: ScaleFreq,
    disp: DispersionParams,
    M: int,
    cfg: Optional[ExtractionConfig] = None,
) -> CoreExtraction:
    """Matched-filter search for up to M cores inside one frequency piece.

    Each round undoes the evolution over a grid of rescaled times, takes the
    time s* and point y* of highest concentration, cuts a tapered core around
    it and subtracts its resynthesis.
    """
    cfg = cfg or ExtractionConfig()
    if M < 0:
        raise InvalidArgumentError("M must be >= 0", "M")
    frame = _RescaledPiece(piece, sf, disp)
    ygrid = frame.grid
    rescaled_disp = DispersionParams(mu=frame.mu)
    piece_norm = piece.norm()
    remainder = piece
    profiles: List[Profile] = []
    found: List[ProfileParams] = []
    flat = False

    for alpha in range(M):
        if remainder.norm() <= EXHAUSTED * piece_norm:
            break
        spec = fft(frame.values(remainder.values), workers=fft_workers())
        half_range = frame.scan_range(spec, cfg.core_time_range)
        if half_range == 0.0:
            flat = True
            break
        times = np.linspace(-half_range, half_range, cfg.core_time_samples)
        peaks = np.empty(len(times))
        for part in iter_time_chunks(times):
            peaks[part] = np.abs(frame.comoving(spec, times[part])).max(axis=1)
        median = float(np.median(peaks))
        if median > 0 and peaks.max() / median < FLAT_RATIO:
            logger.info(
                "No concentrated core left in piece",
                rho=sf.rho,
                xi=sf.xi,
                peak_to_median=float(peaks.max() / median),
            )
            flat = True
            break

        k = int(np.argmax(peaks))
        s_star = float(times[k])
        comoving = frame.comoving(spec, times[k : k + 1])[0]
        y_comoving = float(ygrid.points[int(np.argmax(np.abs(comoving)))])
        y_full = y_comoving + frame.velocity * s_star

        candidate = ProfileParams(h=1.0, xi=frame.a, x0=y_full, t0=s_star)
        if any(
            spacetime_separation(prev, candidate, rescaled_disp) < cfg.ortho_threshold
            for prev in found
        ):
            logger.info("Core not separated from earlier cores", alpha=alpha, s=s_star)
            break

        # Represent y* inside the rescaled domain; x0 is then defined modulo L.
        y_star = ygrid.origin + (y_full - ygrid.origin) % ygrid.length
        x0 = y_star / frame.rho
        undone = frame.full(spec, s_star)
        offsets = _periodic_offset(ygrid.points, y_star, ygrid.length)
        core_values = np.exp(1j * x0 * frame.xi) * undone * _taper(offsets, cfg.core_window)
        core_grid = SpatialGrid(
            center=ygrid.center - y_star, spacing=ygrid.spacing, count=ygrid.count
        )
        core = Field(grid=core_grid, values=core_values)
        params = ProfileParams(h=1.0 / frame.rho, xi=frame.xi, x0=x0, t0=s_star / frame.rho**4)
        resynthesis = apply_profile(core, params, disp, piece.grid)
        remainder = remainder - resynthesis
        found.append(candidate)
        profiles.append(Profile(params=params, core=core, alpha=alpha))
        logger.debug("Extracted space-time core", alpha=alpha, s=s_star, y=y_full)

    return CoreExtraction(profiles=tuple(profiles), remainder=remainder, flat_stop=flat)


def full_decomposition(
    f: Field, cfg: ExtractionConfig, disp: DispersionParams, window: TimeWindow
) -> BubbleDecomposition:
    """Both extraction stages; profiles ordered by (j + alpha, j)."""
    stage_one = extract_frequency_bubbles(f, cfg, disp)
    remainder = stage_one.remainder.values
    profiles: List[Profile] = []
    flat_stops: List[int] = []
    for j, piece in enumerate(stage_one.pieces):
        cores = extract_spacetime_core(
            piece.field, piece.scale_freq, disp, cfg.max_bubbles, cfg
        )
        if cores.flat_stop:
            flat_stops.append(j)
        remainder = remainder + cores.remainder.values
        for profile in cores.profiles:
            profiles.append(
                profile.model_copy(update={"piece": j, "functional": piece.functional})
            )
    profiles.sort(key=lambda p: (p.piece + p.alpha, p.piece))
    remainder_field = f.with_values(remainder)

    rebuilt = synthesize([(p.params, p.core) for p in profiles], disp, f.grid)
    norm = f.norm()
    if norm > 0:
        reconstruction = (rebuilt + remainder_field - f).norm() / norm
        l2_gap = abs(
            norm**2 - sum(p.core.norm() ** 2 for p in profiles) - remainder_field.norm() ** 2
        ) / norm**2
    else:
        reconstruction = l2_gap = 0.0
    remainder_functional = refined_functional(forward_transform(remainder_field), cfg.p).value
    remainder_norm = spacetime_norm(
        remainder_field, disp, STRICHARTZ_ALPHA, STRICHARTZ_Q, window
    )
    logger.info(
        "Decomposition finished",
        profiles=len(profiles),
        l2_gap=l2_gap,
        reconstruction=reconstruction,
    )
    return BubbleDecomposition(
        profiles=tuple(profiles),
        remainder=remainder_field,
        delta=cfg.delta,
        stage_one_converged=stage_one.converged,
        flat_stops=tuple(flat_stops),
        l2_gap=l2_gap,
        reconstruction_error=reconstruction,
        remainder_functional=remainder_functional,
        remainder_strichartz=remainder_norm.value,
        warnings=stage_one.warnings + remainder_norm.warnings,
    )


def decoupling_report(
    specs: Sequence[ProfileSpec],
    disp: DispersionParams,
    window: TimeWindow,
    separation_scale: float,
    grid: SpatialGrid,
) -> DecouplingReport:
    """Norm decoupling of Q^j = D^(1/3) S(t) (profile j) over the window."""
    if not specs:
        raise DegenerateInputError("no profiles given", "specs")
    fields = [apply_profile(core, params, disp, grid) for params, core in specs]
    count = len(fields)
    mult = FourierMultiplier.fourth(grid, disp, STRICHARTZ_ALPHA)
    times = window_times(window)
    dx = grid.spacing

    sum_power = np.empty(len(times))
    own = np.empty((count, len(times)))
    cross = np.zeros((count, count, len(times)))
    for part in iter_time_chunks(times):
        slabs = np.stack([mult.slices(fj.values, times[part]) for fj in fields])
        mags = np.abs(slabs)
        sum_power[part] = np.sum(np.abs(slabs.sum(axis=0)) ** 6, axis=-1) * dx
        own[:, part] = np.sum(mags**6, axis=-1) * dx
        for j in range(count):
            for k in range(j + 1, count):
                cross[j, k, part] = np.sum((mags[j] * mags[k]) ** 3, axis=-1) * dx

    total6 = float(trapezoid(sum_power, times))
    own6 = [float(trapezoid(row, times)) for row in own]
    pairs = [[0.0] * count for _ in range(count)]
    for j in range(count):
        pairs[j][j] = float(trapezoid(own[j], times)) ** (1.0 / 3.0)
        for k in range(j + 1, count):
            pairs[j][k] = pairs[k][j] = float(trapezoid(cross[j, k], times)) ** (1.0 / 3.0)

    u = synthesize(specs, disp, grid)
    l2_gap = abs(u.norm() ** 2 - sum(core.norm() ** 2 for _, core in specs))
    return DecouplingReport(
        l2_gap=l2_gap,
        l6_gap=abs(total6 - sum(own6)),
        l6_sum=sum(own6),
        norms6=tuple(v ** (1.0 / 6.0) for v in own6),
        pair_products=tuple(tuple(row) for row in pairs),
        separation_scale=separation_scale,
    )


def two_bubble_family(axis: str, s: float, grid: SpatialGrid) -> List[ProfileSpec]:
    """Two unit Gaussian bubbles separated by s along one orthogonality axis.

    space: h = 1, x0 = -+s/2; frequency: h = 1, xi = -+s/2; scale: h in {1, s}.
    """
    if axis not in AXES:
        raise InvalidArgumentError(f"axis must be one of {AXES}, got {axis!r}", "axis")
    if not s > 0:
        raise InvalidArgumentError("separation must be > 0", "s")
    if axis == "space":
        params = [ProfileParams(h=1.0, x0=-0.5 * s), ProfileParams(h=1.0, x0=0.5 * s)]
    elif axis == "frequency":
        params = [ProfileParams(h=1.0, xi=-0.5 * s), ProfileParams(h=1.0, xi=0.5 * s)]
    else:
        params = [ProfileParams(h=1.0), ProfileParams(h=s)]
    # Cores live on the grid pulled back by the scale so apply_profile maps samples directly.
    return [(p, gaussian(grid.rescaled(1.0 / p.h))) for p in params]
