"""
Input families used by the experiments and tests.
"""

import math

import numpy as np

from src.models.grid import Field, SpatialGrid, Spectrum
from src.services.grid import dual_grid, sample
from src.services.spectral import inverse_transform


def gaussian(
    grid: SpatialGrid, width: float = 1.0, center: float = 0.0, N: float = 0.0
) -> Field:
    """e^{ixN} exp(-(x - center)^2 / (2 width^2))."""
    return sample(
        lambda x: np.exp(1j * N * x - 0.5 * ((x - center) / width) ** 2), grid
    )


def power_decay(grid: SpatialGrid, alpha: float, center: float = 0.0) -> Field:
    """(1 + |x - center|)^(-alpha)."""
    return sample(lambda x: (1.0 + np.abs(x - center)) ** (-alpha), grid)


def spectrum_field(grid: SpatialGrid, values: np.ndarray) -> Field:
    """Field whose spectrum on the dual grid is `values` (signed ascending order)."""
    spec = Spectrum(fgrid=dual_grid(grid), grid=grid, values=values)
    return inverse_transform(spec)


def indicator_spectrum(
    grid: SpatialGrid, lo: float, hi: float, height: float = 1.0
) -> Field:
    """Field with f^ = height on the frequency bins in [lo, hi] and 0 elsewhere."""
    xi = dual_grid(grid).frequencies
    eps = 1e-9 * dual_grid(grid).spacing
    values = np.where((xi >= lo - eps) & (xi <= hi + eps), height, 0.0)
    return spectrum_field(grid, values.astype(np.complex128))


def concentration_member(grid: SpatialGrid, rho: float) -> Field:
    """f^ = rho^(-1/2) 1_[-rho/2, rho/2]; ||f||_2 does not depend on rho."""
    return indicator_spectrum(grid, -0.5 * rho, 0.5 * rho, height=rho**-0.5)


def bump_window(xi: np.ndarray, radius: float, center: float = 0.0) -> np.ndarray:
    """Smooth compactly supported window exp(1 - 1/(1 - s^2)), s = (xi - center)/radius."""
    s = (xi - center) / radius
    out = np.zeros_like(xi, dtype=float)
    inside = np.abs(s) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def random_bandlimited_field(
    grid: SpatialGrid,
    radius: float,
    rng: np.random.Generator,
    nodes: int = 8,
    bump: float = 0.15,
    center: float = 0.0,
) -> Field:
    """Random smooth spectrum supported in B(center, radius).

    A sum of complex Gaussian bumps of width bump*radius, tapered by a smooth
    window, so the field decays quickly in space.
    """
    xi = dual_grid(grid).frequencies
    nu = rng.uniform(center - radius, center + radius, size=nodes)
    coeffs = rng.standard_normal(nodes) + 1j * rng.standard_normal(nodes)
    sigma = bump * radius
    bumps = np.exp(-0.5 * ((xi[:, None] - nu[None, :]) / sigma) ** 2) @ coeffs
    return spectrum_field(grid, bumps * bump_window(xi, radius, center))


def random_bounded_spectrum(
    grid: SpatialGrid,
    radius: float,
    rng: np.random.Generator,
    center: float = 0.0,
) -> np.ndarray:
    """Independent complex bins on B(center, radius) with max modulus exactly 1."""
    xi = dual_grid(grid).frequencies
    inside = np.abs(xi - center) <= radius
    values = np.zeros(grid.count, dtype=np.complex128)
    count = int(inside.sum())
    mags = rng.uniform(0.0, 1.0, size=count)
    if count:
        mags[int(rng.integers(count))] = 1.0
    values[inside] = mags * np.exp(2j * math.pi * rng.uniform(size=count))
    return values
