import math

import numpy as np
import pytest

from src.models.grid import Spectrum
from src.models.params import TailPolicy, TimeWindow
from src.services.grid import dual_grid, make_grid
from src.services.presets import concentration_member, random_bandlimited_field
from src.services.refined import (
    exhaustive_functional,
    levelset_split,
    refined_functional,
    refined_inequality_ratio,
    window_objective,
)
from src.services.spectral import forward_transform
from src.utils.errors import DegenerateInputError, InvalidArgumentError


@pytest.fixture
def fine_grid():
    """dxi = 1/64."""
    return make_grid(0.0, 2.0 * math.pi * 64, 1024)


def _spectrum(grid, values):
    return Spectrum(fgrid=dual_grid(grid), grid=grid, values=values)


def _indicator(grid, lo, hi):
    xi = dual_grid(grid).frequencies
    return _spectrum(grid, ((xi >= lo) & (xi < hi)).astype(complex))


def test_unit_indicator(fine_grid):
    F = _indicator(fine_grid, 0.0, 1.0)
    result = refined_functional(F, 4 / 3)
    assert result.value == pytest.approx(1.0, rel=0.02)
    assert result.half_width == pytest.approx(0.5)
    assert result.center == pytest.approx(0.5 - 1 / 128)
    start = int(np.argmin(np.abs(dual_grid(fine_grid).frequencies)))
    assert window_objective(F, 4 / 3, start, 64) == pytest.approx(1.0)


def test_zero_spectrum(fine_grid):
    result = refined_functional(_spectrum(fine_grid, np.zeros(1024)))
    assert result.value == 0.0


@pytest.mark.parametrize("n", [16, 64, 256])
def test_dyadic_search_within_factor_of_exhaustive(rng, n):
    grid = make_grid(0.0, 2.0 * math.pi * 4, n)
    p = 4 / 3
    factor = 2 ** abs(0.5 - 1 / p)
    for _ in range(10):
        values = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        values *= rng.uniform(size=n) < 0.3
        F = _spectrum(grid, values)
        dyadic = refined_functional(F, p).value
        exhaustive = exhaustive_functional(F, p).value
        assert dyadic <= exhaustive * (1 + 1e-12)
        assert exhaustive <= factor * dyadic * (1 + 1e-12)


def test_homogeneous_and_translation_invariant(fine_grid, rng):
    values = np.zeros(1024, dtype=complex)
    values[400:600] = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    F = _spectrum(fine_grid, values)
    base = refined_functional(F).value
    assert refined_functional(F.with_values(-2.5j * values)).value == pytest.approx(2.5 * base)
    shifted = refined_functional(F.with_values(np.roll(values, 37)))
    assert shifted.value == pytest.approx(base, rel=1e-12)


def test_rejects_bad_exponent(fine_grid):
    F = _indicator(fine_grid, 0.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        refined_functional(F, 1.0)
    with pytest.raises(InvalidArgumentError):
        window_objective(F, 4 / 3, 1000, 64)


def test_levelset_split(fine_grid):
    xi = dual_grid(fine_grid).frequencies
    values = np.zeros(1024, dtype=complex)
    heights = {0.6: -1, 1.0: 0, 1.5: 0, 3.0: 1}
    bins = np.flatnonzero((xi >= 0) & (xi < 1))[:4]
    for b, h in zip(bins, heights):
        values[b] = h
    values[np.flatnonzero(xi >= 2)[0]] = 5.0
    F = _spectrum(fine_grid, values)

    pieces = levelset_split(F, (0.0, 1.0))
    assert sorted(pieces) == [-1, 0, 1]
    for b, (h, band) in zip(bins, heights.items()):
        assert pieces[band].values[b] == h
    total = sum(piece.values for piece in pieces.values())
    inside = np.where((xi >= 0) & (xi < 1), values, 0.0)
    assert np.array_equal(total, inside)

    with pytest.raises(InvalidArgumentError):
        levelset_split(F, (1.0, 1.0))


def test_levelset_piece_mass_decays(fine_grid, rng):
    p = 4 / 3
    values = rng.uniform(size=1024).astype(complex)
    start = 480
    values[start + 10] = 40.0
    F = _spectrum(fine_grid, values)
    F = F.with_values(values / refined_functional(F, p).value)
    assert refined_functional(F, p).value == pytest.approx(1.0)

    xi = dual_grid(fine_grid).frequencies
    half = 0.5 * dual_grid(fine_grid).spacing
    lo, hi = xi[start] - half, xi[start + 63] + half
    pieces = levelset_split(F, (lo, hi))
    upper = [n for n in pieces if n >= 0]
    assert upper
    for n in upper:
        mass = np.abs(pieces[n].values).sum() * dual_grid(fine_grid).spacing
        bound = 2.0 * 2.0 ** (-n * (p - 1)) * math.sqrt(hi - lo)
        assert mass <= bound * (1 + 1e-9)


def test_concentration_member_functional(fine_grid):
    for rho in (0.5, 1.0, 2.0):
        F = forward_transform(concentration_member(fine_grid, rho))
        assert refined_functional(F).value == pytest.approx(1.0, rel=0.05)


def test_inequality_ratio_on_concentration_family(fine_grid, free):
    base = TimeWindow(t_max=16.0, steps=400, tail_policy=TailPolicy.NONE)
    ratios = []
    for k in range(-4, 5):
        rho = 2.0**k
        f = concentration_member(fine_grid.rescaled(1 / rho), rho)
        ratios.append(refined_inequality_ratio(f, free, 4 / 3, base.scaled(rho**-4)))
    assert all(math.isfinite(r) and r > 0 for r in ratios)
    assert max(ratios) == pytest.approx(min(ratios), rel=1e-6)


@pytest.mark.slow
def test_inequality_ratio_on_fixed_grid(free):
    # dxi = 1/256 and Nyquist 32 resolve both ends of the family.
    grid = make_grid(0.0, 2.0 * math.pi * 256, 16384)
    base = TimeWindow(t_max=16.0, steps=400, tail_policy=TailPolicy.NONE)
    ratios = []
    for k in range(-4, 5):
        rho = 2.0**k
        f = concentration_member(grid, rho)
        ratios.append(refined_inequality_ratio(f, free, 4 / 3, base.scaled(rho**-4)))
    assert all(math.isfinite(r) and r > 0 for r in ratios)
    assert max(ratios) / min(ratios) <= 3.0


def test_inequality_ratio_on_random_fields(free):
    grid = make_grid(0.0, 512.0, 1024)
    window = TimeWindow(t_max=16.0, steps=400)
    rng = np.random.default_rng(11)
    ratios = [
        refined_inequality_ratio(random_bandlimited_field(grid, 1.0, rng), free, 4 / 3, window)
        for _ in range(20)
    ]
    assert max(ratios) / min(ratios) <= 3.0


def test_inequality_ratio_of_zero(fine_grid, free, short_window):
    zero = concentration_member(fine_grid, 1.0).scaled(0.0)
    with pytest.raises(DegenerateInputError):
        refined_inequality_ratio(zero, free, 4 / 3, short_window)
