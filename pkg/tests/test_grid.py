import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.models.grid import Field
from src.models.params import DispersionParams
from src.services.grid import (
    dual_grid,
    effective_band,
    make_grid,
    sample,
    support_radius,
    wrap_amplitude,
)
from src.services.presets import gaussian, random_bandlimited_field
from src.services.spectral import forward_transform, inverse_transform
from src.utils.errors import InvalidArgumentError, InvalidDataError


def test_make_grid_spacing_and_dual():
    grid = make_grid(0.0, 2 * math.pi, 8)
    assert grid.spacing == pytest.approx(math.pi / 4)
    assert dual_grid(grid).spacing == pytest.approx(1.0)


def test_make_grid_nyquist():
    grid = make_grid(0.0, 64.0, 4)
    assert grid.spacing == 16.0
    assert grid.nyquist == pytest.approx(math.pi / 16)


def test_make_grid_endpoints():
    grid = make_grid(5.0, 100.0, 1024)
    x = grid.points
    assert x[0] == pytest.approx(-45.0)
    assert x[-1] == pytest.approx(55.0 - grid.spacing)


@pytest.mark.parametrize("length, count", [(0.0, 8), (-1.0, 8), (10.0, 6), (10.0, 2)])
def test_make_grid_rejects_invalid(length, count):
    with pytest.raises(InvalidArgumentError):
        make_grid(0.0, length, count)


def test_sample_constant():
    grid = make_grid(0.0, 10.0, 16)
    f = sample(lambda x: 1.0, grid)
    assert np.all(f.values == 1.0)


def test_sample_even_function_is_even(spectral_grid):
    f = sample(lambda x: np.exp(-0.5 * x**2), spectral_grid)
    n = spectral_grid.count
    m = np.arange(1, n)
    assert np.allclose(f.values[m], f.values[n - m], rtol=0, atol=1e-15)


def test_sample_pure_mode_concentrates_at_one():
    grid = make_grid(0.0, 2 * math.pi, 32)
    spec = forward_transform(sample(lambda x: np.exp(1j * x), grid))
    mags = np.abs(spec.values)
    peak = int(np.argmax(mags))
    assert spec.fgrid.frequencies[peak] == pytest.approx(1.0)
    others = np.delete(mags, peak)
    assert others.max() < 1e-12 * mags[peak]


def test_sample_rejects_non_finite():
    grid = make_grid(0.0, 10.0, 16)
    with pytest.raises(InvalidDataError):
        sample(lambda x: np.where(x > 0, np.nan, 0.0), grid)


def test_dual_grid_ordering():
    fgrid = dual_grid(make_grid(0.0, 2 * math.pi, 8))
    assert np.allclose(fgrid.frequencies, np.arange(-4, 4))
    assert dual_grid(make_grid(0.0, 4 * math.pi, 8)).spacing == pytest.approx(0.5)


def test_doubling_count_keeps_dxi_and_doubles_nyquist():
    coarse = dual_grid(make_grid(0.0, 20.0, 64))
    fine = dual_grid(make_grid(0.0, 20.0, 128))
    assert fine.spacing == pytest.approx(coarse.spacing)
    assert fine.nyquist == pytest.approx(2 * coarse.nyquist)
    grid = make_grid(0.0, 20.0, 64)
    assert coarse.spacing * grid.spacing * grid.count == pytest.approx(2 * math.pi)


def test_round_trip_and_parseval(unit_grid, rng):
    f = random_bandlimited_field(unit_grid, 2.0, rng)
    spec = forward_transform(f)
    back = inverse_transform(spec)
    assert np.linalg.norm(back.values - f.values) <= 1e-12 * np.linalg.norm(f.values)
    assert f.norm() ** 2 == pytest.approx(spec.norm() ** 2 / (2 * math.pi), rel=1e-12)


def test_field_values_are_read_only(unit_grid):
    f = gaussian(unit_grid)
    with pytest.raises(ValueError):
        f.values[0] = 2.0
    source = np.ones(unit_grid.count)
    g = Field(grid=unit_grid, values=source)
    source[0] = 5.0
    assert g.values[0] == 1.0


def test_field_rejects_non_finite_and_wrong_length(unit_grid):
    bad = np.ones(unit_grid.count)
    bad[3] = np.inf
    with pytest.raises(ValidationError):
        Field(grid=unit_grid, values=bad)
    with pytest.raises(ValidationError):
        Field(grid=unit_grid, values=np.ones(7))


def test_field_arithmetic_requires_same_grid(unit_grid):
    f = gaussian(unit_grid)
    other = gaussian(make_grid(1.0, 512.0, 2048))
    assert np.allclose((f + f - f).values, f.values)
    with pytest.raises(ValueError):
        f + other


def test_effective_band_of_gaussian(spectral_grid):
    band = effective_band(forward_transform(gaussian(spectral_grid)), 1e-10)
    # exp(-xi^2/2) = 1e-10 at xi = 6.79
    assert 6.7 <= band <= 6.8


def test_support_radius_of_gaussian(spectral_grid):
    radius = support_radius(gaussian(spectral_grid), 1e-10)
    assert 6.5 <= radius <= 6.8


def test_wrap_amplitude(free):
    grid = make_grid(0.0, 64.0, 512)
    spec = forward_transform(gaussian(grid))
    assert wrap_amplitude(spec, free, 0.001) < 1e-10
    assert wrap_amplitude(spec, free, 10.0) > 0.1
    assert wrap_amplitude(spec, DispersionParams(mu=1.0), 0.0001) < 1e-10
