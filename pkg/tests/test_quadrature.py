import math

import numpy as np
import pytest

from src.models.grid import Field, Spectrum
from src.models.params import DispersionParams, TailPolicy, TimeWindow
from src.services.grid import dual_grid, make_grid, sample
from src.services.presets import bump_window, gaussian, random_bounded_spectrum, spectrum_field
from src.services.quadrature import (
    dispersive_decay_slope,
    functional_weights,
    localized_restriction_ratio,
    spacetime_norm,
    spatial_norm,
    strichartz_ratio,
    trapezoid_weights,
)
from src.utils.errors import DegenerateInputError, InvalidArgumentError


def test_spatial_norms(spectral_grid):
    ones = sample(lambda x: 1.0, make_grid(0.0, 2.0, 8))
    assert spatial_norm(ones, 2) == pytest.approx(math.sqrt(2.0))
    assert spatial_norm(gaussian(spectral_grid), 2) == pytest.approx(math.pi**0.25, abs=1e-8)
    mode = sample(lambda x: np.exp(2j * x), spectral_grid)
    assert spatial_norm(mode, math.inf) == pytest.approx(1.0)
    with pytest.raises(InvalidArgumentError):
        spatial_norm(ones, 0.5)


def test_l2_spacetime_norm_is_mass(unit_grid):
    f = gaussian(unit_grid)
    window = TimeWindow(t_max=1.5, steps=100, tail_policy=TailPolicy.NONE)
    value, tail, _ = spacetime_norm(f, DispersionParams(mu=1.0), 0.0, 2.0, window)
    assert value == pytest.approx(math.sqrt(3.0) * f.norm(), rel=1e-10)
    assert tail == 0.0


def test_zero_field(unit_grid, free):
    zero = Field(grid=unit_grid, values=np.zeros(unit_grid.count))
    assert spacetime_norm(zero, free, 1 / 3, 6.0, TimeWindow()) == (0.0, 0.0, ())
    with pytest.raises(DegenerateInputError):
        strichartz_ratio(zero, free, TimeWindow())


def test_weights_match_trapezoid():
    window = TimeWindow(t_max=2.0, steps=4)
    assert np.allclose(trapezoid_weights(window), [0.5, 1.0, 1.0, 1.0, 0.5])
    folded = functional_weights(window, 6.0)
    assert np.allclose(folded, [2.5, 1.0, 1.0, 1.0, 2.5])
    none = window.model_copy(update={"tail_policy": TailPolicy.NONE})
    assert np.allclose(functional_weights(none, 6.0), trapezoid_weights(window))


def test_ratio_report_fields(unit_grid, free):
    report = strichartz_ratio(gaussian(unit_grid), free, TimeWindow(t_max=10.0, steps=500))
    assert report.value == pytest.approx(report.norm6 / report.norm2)
    row = report.csv_row()
    assert list(row) == ["value", "norm6", "norm2", "tail_bound", "T", "steps", "n", "dx", "mu"]
    assert row["n"] == 2048 and row["T"] == 10.0


def test_ratio_is_deterministic(unit_grid, free):
    window = TimeWindow(t_max=5.0, steps=200)
    a = strichartz_ratio(gaussian(unit_grid, N=1.0), free, window)
    b = strichartz_ratio(gaussian(unit_grid, N=1.0), free, window)
    assert a.value == b.value


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_scaling_invariance(unit_grid, free, lam):
    window = TimeWindow(t_max=10.0, steps=1000)
    f = gaussian(unit_grid)
    f_lam = Field(grid=unit_grid.rescaled(lam), values=f.values / math.sqrt(lam))
    base = strichartz_ratio(f, free, window).value
    scaled = strichartz_ratio(f_lam, free, window.scaled(lam**4)).value
    assert scaled == pytest.approx(base, abs=1e-3)


def test_monotone_in_window(unit_grid):
    disp = DispersionParams(mu=1.0)
    values = [
        spacetime_norm(
            gaussian(unit_grid), disp, 1 / 3, 6.0,
            TimeWindow(t_max=t, steps=int(100 * t), tail_policy=TailPolicy.NONE),
        ).value
        for t in (2.0, 4.0, 8.0)
    ]
    assert values[0] <= values[1] <= values[2]


def test_step_doubling_converges(unit_grid):
    disp = DispersionParams(mu=1.0)
    f = gaussian(unit_grid)
    coarse, fine = (
        spacetime_norm(
            f, disp, 1 / 3, 6.0,
            TimeWindow(t_max=10.0, steps=steps, tail_policy=TailPolicy.NONE),
        ).value
        for steps in (4000, 8000)
    )
    assert fine == pytest.approx(coarse, rel=1e-6)


@pytest.mark.parametrize("mu", [0.0, 1.0])
def test_default_steps_resolve_unit_gaussian(unit_grid, mu):
    window = TimeWindow()
    doubled = window.model_copy(update={"steps": 2 * window.steps})
    f = gaussian(unit_grid)
    disp = DispersionParams(mu=mu)
    base = strichartz_ratio(f, disp, window).norm6 ** 6
    fine = strichartz_ratio(f, disp, doubled).norm6 ** 6
    assert fine == pytest.approx(base, rel=1e-6)


def test_small_window_warning_reaches_caller(unit_grid, free):
    window = TimeWindow(t_max=0.5, steps=100, tail_policy=TailPolicy.DISPERSIVE)
    result = spacetime_norm(gaussian(unit_grid), free, 1 / 3, 6.0, window)
    value, tail, warnings = result
    assert tail > 0.01 * value**6
    assert any("window too small" in w for w in warnings)
    quiet = spacetime_norm(
        gaussian(unit_grid), free, 1 / 3, 6.0,
        window.model_copy(update={"tail_policy": TailPolicy.NONE}),
    )
    assert quiet.warnings == ()


@pytest.mark.slow
def test_window_doubling_within_tail_bound():
    grid = make_grid(0.0, 4096.0, 16384)
    disp = DispersionParams(mu=1.0)
    f = gaussian(grid)
    short = TimeWindow(t_max=10.0, steps=2000, tail_policy=TailPolicy.DISPERSIVE)
    value, tail, _ = spacetime_norm(f, disp, 1 / 3, 6.0, short)
    longer, _, _ = spacetime_norm(
        f, disp, 1 / 3, 6.0, short.model_copy(update={"t_max": 20.0, "steps": 4000})
    )
    assert math.isfinite(tail)
    assert 0.0 <= longer**6 - value**6 <= tail


def test_dispersive_tail_needs_q_above_four(unit_grid, free):
    window = TimeWindow(t_max=2.0, steps=100, tail_policy=TailPolicy.DISPERSIVE)
    _, tail, _ = spacetime_norm(gaussian(unit_grid), free, 0.0, 4.0, window)
    assert tail == math.inf


@pytest.fixture
def restriction_grid():
    return make_grid(0.0, 2 * math.pi * 64, 1024)


@pytest.fixture
def restriction_window():
    return TimeWindow(t_max=16.0, steps=800, tail_policy=TailPolicy.NONE)


def _spectrum(grid, values):
    return Spectrum(fgrid=dual_grid(grid), grid=grid, values=values)


def _indicator_spectrum(grid, radius=1.0):
    xi = dual_grid(grid).frequencies
    return _spectrum(grid, (np.abs(xi) <= radius).astype(complex))


def test_localized_restriction_homogeneous(restriction_grid, restriction_window, free):
    G = _indicator_spectrum(restriction_grid)
    base = localized_restriction_ratio(0.0, 1.0, 5.0, G, free, restriction_window)
    tripled = localized_restriction_ratio(
        0.0, 1.0, 5.0, G.with_values(3 * G.values), free, restriction_window
    )
    assert math.isfinite(base) and base > 0
    assert tripled == pytest.approx(base, rel=1e-10)


def test_localized_restriction_stable_over_random_spectra(
    restriction_grid, restriction_window, free, rng
):
    ratios = np.array(
        [
            localized_restriction_ratio(
                0.0,
                1.0,
                5.0,
                _spectrum(restriction_grid, random_bounded_spectrum(restriction_grid, 1.0, rng)),
                free,
                restriction_window,
            )
            for _ in range(20)
        ]
    )
    assert np.all(np.abs(ratios / ratios.mean() - 1.0) <= 0.2)


def test_localized_restriction_rejects_bad_input(restriction_grid, restriction_window, free):
    G = _indicator_spectrum(restriction_grid, radius=2.0)
    with pytest.raises(InvalidArgumentError):
        localized_restriction_ratio(0.0, 1.0, 5.0, G, free, restriction_window)
    with pytest.raises(InvalidArgumentError):
        localized_restriction_ratio(0.0, 2.0, 6.0, G, free, restriction_window)


@pytest.mark.slow
def test_dispersive_decay_rate():
    grid = make_grid(0.0, 4096.0, 8192)
    xi = dual_grid(grid).frequencies
    f = spectrum_field(grid, bump_window(xi, 1.0).astype(complex))
    slope = dispersive_decay_slope(f, DispersionParams(mu=1.0), np.logspace(1, 2, 12))
    assert slope == pytest.approx(-0.5, abs=0.05)
