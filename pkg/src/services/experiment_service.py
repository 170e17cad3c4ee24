from typing import Any, Dict

import numpy as np

from src import __version__
from src.models.grid import Field
from src.models.run_config import Preset, RunConfig
from src.services import spectral
from src.services.bubbles import decoupling_report, full_decomposition, two_bubble_family
from src.services.extremal import (
    convergence_study,
    dichotomy_experiment,
    maximize_ratio,
)
from src.services.presets import gaussian, power_decay, random_bandlimited_field
from src.services.quadrature import strichartz_ratio
from src.services.refined import refined_functional, refined_inequality_ratio
from src.services.spectral import evolve, forward_transform
from src.services.whitney import verify_partition
from src.storage.artifacts import get_store, read_field
from src.utils.errors import NumericalInstabilityError
from src.utils.logger import get_logger

logger = get_logger(__name__)


class ExperimentService:
    """Runs one subcommand per call and writes its artifacts."""

    def __init__(self, config: Dict[str, Any]):
        if not config:
            raise ValueError("Configuration is required")
        self.config = config
        spectral.configure(config["LAB_FFT_WORKERS"])

    def run(self, run: RunConfig) -> str:
        handler = getattr(self, run.subcommand.value)
        logger.info(
            "Running experiment",
            subcommand=run.subcommand.value,
            config_hash=run.config_hash(),
            seed=run.seed,
        )
        return handler(run)

    def _store(self, run: RunConfig):
        provenance = {
            "config_hash": run.config_hash(),
            "seed": run.seed,
            "version": __version__,
        }
        return get_store(run.output_dir, provenance)

    def input_field(self, run: RunConfig) -> Field:
        """The --input dump if given, else the configured preset on the run grid."""
        if run.input is not None:
            return read_field(run.input)
        grid = run.spatial_grid()
        if run.preset is Preset.POWER_DECAY:
            return power_decay(grid, run.decay)
        if run.preset is Preset.BANDLIMITED:
            rng = np.random.default_rng(run.seed)
            return random_bandlimited_field(grid, run.radius, rng)
        return gaussian(grid, width=run.width, N=run.modulation)

    def ratio(self, run: RunConfig) -> str:
        f = self.input_field(run)
        report = strichartz_ratio(f, run.dispersion(), run.window(), run.propagator)
        row = report.csv_row()
        with self._store(run) as store:
            store.write_csv("ratio.csv", list(row), [list(row.values())])
        return f"ratio={report.value:.6g} tail_bound={report.tail_bound:.3g}"

    def propagate(self, run: RunConfig) -> str:
        f = self.input_field(run)
        times = sorted(run.times)
        evolution = evolve(f, times, run.dispersion(), run.propagator)
        rows = []
        with self._store(run) as store:
            for k, (t, u) in enumerate(zip(evolution.times, evolution.slices)):
                store.write_field(f"propagate_{k}.csv", u)
                rows.append([k, t, u.norm(), u.norm(float("inf"))])
            store.write_csv("propagate.csv", ["index", "t", "norm2", "sup"], rows)
        drift = max(abs(r[2] - f.norm()) for r in rows) / f.norm() if f.norm() else 0.0
        return f"slices={len(rows)} l2_drift={drift:.3g}"

    def whitney(self, run: RunConfig) -> str:
        report = verify_partition(run.range_lo, run.range_hi, run.samples, run.seed)
        with self._store(run) as store:
            store.write_csv(
                "whitney.csv",
                ["samples", "violations", "max_multiplicity", "range_lo", "range_hi", "seed"],
                [
                    [
                        report.samples,
                        report.violations,
                        report.max_multiplicity,
                        report.lo,
                        report.hi,
                        report.seed,
                    ]
                ],
            )
        return f"samples={report.samples} violations={report.violations}"

    def refined(self, run: RunConfig) -> str:
        f = self.input_field(run)
        result = refined_functional(forward_transform(f), run.p)
        quotient = refined_inequality_ratio(f, run.dispersion(), run.p, run.window())
        with self._store(run) as store:
            store.write_csv(
                "refined.csv",
                ["value", "tau_left", "tau_right", "p", "inequality_ratio"],
                [[result.value, *result.best_interval, result.p, quotient]],
            )
        return f"value={result.value:.6g} inequality_ratio={quotient:.6g}"

    def extract(self, run: RunConfig) -> str:
        f = self.input_field(run)
        decomposition = full_decomposition(
            f, run.extraction(), run.dispersion(), run.window()
        )
        with self._store(run) as store:
            store.write_decomposition("decomposition", decomposition)
        return (
            f"profiles={len(decomposition.profiles)} "
            f"l2_gap={decomposition.l2_gap:.3g} "
            f"reconstruction={decomposition.reconstruction_error:.3g}"
        )

    def decouple(self, run: RunConfig) -> str:
        grid = run.spatial_grid()
        rows = []
        for s in run.separations:
            specs = two_bubble_family(run.axis, s, grid)
            report = decoupling_report(specs, run.dispersion(), run.window(), s, grid)
            rows.append(
                [
                    run.axis,
                    s,
                    report.l2_gap,
                    report.l6_gap,
                    report.l6_sum,
                    report.pair_products[0][1],
                    report.normalized_pair(0, 1),
                ]
            )
        with self._store(run) as store:
            store.write_csv(
                "decouple.csv",
                ["axis", "separation", "l2_gap", "l6_gap", "l6_sum", "pair", "normalized_pair"],
                rows,
            )
        return f"axis={run.axis} last_normalized_pair={rows[-1][-1]:.3g}"

    def converge(self, run: RunConfig) -> str:
        phi = self.input_field(run)
        rows = convergence_study(phi, run.Ns, run.window(), run.dispersion())
        with self._store(run) as store:
            store.write_csv(
                "converge.csv", ["N", "ratio", "gap"], [[r.N, r.ratio, r.gap] for r in rows]
            )
        return f"points={len(rows)} final_gap={rows[-1].gap:.3g}"

    def dichotomy(self, run: RunConfig) -> str:
        table = dichotomy_experiment(run.window(), run.mu, run.spatial_grid())
        with self._store(run) as store:
            store.write_csv(
                "dichotomy.csv",
                ["label", "params", "ratio", "tail_bound", "gap", "warnings"],
                [
                    [
                        r.label,
                        r.description,
                        r.ratio,
                        r.tail_bound,
                        r.baseline_gap,
                        "; ".join(r.warnings),
                    ]
                    for r in table.rows
                ],
                trailer=[["# verdict", table.verdict]],
            )
        return table.verdict

    def maximize(self, run: RunConfig) -> str:
        f0 = self.input_field(run)
        result = maximize_ratio(
            f0, run.dispersion(), run.window(), run.iters, run.step_tol, run.propagator
        )
        with self._store(run) as store:
            store.write_csv(
                "maximize.csv",
                ["iteration", "ratio"],
                [[k, v] for k, v in enumerate(result.trace)],
            )
            store.write_field("maximize_field.csv", result.field)
        if result.unstable:
            raise NumericalInstabilityError(
                "power iteration decreased the quotient beyond tolerance", "step_tol"
            )
        return (
            f"ratio={result.ratio:.6g} iterations={len(result.trace)} "
            f"converged={result.converged}"
        )
