"""
Result records returned by the numerical services.

These are plain frozen models; the storage layer turns them into CSV rows.
"""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from src.models.grid import Field
from src.models.params import ProfileParams, Propagator, ScaleFreq


class RatioReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    norm6: float
    norm2: float
    tail_bound: float
    grid_meta: Dict[str, object]
    window_meta: Dict[str, object]
    wrap_amplitude: float = 0.0
    propagator: Propagator = Propagator.FOURTH
    mu: float = 0.0
    warnings: Tuple[str, ...] = ()

    def csv_row(self) -> Dict[str, object]:
        return {
            "value": self.value,
            "norm6": self.norm6,
            "norm2": self.norm2,
            "tail_bound": self.tail_bound,
            "T": self.window_meta["t_max"],
            "steps": self.window_meta["steps"],
            "n": self.grid_meta["n"],
            "dx": self.grid_meta["dx"],
            "mu": self.mu,
        }


class GalileanReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    residual: float
    shift: float
    wrapped: bool


class PartitionReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    samples: int
    violations: int
    max_multiplicity: int
    lo: float
    hi: float
    seed: int


class RefinedResult(BaseModel):
    """sup over searched intervals tau of |tau|^(1/2 - 1/p) ||F||_{L^p(tau)}."""

    model_config = ConfigDict(frozen=True)

    value: float
    best_interval: Tuple[float, float]
    p: float

    @property
    def center(self) -> float:
        return 0.5 * (self.best_interval[0] + self.best_interval[1])

    @property
    def half_width(self) -> float:
        return 0.5 * (self.best_interval[1] - self.best_interval[0])


class FrequencyPiece(BaseModel):
    model_config = ConfigDict(frozen=True)

    scale_freq: ScaleFreq
    field: Field
    functional: float


class FrequencyExtraction(BaseModel):
    """Stage-one output: pieces plus remainder summing exactly to the input."""

    model_config = ConfigDict(frozen=True)

    pieces: Tuple[FrequencyPiece, ...]
    remainder: Field
    converged: bool
    functional_trace: Tuple[float, ...]
    remainder_strichartz: Optional[float] = None
    warnings: Tuple[str, ...] = ()


class Profile(BaseModel):
    """One bubble: symmetry parameters, its core and its (piece j, core alpha) label."""

    model_config = ConfigDict(frozen=True)

    params: ProfileParams
    core: Field
    piece: int = 0
    alpha: int = 0
    functional: float = 0.0


class CoreExtraction(BaseModel):
    model_config = ConfigDict(frozen=True)

    profiles: Tuple[Profile, ...]
    remainder: Field
    flat_stop: bool = False


class BubbleDecomposition(BaseModel):
    model_config = ConfigDict(frozen=True)

    profiles: Tuple[Profile, ...]
    remainder: Field
    delta: float
    stage_one_converged: bool = True
    flat_stops: Tuple[int, ...] = ()
    l2_gap: float = 0.0
    reconstruction_error: float = 0.0
    remainder_functional: float = 0.0
    remainder_strichartz: float = 0.0
    warnings: Tuple[str, ...] = ()

    @property
    def diagnostics(self) -> List[float]:
        return [p.functional for p in self.profiles]


class DecouplingReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    l2_gap: float
    l6_gap: float
    l6_sum: float
    norms6: Tuple[float, ...]
    pair_products: Tuple[Tuple[float, ...], ...]
    separation_scale: float = 0.0

    def normalized_pair(self, j: int, k: int) -> float:
        """||Q^j Q^k||_3 / (||Q^j||_6 ||Q^k||_6), at most 1 by Hoelder."""
        denom = self.norms6[j] * self.norms6[k]
        return self.pair_products[j][k] / denom if denom else 0.0


class DichotomyRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    description: str
    ratio: float
    tail_bound: float
    baseline_gap: float
    warnings: Tuple[str, ...] = ()


class DichotomyTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: Tuple[DichotomyRow, ...]
    verdict: str
    reference: float
    mu: float = 0.0


class ConvergenceRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: float
    ratio: float
    gap: float


class MaximizeResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    field: Field
    ratio: float
    trace: Tuple[float, ...]
    converged: bool
    unstable: bool = False
