"""
Validated configuration of one CLI run.

Keys are flat so the same names work in an INI section and as flags.
Grid keys left unset fall back to the subcommand's default grid.
"""

import enum
import hashlib
import json
import math
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from src.models.grid import SpatialGrid
from src.models.params import (
    DispersionParams,
    ExtractionConfig,
    Propagator,
    TailPolicy,
    TimeWindow,
)


class Subcommand(str, enum.Enum):
    RATIO = "ratio"
    PROPAGATE = "propagate"
    WHITNEY = "whitney"
    REFINED = "refined"
    EXTRACT = "extract"
    DECOUPLE = "decouple"
    CONVERGE = "converge"
    DICHOTOMY = "dichotomy"
    MAXIMIZE = "maximize"


class Preset(str, enum.Enum):
    GAUSSIAN = "gaussian"
    POWER_DECAY = "power_decay"
    BANDLIMITED = "bandlimited"


# (length, count) per subcommand.
DEFAULT_GRIDS = {
    Subcommand.CONVERGE: (2048.0, 16384),
    Subcommand.DICHOTOMY: (2048.0, 16384),
    Subcommand.DECOUPLE: (4096.0, 16384),
}
FALLBACK_GRID = (512.0, 2048)


def _split_list(v):
    if isinstance(v, str):
        return [item for item in v.replace(",", " ").split() if item]
    return v


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    subcommand: Subcommand

    center: float = 0.0
    length: Optional[float] = None
    count: Optional[int] = None

    t_max: float = 40.0
    steps: int = 16000
    tail_policy: TailPolicy = TailPolicy.EXTRAPOLATE

    mu: float = 0.0
    propagator: Propagator = Propagator.FOURTH

    input: Optional[Path] = None
    preset: Preset = Preset.GAUSSIAN
    width: float = 1.0
    modulation: float = 0.0
    decay: float = 1.0
    radius: float = 1.0

    times: List[float] = [0.0, 1.0, 2.0]
    samples: int = 10000
    range_lo: float = -10.0
    range_hi: float = 10.0
    p: float = 4.0 / 3.0

    delta: float = 0.05
    amplitude_constant: float = 10.0
    max_bubbles: int = 64
    ortho_threshold: float = 100.0

    axis: str = "space"
    separations: List[float] = [10.0, 100.0, 1000.0]
    Ns: List[float] = [4.0, 8.0, 16.0, 32.0, 64.0]

    iters: int = 200
    step_tol: float = 1e-7

    seed: int = 7
    output_dir: Path = Path("results")

    @field_validator("times", "separations", "Ns", mode="before")
    @classmethod
    def _lists(cls, v):
        return _split_list(v)

    @field_validator("mu")
    @classmethod
    def _mu(cls, v: float) -> float:
        if not math.isfinite(v) or v < 0:
            raise ValueError(
                "mu must be >= 0 (mu < 0 admits no refined Strichartz estimate)"
            )
        return v

    @field_validator("count")
    @classmethod
    def _count(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and (v < 4 or v & (v - 1)):
            raise ValueError("count must be a power of two >= 4")
        return v

    @field_validator("length", "t_max", "width", "radius", "step_tol")
    @classmethod
    def _positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not (math.isfinite(v) and v > 0):
            raise ValueError("must be finite and > 0")
        return v

    @field_validator("steps")
    @classmethod
    def _steps(cls, v: int) -> int:
        if v < 2 or v % 2:
            raise ValueError("steps must be an even integer >= 2")
        return v

    @field_validator("samples", "iters", "max_bubbles")
    @classmethod
    def _at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("p")
    @classmethod
    def _p(cls, v: float) -> float:
        if not (math.isfinite(v) and v > 1):
            raise ValueError("p must be > 1")
        return v

    @field_validator("axis")
    @classmethod
    def _axis(cls, v: str) -> str:
        if v not in ("space", "frequency", "scale"):
            raise ValueError("axis must be one of space, frequency, scale")
        return v

    @model_validator(mode="after")
    def _ranges(self) -> "RunConfig":
        if not self.range_lo < self.range_hi:
            raise ValueError("range_lo must be < range_hi")
        if any(b <= a for a, b in zip(self.Ns, self.Ns[1:])):
            raise ValueError("Ns must be strictly increasing")
        if any(n <= 0 for n in self.Ns):
            raise ValueError("Ns must be > 0")
        if any(s <= 0 for s in self.separations):
            raise ValueError("separations must be > 0")
        return self

    def spatial_grid(self) -> SpatialGrid:
        length, count = DEFAULT_GRIDS.get(self.subcommand, FALLBACK_GRID)
        length = self.length if self.length is not None else length
        count = self.count if self.count is not None else count
        return SpatialGrid(center=self.center, spacing=length / count, count=count)

    def window(self) -> TimeWindow:
        return TimeWindow(t_max=self.t_max, steps=self.steps, tail_policy=self.tail_policy)

    def dispersion(self) -> DispersionParams:
        return DispersionParams(mu=self.mu)

    def extraction(self) -> ExtractionConfig:
        return ExtractionConfig(
            delta=self.delta,
            p=self.p,
            amplitude_constant=self.amplitude_constant,
            max_bubbles=self.max_bubbles,
            ortho_threshold=self.ortho_threshold,
        )

    def config_hash(self) -> str:
        """sha256 of the canonical JSON form."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
