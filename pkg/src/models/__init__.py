# Re-export the value types so callers can import them from one place.

from src.models.dyadic import DyadicInterval, WhitneyPair
from src.models.grid import Field, FrequencyGrid, SpaceTimeField, SpatialGrid, Spectrum
from src.models.params import (
    DispersionParams,
    ExtractionConfig,
    ProfileParams,
    Propagator,
    ScaleFreq,
    TailPolicy,
    TimeWindow,
)
from src.models.run_config import RunConfig, Subcommand

__all__ = [
    "DyadicInterval",
    "WhitneyPair",
    "Field",
    "FrequencyGrid",
    "SpaceTimeField",
    "SpatialGrid",
    "Spectrum",
    "DispersionParams",
    "ExtractionConfig",
    "ProfileParams",
    "Propagator",
    "ScaleFreq",
    "TailPolicy",
    "TimeWindow",
    "RunConfig",
    "Subcommand",
]
