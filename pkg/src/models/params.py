import enum
import math

from pydantic import BaseModel, ConfigDict, field_validator, model_validator


def _finite(v: float, name: str) -> float:
    if not math.isfinite(v):
        raise ValueError(f"{name} must be finite")
    return v


class Propagator(str, enum.Enum):
    FOURTH = "fourth"
    SCHRODINGER = "schrodinger"


class TailPolicy(str, enum.Enum):
    NONE = "none"
    DISPERSIVE = "dispersive"
    EXTRAPOLATE = "extrapolate"


class DispersionParams(BaseModel):
    """mu of i u_t - mu u_xx + u_xxxx = 0; phi_mu(xi) = xi^4 + mu xi^2."""

    model_config = ConfigDict(frozen=True)

    mu: float = 0.0

    @field_validator("mu")
    @classmethod
    def _nonnegative(cls, v: float) -> float:
        _finite(v, "mu")
        if v < 0:
            raise ValueError(
                "mu must be >= 0 (mu < 0 admits no refined Strichartz estimate)"
            )
        return v

    def symbol(self, xi):
        return xi**4 + self.mu * xi**2

    def group_velocity(self, xi):
        return 4.0 * xi**3 + 2.0 * self.mu * xi


class ProfileParams(BaseModel):
    """Symmetry tuple (h, xi, x0, t0) of one bubble."""

    model_config = ConfigDict(frozen=True)

    h: float
    xi: float = 0.0
    x0: float = 0.0
    t0: float = 0.0

    @model_validator(mode="after")
    def _valid(self) -> "ProfileParams":
        for name in ("h", "xi", "x0", "t0"):
            _finite(getattr(self, name), name)
        if self.h <= 0:
            raise ValueError("h must be > 0")
        return self


class ScaleFreq(BaseModel):
    """(rho, xi): half-width and center of a located frequency interval."""

    model_config = ConfigDict(frozen=True)

    rho: float
    xi: float

    @model_validator(mode="after")
    def _valid(self) -> "ScaleFreq":
        _finite(self.rho, "rho")
        _finite(self.xi, "xi")
        if self.rho <= 0:
            raise ValueError("rho must be > 0")
        return self

    @property
    def h(self) -> float:
        return 1.0 / self.rho


class TimeWindow(BaseModel):
    """Uniform samples of [-t_max, t_max]; steps+1 points so t = 0 is sampled."""

    model_config = ConfigDict(frozen=True)

    t_max: float = 40.0
    steps: int = 16000
    tail_policy: TailPolicy = TailPolicy.EXTRAPOLATE

    @field_validator("t_max")
    @classmethod
    def _positive(cls, v: float) -> float:
        _finite(v, "t_max")
        if v <= 0:
            raise ValueError("t_max must be > 0")
        return v

    @field_validator("steps")
    @classmethod
    def _even(cls, v: int) -> int:
        if v < 2 or v % 2:
            raise ValueError("steps must be an even integer >= 2")
        return v

    def scaled(self, factor: float) -> "TimeWindow":
        """Same sampling on [-factor*t_max, factor*t_max]."""
        return self.model_copy(update={"t_max": self.t_max * factor})


class ExtractionConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float = 0.05
    p: float = 4.0 / 3.0
    amplitude_constant: float = 10.0
    max_bubbles: int = 64
    ortho_threshold: float = 100.0
    # Matched-filter settings. core_window is a radius in the rescaled variable
    # of a piece; core_time_range is the dispersion phase accumulated across
    # the core band at the edge of the scanned time range.
    core_window: float = 32.0
    core_time_range: float = 64.0
    core_time_samples: int = 513

    @model_validator(mode="after")
    def _valid(self) -> "ExtractionConfig":
        for name in (
            "delta",
            "amplitude_constant",
            "ortho_threshold",
            "core_window",
            "core_time_range",
        ):
            value = getattr(self, name)
            _finite(value, name)
            if value <= 0:
                raise ValueError(f"{name} must be > 0")
        if not self.p > 1:
            raise ValueError("p must be > 1")
        if self.max_bubbles < 1:
            raise ValueError("max_bubbles must be >= 1")
        if self.core_time_samples < 3 or self.core_time_samples % 2 == 0:
            raise ValueError("core_time_samples must be odd and >= 3")
        return self
