import math

from pydantic import BaseModel, ConfigDict, model_validator


class DyadicInterval(BaseModel):
    """The half-open interval 2^level [index, index + 1)."""

    model_config = ConfigDict(frozen=True)

    level: int
    index: int

    @property
    def length(self) -> float:
        return math.ldexp(1.0, self.level)

    @property
    def left(self) -> float:
        return math.ldexp(float(self.index), self.level)

    @property
    def right(self) -> float:
        return math.ldexp(float(self.index + 1), self.level)

    def contains(self, xi: float) -> bool:
        return self.left <= xi < self.right


class WhitneyPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    I: DyadicInterval
    Iprime: DyadicInterval

    @model_validator(mode="after")
    def _same_level(self) -> "WhitneyPair":
        if self.I.level != self.Iprime.level:
            raise ValueError("paired intervals must have equal length")
        return self

    @property
    def distance(self) -> float:
        if self.I.index < self.Iprime.index:
            return max(0.0, self.Iprime.left - self.I.right)
        return max(0.0, self.I.left - self.Iprime.right)
