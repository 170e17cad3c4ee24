"""
Dyadic intervals and the maximal admissible (Whitney) pairing of the off-diagonal.

A pair (I, I') of equal-length dyadic intervals is admissible when
dist(I, I') >= 4|I|, and maximal when the parent pair is not admissible.
Every (xi, xi') with xi != xi' lies in exactly one maximal pair.
"""

import math
from typing import List

import numpy as np

from src.models.dyadic import DyadicInterval, WhitneyPair
from src.models.reports import PartitionReport
from src.utils.errors import InvalidArgumentError, NoPairError
from src.utils.logger import get_logger

logger = get_logger(__name__)

ADMISSIBLE_RATIO = 4
DIRECTIONS = ("top_down", "bottom_up")


def dyadic_interval_containing(xi: float, level: int) -> DyadicInterval:
    if not math.isfinite(xi):
        raise InvalidArgumentError("xi must be finite", "xi")
    return DyadicInterval(level=level, index=math.floor(math.ldexp(xi, -level)))


def parent(interval: DyadicInterval) -> DyadicInterval:
    return DyadicInterval(level=interval.level + 1, index=interval.index // 2)


def distance(a: DyadicInterval, b: DyadicInterval) -> float:
    return max(0.0, b.left - a.right, a.left - b.right)


def is_admissible(a: DyadicInterval, b: DyadicInterval) -> bool:
    return a.level == b.level and distance(a, b) >= ADMISSIBLE_RATIO * a.length


def is_maximal(a: DyadicInterval, b: DyadicInterval) -> bool:
    return is_admissible(a, b) and not is_admissible(parent(a), parent(b))


def level_bounds(xi: float, xi_prime: float) -> range:
    """Levels that can hold the maximal pair; dist in [4|I|, 10|I|] pins |I| near |xi - xi'|."""
    gap = math.log2(abs(xi - xi_prime))
    return range(math.floor(gap) - 4, math.ceil(gap) + 2)


def _pair_at(xi: float, xi_prime: float, level: int) -> WhitneyPair:
    return WhitneyPair(
        I=dyadic_interval_containing(xi, level),
        Iprime=dyadic_interval_containing(xi_prime, level),
    )


def whitney_pair(xi: float, xi_prime: float, direction: str = "top_down") -> WhitneyPair:
    """The unique maximal admissible pair with xi in I and xi' in I'."""
    if direction not in DIRECTIONS:
        raise InvalidArgumentError(f"unknown search direction {direction!r}", "direction")
    if not (math.isfinite(xi) and math.isfinite(xi_prime)):
        raise InvalidArgumentError("xi and xi' must be finite", "xi")
    if xi == xi_prime:
        raise NoPairError("the diagonal xi = xi' lies in no Whitney pair", "xi_prime")

    levels = level_bounds(xi, xi_prime)
    if direction == "top_down":
        # Descend until the containing intervals become admissible.
        for level in reversed(levels):
            pair = _pair_at(xi, xi_prime, level)
            if is_admissible(pair.I, pair.Iprime):
                if is_maximal(pair.I, pair.Iprime):
                    return pair
                break
    else:
        pair = _pair_at(xi, xi_prime, levels.start)
        if is_admissible(pair.I, pair.Iprime):
            while is_admissible(parent(pair.I), parent(pair.Iprime)):
                pair = WhitneyPair(I=parent(pair.I), Iprime=parent(pair.Iprime))
            return pair
    raise NoPairError(
        f"no maximal pair found for ({xi!r}, {xi_prime!r}) within levels "
        f"[{levels.start}, {levels.stop - 1}]",
        "xi",
    )


def covering_pairs(xi: float, xi_prime: float) -> List[WhitneyPair]:
    """All maximal admissible pairs containing (xi, xi'), searched on a widened level range."""
    levels = level_bounds(xi, xi_prime)
    found = []
    for level in range(levels.start - 4, levels.stop + 4):
        pair = _pair_at(xi, xi_prime, level)
        if is_maximal(pair.I, pair.Iprime):
            found.append(pair)
    return found


def partners(interval: DyadicInterval, lo: float, hi: float) -> List[DyadicInterval]:
    """Intervals I' meeting [lo, hi] with (interval, I') a maximal admissible pair."""
    out = []
    # Maximality forces |k - k'| <= 9, see the parent distance bound.
    for offset in range(-12, 13):
        other = DyadicInterval(level=interval.level, index=interval.index + offset)
        if other.right <= lo or other.left > hi:
            continue
        if is_maximal(interval, other):
            out.append(other)
    return out


def verify_partition(lo: float, hi: float, samples: int, seed: int) -> PartitionReport:
    """Monte Carlo check that maximal pairs cover the off-diagonal of [lo, hi]^2 exactly once."""
    if samples < 1:
        raise InvalidArgumentError("samples must be >= 1", "samples")
    if not lo < hi:
        raise InvalidArgumentError(f"empty range [{lo}, {hi}]", "range")

    rng = np.random.default_rng(seed)
    violations = 0
    multiplicity = 0
    seen = set()
    drawn = 0
    while drawn < samples:
        xi, xi_prime = rng.uniform(lo, hi, size=2)
        if xi == xi_prime:
            continue
        drawn += 1
        pairs = covering_pairs(float(xi), float(xi_prime))
        if len(pairs) != 1:
            violations += 1
            logger.warning(
                "Whitney cover multiplicity differs from one",
                xi=float(xi),
                xi_prime=float(xi_prime),
                count=len(pairs),
            )
            continue
        interval = pairs[0].I
        if (interval.level, interval.index) not in seen:
            seen.add((interval.level, interval.index))
            multiplicity = max(multiplicity, len(partners(interval, lo, hi)))

    logger.info(
        "Verified Whitney partition",
        samples=samples,
        violations=violations,
        max_multiplicity=multiplicity,
    )
    return PartitionReport(
        samples=samples,
        violations=violations,
        max_multiplicity=multiplicity,
        lo=lo,
        hi=hi,
        seed=seed,
    )
