import math

import pytest

from src.models.dyadic import DyadicInterval
from src.services.whitney import (
    covering_pairs,
    distance,
    dyadic_interval_containing,
    is_maximal,
    partners,
    verify_partition,
    whitney_pair,
)
from src.utils.errors import InvalidArgumentError, NoPairError


@pytest.mark.parametrize(
    "xi, level, left, right",
    [
        (0.5, 0, 0.0, 1.0),
        (-0.5, 0, -1.0, 0.0),
        (3.0, 1, 2.0, 4.0),
        (0.75, -2, 0.75, 1.0),
        (-3.0, 2, -4.0, 0.0),
    ],
)
def test_dyadic_interval_containing(xi, level, left, right):
    interval = dyadic_interval_containing(xi, level)
    assert (interval.left, interval.right) == (left, right)
    assert interval.contains(xi)


def test_pair_of_separated_points():
    pair = whitney_pair(0.5, 5.5)
    assert pair.I == DyadicInterval(level=0, index=0)
    assert pair.Iprime == DyadicInterval(level=0, index=5)
    assert pair.distance == 4.0

    mirrored = whitney_pair(5.5, 0.5)
    assert mirrored.I == pair.Iprime
    assert mirrored.Iprime == pair.I


def test_random_pairs_are_maximal(rng):
    for _ in range(500):
        xi, xi_prime = rng.uniform(-100, 100, size=2)
        pair = whitney_pair(xi, xi_prime)
        assert pair.I.contains(xi) and pair.Iprime.contains(xi_prime)
        assert is_maximal(pair.I, pair.Iprime)
        assert 4 * pair.I.length <= distance(pair.I, pair.Iprime) < 10 * pair.I.length
        assert whitney_pair(xi, xi_prime, "bottom_up") == pair
        assert covering_pairs(xi, xi_prime) == [pair]


def test_scale_covariance(rng):
    for _ in range(100):
        xi, xi_prime = rng.uniform(-10, 10, size=2)
        pair = whitney_pair(xi, xi_prime)
        doubled = whitney_pair(2 * xi, 2 * xi_prime)
        assert doubled.I.level == pair.I.level + 1
        assert (doubled.I.index, doubled.Iprime.index) == (pair.I.index, pair.Iprime.index)


def test_pair_errors():
    with pytest.raises(NoPairError):
        whitney_pair(1.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        whitney_pair(math.nan, 1.0)
    with pytest.raises(InvalidArgumentError):
        whitney_pair(0.0, 1.0, "sideways")


def test_partner_count():
    interval = DyadicInterval(level=0, index=0)
    found = partners(interval, -100.0, 100.0)
    assert sorted(p.index for p in found) == [-8, -7, -6, -5, 5, 6, 7, 8, 9]
    assert len(partners(DyadicInterval(level=0, index=1), -100.0, 100.0)) == 9


def test_verify_partition():
    report = verify_partition(-10.0, 10.0, 10_000, seed=7)
    assert report.violations == 0
    assert report.samples == 10_000
    assert report.max_multiplicity == 9


@pytest.mark.slow
def test_multiplicity_does_not_grow_with_range():
    small = verify_partition(-10.0, 10.0, 10_000, seed=7)
    large = verify_partition(-160.0, 160.0, 10_000, seed=7)
    assert large.violations == 0
    assert large.max_multiplicity == small.max_multiplicity


def test_verify_partition_rejects_bad_range():
    with pytest.raises(InvalidArgumentError):
        verify_partition(1.0, 1.0, 10, seed=0)
    with pytest.raises(InvalidArgumentError):
        verify_partition(0.0, 1.0, 0, seed=0)


def test_verify_partition_is_seeded():
    a = verify_partition(-10.0, 10.0, 200, seed=3)
    b = verify_partition(-10.0, 10.0, 200, seed=3)
    assert a == b
