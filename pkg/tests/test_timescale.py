"""Jump operators, classification, grids and serialization of time scales."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsmono.errors import InvalidTimeScale, PointNotInScale
from tsmono.timescale import TimeScale, classify, enumerate_grid, hybrid, rho, sigma


def test_sigma_examples():
    assert sigma(TimeScale.naturals(10), 1) == 2
    assert sigma(TimeScale.reals(0, 1), 0.5) == 0.5
    assert sigma(hybrid([(0, 1), 2]), 1) == 2


def test_rho_examples():
    assert rho(TimeScale.naturals(10), 3) == 2
    assert rho(TimeScale.reals(0, 1), 0.5) == 0.5
    assert rho(hybrid([1, (2, 3)]), 2) == 1


def test_classify_examples():
    assert classify(TimeScale.naturals(10), 2).kind == ("RightScattered", "LeftScattered")
    assert classify(TimeScale.reals(0, 1), 0.3).kind == ("RightDense", "LeftDense")
    assert classify(hybrid([(0, 1), 2]), 1).kind == ("RightScattered", "LeftDense")


def test_grid_examples():
    assert enumerate_grid(TimeScale.from_points([0, 1, 2]), 0.1) == [0, 1, 2]
    assert enumerate_grid(TimeScale.reals(0, 1), 0.5) == [0, 0.5, 1]
    assert enumerate_grid(hybrid([(0, 0.4), 1]), 0.2) == pytest.approx([0, 0.2, 0.4, 1])


def test_max_has_zero_graininess():
    T = TimeScale.naturals(5)
    assert T.sigma(5) == 5 and T.mu(5) == 0
    assert T.rho(0) == 0 and T.nu(0) == 0


def test_qpowers_successor():
    T = TimeScale.qpowers(2, 8)
    for k in range(8):
        assert T.sigma(2.0**k) == 2.0 ** (k + 1)


def test_membership_errors():
    T = TimeScale.naturals(10)
    with pytest.raises(PointNotInScale):
        T.sigma(1.5)
    with pytest.raises(PointNotInScale):
        TimeScale.reals(0, 1).rho(1.2)


def test_rejects_degenerate_and_overlapping():
    with pytest.raises(InvalidTimeScale):
        hybrid([(1, 1)])
    with pytest.raises(InvalidTimeScale):
        hybrid([(0, 2), (1, 3)])
    with pytest.raises(InvalidTimeScale):
        TimeScale.reals(2, 1)


def test_dict_round_trip():
    for T in (TimeScale.naturals(7), TimeScale.qpowers(1.5, 6), hybrid([(0, 1), 1.5, (3, 4)])):
        again = TimeScale.from_dict(T.to_dict())
        assert again.enumerate_grid(0.25) == T.enumerate_grid(0.25)


def test_restrict_keeps_endpoints():
    T = hybrid([(0, 1), 1.5, 2, (3, 4)])
    sub = T.restrict(0.5, 3.5)
    assert sub.min == 0.5 and sub.max == 3.5
    assert sub.contains(1.5) and not sub.contains(2.5)


# -- properties --------------------------------------------------------------

@st.composite
def scales(draw):
    n = draw(st.integers(1, 4))
    cuts = sorted(draw(st.lists(st.integers(0, 100), min_size=2 * n, max_size=2 * n, unique=True)))
    parts = []
    for i in range(n):
        lo, hi = cuts[2 * i] / 10, cuts[2 * i + 1] / 10
        parts.append((lo, hi) if draw(st.booleans()) else lo)
    return hybrid(parts)


@settings(max_examples=150, deadline=None)
@given(scales(), st.sampled_from([0.05, 0.1, 0.37, 1.0]))
def test_grid_is_increasing_subset(T, res):
    grid = T.enumerate_grid(res)
    assert all(x < y for x, y in zip(grid, grid[1:]))
    assert all(T.contains(t) for t in grid)
    assert set(T.scattered_points()) <= set(grid)
    assert grid[0] == T.min and grid[-1] == T.max


@settings(max_examples=150, deadline=None)
@given(scales())
def test_jump_invariants(T):
    for t in T.enumerate_grid(0.3):
        s, r = T.sigma(t), T.rho(t)
        assert r <= t <= s
        assert T.rho(s) <= s and T.sigma(r) >= r
        assert T.mu(t) >= 0 and T.nu(t) >= 0
        cls = T.classify(t)
        assert (T.mu(t) == 0) == (cls.right_dense or t == T.max)
        if not cls.right_dense and not cls.left_dense and T.min < t < T.max:
            assert T.rho(T.sigma(t)) == t


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 30))
def test_naturals_successor(n):
    T = TimeScale.naturals(n)
    assert all(T.sigma(k) == k + 1 for k in range(n))
    assert math.isclose(sum(T.mu(k) for k in range(n + 1)), n)
