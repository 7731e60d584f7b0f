import math
import warnings
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from tables import PROBABILITY

from feynman_checkers.errors import HypothesisViolation
from feynman_checkers.lattice import Site
from feynman_checkers.stats import (
    _cmp_sqrt,
    central_binomial_series,
    ct_sequence,
    distribution,
    flea_distribution,
    flea_velocity_check,
    left_prob_limit,
    left_prob_series,
    limit_velocity,
    mean_avg_velocity,
    mean_inst_velocity,
    nonzero_scan,
    rate_check,
    sum_a1_squared,
    velocity_identity_check,
    velocity_report,
    velocity_series,
)


@pytest.mark.parametrize("m", [Fraction(1), Fraction(1, 2)])
def test_distribution_matches_table(m):
    d = distribution(4, m)
    assert sorted(d.entries) == [-2, 0, 2, 4]
    for n in d.entries:
        assert d.prob(n) == PROBABILITY[(n, 4)](m)
    assert d.total == 1


def test_large_float_distribution():
    d = distribution(1000, 1.0, "float")
    assert len(d.entries) == 1000
    assert d.total == pytest.approx(1.0, abs=1e-12)
    assert all(pm >= 0 and pp >= 0 for pm, pp in d.entries.values())


def test_nonzero_scan():
    assert nonzero_scan(30, Fraction(2, 5)) == []
    with pytest.raises(HypothesisViolation):
        nonzero_scan(10, 0)


def test_massless_has_zeros_inside():
    # with zero mass the walker moves on a straight line and the interior is empty
    d = distribution(6, 0)
    assert [n for n, (pm, pp) in d.entries.items() if pm + pp == 0] == [-4, -2, 0, 2, 4]


def test_small_velocities():
    # at T = 1 the only site is x = 1
    assert mean_avg_velocity(1, 1) == 1
    assert mean_inst_velocity(1, 1) == 1
    # T = 2: P(0) = y^2/(1+y^2) left-moving, P(2) = 1/(1+y^2) right-moving
    m = Fraction(1, 3)
    assert mean_avg_velocity(2, m) == Fraction(1, 1) / (1 + m * m)
    assert mean_inst_velocity(2, m) == (1 - m * m) / (1 + m * m)


@pytest.mark.parametrize("m", [Fraction(1), Fraction(3, 7)])
def test_velocity_identity(m):
    for T in (1, 2, 7, 40):
        check = velocity_identity_check(T, m)
        assert check.equal and check.lhs == check.rhs
    assert velocity_identity_check(2, 1).lhs == Fraction(1, 2)


def test_velocity_series_bounds():
    avg, inst = velocity_series(60, Fraction(2, 3))
    assert all(-1 <= v <= 1 for v in avg + inst)


def test_limit_velocity():
    assert limit_velocity(1) == pytest.approx(1 - 1 / math.sqrt(2))
    assert limit_velocity(0) == 1
    with pytest.warns(UserWarning):
        limit_velocity(2)


def test_velocity_report():
    r = velocity_report(500, 1)
    assert r.proved_range
    assert len(r.mean_inst_velocity) == 500
    assert abs(r.delta) < 2e-3
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not velocity_report(50, 2).proved_range


def test_rate_check_short_window():
    r = rate_check(1, (20, 40), (41, 300))
    assert r.C > 0
    assert r.holds and r.failures == []


def test_central_binomial_partial_sums():
    assert central_binomial_series(1) == 0
    assert central_binomial_series(2) == Fraction(1, 2)
    assert central_binomial_series(4) == Fraction(1, 4)
    assert central_binomial_series(6) == Fraction(7, 16)


@pytest.mark.parametrize("t", range(1, 41))
def test_left_prob_series(t):
    lhs, rhs = left_prob_series(t)
    assert lhs == rhs


def test_left_prob_series_only_at_unit_mass():
    with pytest.raises(HypothesisViolation):
        left_prob_series(4, Fraction(1, 2))
    assert left_prob_series(4) == (Fraction(1, 4), Fraction(1, 4))


def test_left_prob_limit():
    assert left_prob_limit(1) == pytest.approx(1 / (2 * math.sqrt(2)))
    # slow but visible approach
    assert abs(float(sum_a1_squared(300, 1)) - left_prob_limit(1)) < 0.02


@given(st.fractions(min_value=-10, max_value=10, max_denominator=50), st.fractions(min_value=Fraction(1, 50), max_value=10, max_denominator=50))
def test_cmp_sqrt(x, r):
    expected = (x > 0 and x * x > r) - (x <= 0 or x * x < r)
    assert _cmp_sqrt(x, r) == expected
    if abs(float(x) - math.sqrt(r)) > 1e-9:
        assert _cmp_sqrt(x, r) == (1 if float(x) > math.sqrt(r) else -1)


def test_ct_facts():
    ct = ct_sequence(120)
    assert ct.ok, ct.facts
    assert ct.sums[3] == Fraction(1, 4)
    # odd and even partners coincide
    assert all(ct.sums[t - 1] == ct.sums[t] for t in range(2, 120, 2))


@given(st.integers(1, 30), st.fractions(min_value=0, max_value=1, max_denominator=20))
def test_flea_velocity(T, p):
    mean, drift = flea_velocity_check(T, p)
    assert mean == drift


def test_flea_distribution():
    d = flea_distribution(2, Fraction(1, 2))
    assert d == {-2: Fraction(1, 4), 0: Fraction(1, 2), 2: Fraction(1, 4)}
    assert flea_velocity_check(50, Fraction(2, 3)) == (Fraction(1, 3), Fraction(1, 3))
    mean, drift = flea_velocity_check(10, 0.3)
    assert mean == pytest.approx(drift)
    with pytest.raises(ValueError):
        flea_distribution(3, Fraction(3, 2))


def test_distribution_prob_outside_row():
    d = distribution(3, 1)
    assert d.prob(5) == 0
    assert d.prob(1) == Fraction(1, 2)
    assert Site(1, 3).reachable
