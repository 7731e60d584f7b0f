import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from feynman_checkers.amplitude import amplitude_dp, amplitude_row_dp
from feynman_checkers.bypass import (
    BypassSet,
    amplitude_bypass,
    arrival_amplitudes,
    blocking_check,
    bypass_oracle,
    conservation_bypass,
    edge_fluxes,
    kirchhoff_check,
    random_staircase,
    staircase_set,
)
from feynman_checkers.errors import InvalidBypassSet, NonBlockingSetError
from feynman_checkers.lattice import RotatedSite, Site, from_rotated

rational_mass = st.fractions(min_value=0, max_value=4, max_denominator=9)


@st.composite
def small_site(draw, tau_max=8):
    tau = draw(st.integers(1, tau_max))
    lam = draw(st.integers(1, tau))
    return Site(2 * lam - tau, tau)


def test_single_point_example():
    T = BypassSet([(2, 2)])
    a = amplitude_bypass(Site(0, 4), T, 1)
    assert (a.A1, a.A2, a.k) == (-1, -1, 3)
    assert a.prob == Fraction(1, 4)


@given(rational_mass)
def test_single_point_example_any_mass(m):
    a = amplitude_bypass(Site(0, 4), BypassSet([(2, 2)]), m)
    assert a.prob == m**4 / (1 + m**2) ** 2


@given(st.lists(small_site(), max_size=5), small_site(), rational_mass)
def test_bypass_matches_enumeration(sites, s, m):
    T = BypassSet(sites)
    assert amplitude_bypass(s, T, m) == bypass_oracle(s, T, m)


@given(small_site(tau_max=20), rational_mass)
def test_empty_set_is_plain_amplitude(s, m):
    assert amplitude_bypass(s, BypassSet(), m) == amplitude_dp(s, m)


def test_endpoint_in_set():
    T = BypassSet([(2, 2), (0, 4)])
    assert amplitude_bypass(Site(0, 4), T, 1).prob == Fraction(1, 4)
    assert amplitude_bypass(Site(0, 4), T, 1, exclude_endpoint=False).is_zero()


def test_origin_rejected():
    with pytest.raises(InvalidBypassSet):
        BypassSet([(0, 0)])
    with pytest.raises(InvalidBypassSet):
        BypassSet.from_json("[[0, 0]]")


@pytest.mark.parametrize(
    "text",
    ["{", "{}", "[[1]]", "[[1, 2, 3]]", '[["1", 2]]', "[[1.5, 2]]", "[[true, 1]]", "[[1, -1]]"],
)
def test_malformed_json(text):
    with pytest.raises(InvalidBypassSet):
        BypassSet.from_json(text)


def test_json_roundtrip(tmp_path):
    T = BypassSet([(2, 2), (-1, 3), (1, 1)])
    path = tmp_path / "t.json"
    path.write_text(T.to_json(), encoding="utf-8")
    assert BypassSet.load(path) == T
    assert json.loads(T.to_json()) == [[1, 1], [2, 2], [-1, 3]]


def test_blocking():
    assert not blocking_check(BypassSet())
    assert not blocking_check(BypassSet([(2, 2)]))
    assert blocking_check(BypassSet([(1, 1)]))
    assert blocking_check(BypassSet.row(5))
    # missing the left end of the row leaves a path open
    assert not blocking_check(BypassSet(s for s in BypassSet.row(5) if s.n != -3))
    # unreachable members do not matter
    assert blocking_check(BypassSet([(1, 1), (-3, 3)]))
    with pytest.raises(ValueError):
        blocking_check(BypassSet.row(5), horizon=3)


def test_blocking_ignores_mass():
    # a set that blocks every path blocks at every mass, including zero
    T = staircase_set(2, 3)
    assert blocking_check(T)
    assert conservation_bypass(T, 0) == 1


@pytest.mark.parametrize("m", [Fraction(1), Fraction(3, 7), Fraction(5, 2)])
@pytest.mark.parametrize("tau", [1, 3, 5, 10])
def test_full_row_conservation(m, tau):
    assert conservation_bypass(BypassSet.row(tau), m) == 1


@pytest.mark.parametrize("m", [Fraction(1), Fraction(3, 7)])
def test_staircase_conservation(m):
    for mu_hat in range(1, 4):
        for n in range(1, 6):
            T = staircase_set(mu_hat, n)
            assert blocking_check(T)
            assert conservation_bypass(T, m) == 1


def test_staircase_shape():
    T = staircase_set(2, 3)
    expected = {from_rotated(RotatedSite(lam, 2)) for lam in (1, 2, 3)}
    expected |= {from_rotated(RotatedSite(5 - mu, mu)) for mu in (0, 1)}
    assert set(T) == expected


@pytest.mark.parametrize("m", [Fraction(1), Fraction(2, 3)])
def test_staircase_row_arrivals_are_left_moving(m):
    # a path reaching the row mu = mu_hat without touching it earlier must end up-left
    mu_hat, n = 2, 4
    T = staircase_set(mu_hat, n)
    rows = {row.tau: row for row in arrival_amplitudes(T, m)}
    for lam in range(1, n + 1):
        s = from_rotated(RotatedSite(lam, mu_hat))
        a = rows[s.tau][s.n]
        assert a.A2 == 0
        assert a.A1 == amplitude_dp(s, m).A1


@pytest.mark.parametrize("seed", range(5))
def test_random_staircases(seed):
    rng = random.Random(seed)
    for _ in range(8):
        T = random_staircase(rng)
        assert blocking_check(T)
        assert conservation_bypass(T, Fraction(3, 7)) == 1


def test_float_conservation():
    total = conservation_bypass(staircase_set(3, 5), 0.8, "float")
    assert total == pytest.approx(1.0, abs=1e-12)


def test_nonblocking_conservation_raises():
    with pytest.raises(NonBlockingSetError):
        conservation_bypass(BypassSet([(2, 2)]), 1)
    with pytest.raises(NonBlockingSetError):
        conservation_bypass(BypassSet(), 1)


@pytest.mark.parametrize("T", [BypassSet(), BypassSet([(2, 2)]), BypassSet([(0, 4), (1, 5), (-2, 6)])])
@pytest.mark.parametrize("m", [Fraction(1), Fraction(3, 7)])
def test_kirchhoff(T, m):
    assert kirchhoff_check(20, T, m) == []


def test_kirchhoff_float():
    assert kirchhoff_check(30, BypassSet([(2, 2), (1, 5)]), 0.6, "float") == []


def test_edge_fluxes_carry_unit_current():
    fluxes = edge_fluxes(6, BypassSet(), Fraction(1, 2))
    for tau in range(1, 7):
        assert sum(f.j for f in fluxes if f.target.tau == tau) == 1
    row = amplitude_row_dp(3, Fraction(1, 2))
    into = {f.source: f.j for f in fluxes if f.target == Site(1, 3)}
    a = row[1]
    assert into[Site(0, 2)] == a.A2**2 / Fraction(5, 4) ** 2
    assert into[Site(2, 2)] == a.A1**2 / Fraction(5, 4) ** 2
