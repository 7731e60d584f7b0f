from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from feynman_checkers.errors import UnreachableSiteError
from feynman_checkers.lattice import (
    MassParam,
    RotatedSite,
    Site,
    SiteClass,
    as_mass,
    classify,
    from_rotated,
    is_reachable,
    to_rotated,
)


@pytest.mark.parametrize(
    "n, tau, expected",
    [
        (1, 1, SiteClass.CONE_BOUNDARY),
        (-1, 1, SiteClass.UNREACHABLE),
        (0, 4, SiteClass.INTERIOR),
        (4, 4, SiteClass.CONE_BOUNDARY),
        (-4, 4, SiteClass.UNREACHABLE),  # the first step is always up-right
        (-2, 4, SiteClass.INTERIOR),
        (0, 3, SiteClass.UNREACHABLE),
        (5, 3, SiteClass.UNREACHABLE),
    ],
)
def test_classify(n, tau, expected):
    assert classify(Site(n, tau)) is expected


def test_site_rejects_nonpositive_time():
    with pytest.raises(ValueError):
        Site(0, 0)


def test_rotated_example():
    assert to_rotated(Site(0, 4)) == RotatedSite(2, 2)
    assert to_rotated(Site(1, 1)) == RotatedSite(1, 0)
    with pytest.raises(UnreachableSiteError):
        to_rotated(Site(0, 3))


@given(st.integers(1, 300), st.integers(0, 300))
def test_rotation_roundtrip(lam, mu):
    s = from_rotated(RotatedSite(lam, mu))
    assert s.reachable
    assert to_rotated(s) == RotatedSite(lam, mu)


@given(st.integers(-50, 50), st.integers(1, 50))
def test_reachability_matches_definition(n, tau):
    expected = (n + tau) % 2 == 0 and -tau < n <= tau
    assert is_reachable(n, tau) == expected
    assert Site(n, tau).reachable == expected


def test_mass_parsing():
    m = as_mass("3/7")
    assert m.exact and m.value == Fraction(3, 7)
    assert (m.numerator, m.denominator) == (3, 7)
    assert as_mass(1).value == Fraction(1)
    f = as_mass("0.5")
    assert not f.exact and f.value == 0.5
    assert not as_mass(0.25).exact
    with pytest.raises(ValueError):
        as_mass("0.5", exact=True)
    with pytest.raises(ValueError):
        as_mass(-1)


def test_float_mass_has_no_fraction_parts():
    with pytest.raises(TypeError):
        MassParam(0.5, exact=False).numerator
