"""Lattice coordinates, light-cone classification and the mass parameter.

Everything is dimensionless: a site ``(n, tau)`` stands for the lattice
point ``(n*eps, tau*eps)`` and only the product ``m*eps`` enters any formula.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import UnreachableSiteError


@dataclass(frozen=True, order=True)
class Site:
    n: int
    tau: int

    def __post_init__(self):
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")

    @property
    def reachable(self) -> bool:
        return is_reachable(self.n, self.tau)


@dataclass(frozen=True, order=True)
class RotatedSite:
    lam: int
    mu_row: int

    def __post_init__(self):
        if self.lam < 1 or self.mu_row < 0:
            raise ValueError(f"need lam >= 1 and mu_row >= 0, got {self}")


class SiteClass(enum.Enum):
    UNREACHABLE = "unreachable"
    CONE_BOUNDARY = "cone-boundary"
    INTERIOR = "interior"


def is_reachable(n: int, tau: int) -> bool:
    # (-tau, tau) lies on the cone but the first step is always up-right
    return tau >= 1 and (n + tau) % 2 == 0 and -tau < n <= tau


def to_rotated(s: Site) -> RotatedSite:
    if not s.reachable:
        raise UnreachableSiteError(f"site (n={s.n}, tau={s.tau}) is not reachable")
    return RotatedSite((s.tau + s.n) // 2, (s.tau - s.n) // 2)


def from_rotated(r: RotatedSite) -> Site:
    return Site(r.lam - r.mu_row, r.lam + r.mu_row)


def classify(s: Site) -> SiteClass:
    if not s.reachable:
        return SiteClass.UNREACHABLE
    if s.n == s.tau:
        return SiteClass.CONE_BOUNDARY
    return SiteClass.INTERIOR


@dataclass(frozen=True)
class MassParam:
    """Dimensionless mass ``m*eps``.

    Exact masses carry a :class:`~fractions.Fraction`; floating masses a
    ``float``.  Use :func:`as_mass` to build one from user input.
    """

    value: Fraction | float
    exact: bool = True

    def __post_init__(self):
        if self.value < 0:
            raise ValueError(f"mass must be nonnegative, got {self.value}")
        if self.exact and not isinstance(self.value, Fraction):
            raise TypeError("exact mass requires a Fraction value")

    @property
    def numerator(self) -> int:
        return self._frac().numerator

    @property
    def denominator(self) -> int:
        return self._frac().denominator

    def _frac(self) -> Fraction:
        if not self.exact:
            raise TypeError("floating mass has no exact numerator/denominator")
        return self.value

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return str(self.value)


def as_mass(value, exact: bool | None = None) -> MassParam:
    """Coerce ``value`` to a :class:`MassParam`.

    Integers, Fractions and ``"p/q"`` strings are exact; floats and decimal
    strings such as ``"0.5"`` are floating unless ``exact`` says otherwise.
    A decimal string is never promoted to an exact rational.
    """
    if isinstance(value, MassParam):
        if exact is None or exact == value.exact:
            return value
        value = value.value
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            if exact:
                raise ValueError(f"decimal mass {text!r} cannot be used in exact mode")
            return MassParam(float(text), exact=False)
        value = Fraction(text)
    if isinstance(value, bool):
        raise TypeError("mass must be numeric")
    if isinstance(value, Rational):
        frac = Fraction(value)
        if exact is False:
            return MassParam(float(frac), exact=False)
        return MassParam(frac, exact=True)
    if isinstance(value, float):
        if exact:
            raise ValueError("exact mode requires a rational mass")
        return MassParam(value, exact=False)
    raise TypeError(f"cannot interpret {value!r} as a mass")
