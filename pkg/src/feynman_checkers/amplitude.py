"""Checker-path amplitudes by three independent routes.

* :func:`amplitude_dp` / :func:`amplitude_row_dp` -- the forward Dirac
  recurrence, row by row from ``a(1, 1) = i``;
* :func:`amplitude_closed_form` -- the two alternating binomial sums;
* :func:`amplitude_oracle` -- literal enumeration of checker paths.

Exact mode works over the integers.  For a rational mass ``p/q`` the row at
time ``tau`` is stored as integer numerators ``N1, N2`` with

    a = (N1 + i N2) / q**(tau-1) / (1 + (p/q)**2)**((tau-1)/2)

so that ``A1 = N1 / q**(tau-1)`` and ``P = (N1**2 + N2**2) / (p**2 + q**2)**(tau-1)``
are exact.  Rows are indexed by ``lam = (tau + n) // 2`` running from 1 to
``tau``; the unreachable corner ``n = -tau`` is not stored.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .config import LIMITS
from .errors import HypothesisViolation, UnreachableSiteError
from .lattice import MassParam, Site, SiteClass, as_mass, classify, is_reachable

MODES = ("exact", "float")


def resolve_mass(m, mode: str) -> MassParam:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return as_mass(m, exact=(mode == "exact"))


@dataclass(frozen=True)
class Amplitude:
    a1: float
    a2: float

    @property
    def prob(self) -> float:
        return self.a1 * self.a1 + self.a2 * self.a2


@dataclass(frozen=True)
class ExactAmplitude:
    """``(A1 + i*A2) / (1 + mass**2)**(k/2)`` with rational ``A1``, ``A2``."""

    A1: Fraction
    A2: Fraction
    k: int
    mass: Fraction

    @property
    def prob(self) -> Fraction:
        return (self.A1 ** 2 + self.A2 ** 2) / (1 + self.mass ** 2) ** self.k

    def is_zero(self) -> bool:
        return self.A1 == 0 and self.A2 == 0

    def to_float(self) -> Amplitude:
        # one rounding per component: divide exactly, then by at most one sqrt
        norm = (1 + self.mass ** 2) ** (self.k // 2)
        odd = math.sqrt(1 + self.mass ** 2) if self.k % 2 else 1.0
        return Amplitude(float(self.A1 / norm) / odd, float(self.A2 / norm) / odd)

    @property
    def a1(self) -> float:
        return self.to_float().a1

    @property
    def a2(self) -> float:
        return self.to_float().a2


@dataclass(frozen=True, eq=False)
class AmplitudeRow:
    """All amplitudes at one time ``tau``.

    ``c1``/``c2`` are indexed by ``lam - 1``.  In exact mode they hold the
    integer numerators described in the module docstring, in float mode the
    amplitudes themselves.
    """

    tau: int
    mass: MassParam
    c1: Sequence
    c2: Sequence

    @property
    def exact(self) -> bool:
        return self.mass.exact

    @property
    def scale(self) -> int:
        """Common denominator of ``A1``/``A2`` in exact mode."""
        return self.mass.denominator ** (self.tau - 1)

    @property
    def prob_denominator(self) -> int:
        """Common denominator of all probabilities in exact mode."""
        p, q = self.mass.numerator, self.mass.denominator
        return (p * p + q * q) ** (self.tau - 1)

    def sites(self) -> range:
        return range(2 - self.tau, self.tau + 1, 2)

    def __len__(self) -> int:
        return self.tau

    def __getitem__(self, n: int):
        if not is_reachable(n, self.tau):
            return zero_amplitude(self.tau, self.mass)
        i = (self.tau + n) // 2 - 1
        if self.exact:
            s = self.scale
            return ExactAmplitude(Fraction(self.c1[i], s), Fraction(self.c2[i], s), self.tau - 1, self.mass.value)
        return Amplitude(float(self.c1[i]), float(self.c2[i]))

    @property
    def entries(self) -> dict:
        return {n: self[n] for n in self.sites()}

    def chirality_probs(self) -> tuple[list, list]:
        """Per-site ``(p_minus, p_plus)`` lists in site order.

        ``p_minus = a1**2`` (last move up-left), ``p_plus = a2**2``.
        """
        if self.exact:
            d = self.prob_denominator
            return ([Fraction(x * x, d) for x in self.c1], [Fraction(y * y, d) for y in self.c2])
        c1 = np.asarray(self.c1, dtype=float)
        c2 = np.asarray(self.c2, dtype=float)
        return (list(c1 * c1), list(c2 * c2))

    def sum_squares(self) -> tuple:
        """``(sum a1**2, sum a2**2)`` over the row."""
        if self.exact:
            d = self.prob_denominator
            return (Fraction(sum(x * x for x in self.c1), d), Fraction(sum(y * y for y in self.c2), d))
        c1 = np.asarray(self.c1, dtype=float)
        c2 = np.asarray(self.c2, dtype=float)
        return (math.fsum(c1 * c1), math.fsum(c2 * c2))

    def __eq__(self, other):
        if not isinstance(other, AmplitudeRow):
            return NotImplemented
        return self.tau == other.tau and self.entries == other.entries


def zero_amplitude(tau: int, mass: MassParam):
    if mass.exact:
        return ExactAmplitude(Fraction(0), Fraction(0), tau - 1, mass.value)
    return Amplitude(0.0, 0.0)


# --------------------------------------------------------------------------
# forward recurrence


def _seed(mass: MassParam):
    if mass.exact:
        return [0], [1]
    return np.zeros(1), np.ones(1)


def _step(c1, c2, mass: MassParam):
    """Advance one row: ``tau`` entries in, ``tau + 1`` out."""
    if mass.exact:
        p, q = mass.numerator, mass.denominator
        n1 = [q * x + p * y for x, y in zip(c1, c2)]
        n1.append(0)
        n2 = [0]
        n2.extend(q * y - p * x for x, y in zip(c1, c2))
        return n1, n2
    me = float(mass.value)
    s = math.sqrt(1.0 + me * me)
    t = len(c1)
    n1 = np.zeros(t + 1)
    n2 = np.zeros(t + 1)
    n1[:t] = (c1 + me * c2) / s
    n2[1:] = (c2 - me * c1) / s
    return n1, n2


def propagate(mass: MassParam, tau_max: int, absorbing: Mapping[int, set[int]] | None = None) -> Iterator[tuple]:
    """Yield ``(tau, c1, c2)`` for ``tau = 1 .. tau_max``.

    ``absorbing`` maps ``tau`` to a set of ``lam`` indices.  The yielded row
    holds arrival values (paths may end at an absorbing site); those sites
    are zeroed before the next step so no path passes through them.
    Callers must not mutate the yielded sequences.
    """
    LIMITS.check(tau_max, "exact" if mass.exact else "float")
    c1, c2 = _seed(mass)
    for tau in range(1, tau_max + 1):
        if tau > 1:
            c1, c2 = _step(c1, c2, mass)
        yield tau, c1, c2
        if absorbing and tau in absorbing:
            c1, c2 = _copy(c1), _copy(c2)
            for lam in absorbing[tau]:
                if 1 <= lam <= tau:
                    c1[lam - 1] = 0
                    c2[lam - 1] = 0


def _copy(c):
    return c.copy() if isinstance(c, np.ndarray) else list(c)


def iter_rows(m, mode: str = "exact", tau_max: int = 1) -> Iterator[AmplitudeRow]:
    """Yield :class:`AmplitudeRow` for every time ``1 .. tau_max``."""
    mass = resolve_mass(m, mode)
    for tau, c1, c2 in propagate(mass, tau_max):
        yield AmplitudeRow(tau, mass, c1, c2)


def amplitude_row_dp(tau: int, m, mode: str = "exact") -> AmplitudeRow:
    if tau < 1:
        raise ValueError("tau must be >= 1")
    row = None
    for row in iter_rows(m, mode, tau):
        pass
    return row


def amplitude_dp(s: Site, m, mode: str = "exact"):
    mass = resolve_mass(m, mode)
    LIMITS.check(s.tau, mode)
    if not s.reachable:
        return zero_amplitude(s.tau, mass)
    return amplitude_row_dp(s.tau, mass, mode)[s.n]


# --------------------------------------------------------------------------
# downward recurrence


def row_down(row_above: AmplitudeRow) -> AmplitudeRow:
    """Reconstruct the row at ``tau`` from the row at ``tau + 1``."""
    tau = row_above.tau - 1
    if tau < 1:
        raise ValueError("cannot step below tau = 1")
    if len(row_above.c1) != row_above.tau or len(row_above.c2) != row_above.tau:
        raise ValueError("row shape does not match its tau")
    mass = row_above.mass
    u1, u2 = row_above.c1, row_above.c2
    if mass.exact:
        p, q = mass.numerator, mass.denominator
        d = p * p + q * q
        c1 = [_intify(Fraction(q * u1[i] - p * u2[i + 1], d)) for i in range(tau)]
        c2 = [_intify(Fraction(q * u2[i + 1] + p * u1[i], d)) for i in range(tau)]
        return AmplitudeRow(tau, mass, c1, c2)
    me = float(mass.value)
    s = math.sqrt(1.0 + me * me)
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    return AmplitudeRow(tau, mass, (u1[:tau] - me * u2[1:]) / s, (u2[1:] + me * u1[:tau]) / s)


def _intify(x: Fraction):
    return x.numerator if x.denominator == 1 else x


def amplitude_down(s: Site, row_above: AmplitudeRow, m=None):
    """Amplitude at ``s`` recovered from the row one step later in time."""
    if row_above.tau != s.tau + 1:
        raise ValueError(f"row_above must be at tau={s.tau + 1}, got {row_above.tau}")
    if m is not None:
        mass = as_mass(m, exact=row_above.exact)
        if mass != row_above.mass:
            raise ValueError("mass does not match the row")
    return row_down(row_above)[s.n]


# --------------------------------------------------------------------------
# closed forms


def amplitude_closed_form(s: Site, m, mode: str = "exact"):
    """Evaluate the binomial-sum formulas at an interior site."""
    mass = resolve_mass(m, mode)
    cls = classify(s)
    if cls is SiteClass.UNREACHABLE:
        raise UnreachableSiteError(f"site (n={s.n}, tau={s.tau}) is not reachable")
    if cls is SiteClass.CONE_BOUNDARY:
        raise HypothesisViolation("the binomial formulas need tau > |n|; use amplitude_edge on the boundary")
    lam, mu = (s.tau + s.n) // 2, (s.tau - s.n) // 2
    a, b = lam - 1, mu - 1
    tau = s.tau
    if mass.exact:
        p, q = mass.numerator, mass.denominator
        re = _binomial_sum(a, b, 0, lambda r: p ** (2 * r + 1) * q ** (tau - 2 - 2 * r))
        im = _binomial_sum(a, b, 1, lambda r: p ** (2 * r) * q ** (tau - 1 - 2 * r))
        scale = q ** (tau - 1)
        return ExactAmplitude(Fraction(re, scale), Fraction(im, scale), tau - 1, mass.value)
    me = float(mass.value)
    norm = (1.0 + me * me) ** ((1 - tau) / 2)
    re = _binomial_sum(a, b, 0, lambda r: me ** (2 * r + 1))
    im = _binomial_sum(a, b, 1, lambda r: me ** (2 * r))
    return Amplitude(re * norm, im * norm)


def _binomial_sum(a: int, b: int, shift: int, power):
    """``sum_r (-1)**r C(a, r) C(b, r - shift) power(r)`` over ``r >= shift``."""
    total = 0
    ca = 1  # C(a, r)
    cb = 1  # C(b, r - shift) once r >= shift
    for r in range(a + 1):
        j = r - shift
        if j > b:
            break
        if j >= 0:
            term = ca * cb * power(r)
            total += -term if r % 2 else term
            cb = cb * (b - j) // (j + 1)
        ca = ca * (a - r) // (r + 1)
    return total


def amplitude_edge(s: Site, m, mode: str = "exact"):
    """Closed forms on the right cone edge and next to the left edge."""
    mass = resolve_mass(m, mode)
    if s.n == s.tau:
        re, im = 0, 1
    elif s.n == 2 - s.tau:
        re, im = mass.value, 0
    else:
        raise HypothesisViolation(f"site (n={s.n}, tau={s.tau}) is not an edge site")
    if mass.exact:
        return ExactAmplitude(Fraction(re), Fraction(im), s.tau - 1, mass.value)
    norm = (1.0 + float(mass.value) ** 2) ** ((1 - s.tau) / 2)
    return Amplitude(float(re) * norm, float(im) * norm)


# --------------------------------------------------------------------------
# brute-force path enumeration


def enumerate_paths(s: Site) -> Iterator[tuple[int, ...]]:
    """All checker paths to ``s`` as step tuples (+1 up-right, -1 up-left)."""
    if (s.n + s.tau) % 2 or abs(s.n) > s.tau:
        return
    lefts = (s.tau - s.n) // 2
    rest = s.tau - 1
    if lefts > rest:
        return
    for pos in itertools.combinations(range(rest), lefts):
        steps = [1] * rest
        for i in pos:
            steps[i] = -1
        yield (1, *steps)


def count_turns(steps: Sequence[int]) -> int:
    return sum(1 for x, y in zip(steps, steps[1:]) if x != y)


def count_paths(s: Site) -> int:
    return sum(1 for _ in enumerate_paths(s))


def amplitude_oracle(s: Site, m, mode: str = "exact"):
    """Sum ``(-i*m*eps)**turns`` over every checker path, then normalize."""
    mass = resolve_mass(m, mode)
    LIMITS.check(s.tau, "oracle")
    tau = s.tau
    if mass.exact:
        p, q = mass.numerator, mass.denominator
        weight = lambda t: p ** t * q ** (tau - 1 - t)  # noqa: E731
    else:
        me = float(mass.value)
        weight = lambda t: me ** t  # noqa: E731
    # i * (-i)**t cycles through i, 1, -i, -1 as t goes 0, 1, 2, 3
    re = im = 0
    for steps in enumerate_paths(s):
        t = count_turns(steps)
        w = weight(t)
        r = t % 4
        if r == 0:
            im += w
        elif r == 1:
            re += w
        elif r == 2:
            im -= w
        else:
            re -= w
    if mass.exact:
        scale = mass.denominator ** (tau - 1)
        return ExactAmplitude(Fraction(re, scale), Fraction(im, scale), tau - 1, mass.value)
    norm = (1.0 + me * me) ** ((1 - tau) / 2)
    return Amplitude(re * norm, im * norm)


def symmetry_violations(tau_max: int, m) -> list[tuple[str, Site]]:
    """Sites where ``a1(n) = a1(-n)`` or ``(tau-n) a2(n) = (tau+n-2) a2(2-n)`` fails (exact)."""
    bad = []
    for row in iter_rows(m, "exact", tau_max):
        tau = row.tau
        for n in row.sites():
            a, mirror = row[n], row[-n]
            if a.A1 != mirror.A1:
                bad.append(("a1-even", Site(n, tau)))
            if (tau - n) * a.A2 != (tau + n - 2) * row[2 - n].A2:
                bad.append(("a2-reflection", Site(n, tau)))
    return bad
