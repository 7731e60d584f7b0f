"""Distributions, velocities, the left-chirality series and the flea walk."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .amplitude import AmplitudeRow, amplitude_row_dp, iter_rows, resolve_mass
from .errors import HypothesisViolation
from .lattice import Site


@dataclass(frozen=True)
class Distribution:
    """``n -> (p_minus, p_plus)`` at one time; ``p_minus = a1**2``, ``p_plus = a2**2``."""

    tau: int
    entries: dict
    exact: bool

    @property
    def total(self):
        return _sum((pm + pp for pm, pp in self.entries.values()), self.exact)

    def prob(self, n: int):
        pm, pp = self.entries.get(n, (0, 0))
        return pm + pp


def _sum(values, exact: bool):
    return sum(values, Fraction(0)) if exact else math.fsum(values)


def _from_row(row: AmplitudeRow) -> Distribution:
    pm, pp = row.chirality_probs()
    entries = {n: (a, b) for n, a, b in zip(row.sites(), pm, pp)}
    return Distribution(row.tau, entries, row.exact)


def distribution(tau: int, m, mode: str = "exact") -> Distribution:
    return _from_row(amplitude_row_dp(tau, m, mode))


def nonzero_scan(tau_max: int, m) -> list[Site]:
    """Interior reachable sites with ``tau <= tau_max`` where ``P`` is exactly zero."""
    mass = resolve_mass(m, "exact")
    if mass.value == 0:
        raise HypothesisViolation("nonvanishing inside the cone needs positive mass")
    zeros = []
    for row in iter_rows(mass, "exact", tau_max):
        # the last entry is the cone edge n = tau, excluded from the interior
        for i in range(row.tau - 1):
            if row.c1[i] == 0 and row.c2[i] == 0:
                zeros.append(Site(2 * (i + 1) - row.tau, row.tau))
    return zeros


# --------------------------------------------------------------------------
# velocities


def _row_moments(row: AmplitudeRow):
    """``(sum n*P, sum P_plus - sum P_minus)`` for one row."""
    n = np.arange(2 - row.tau, row.tau + 1, 2)
    if row.exact:
        d = row.prob_denominator
        first = sum(int(k) * (x * x + y * y) for k, x, y in zip(n, row.c1, row.c2))
        inst = sum(y * y - x * x for x, y in zip(row.c1, row.c2))
        return Fraction(first, d), Fraction(inst, d)
    c1 = np.asarray(row.c1, dtype=float)
    c2 = np.asarray(row.c2, dtype=float)
    p = c1 * c1 + c2 * c2
    return math.fsum(n * p), math.fsum(c2 * c2) - math.fsum(c1 * c1)


def velocity_series(T_max: int, m, mode: str = "exact") -> tuple[list, list]:
    """Mean average and mean instantaneous velocity for every ``t = 1 .. T_max``."""
    avg, inst = [], []
    for row in iter_rows(m, mode, T_max):
        first, u = _row_moments(row)
        avg.append(first / row.tau)
        inst.append(u)
    return avg, inst


def mean_avg_velocity(T: int, m, mode: str = "exact"):
    row = amplitude_row_dp(T, m, mode)
    return _row_moments(row)[0] / T


def mean_inst_velocity(t: int, m, mode: str = "exact"):
    return _row_moments(amplitude_row_dp(t, m, mode))[1]


@dataclass(frozen=True)
class VelocityIdentity:
    lhs: Fraction
    rhs: Fraction
    equal: bool


def velocity_identity_check(T: int, m) -> VelocityIdentity:
    """Compare the mean of ``x/T`` with the time-average of mean chirality."""
    avg, inst = velocity_series(T, m, "exact")
    lhs = avg[-1]
    rhs = sum(inst, Fraction(0)) / T
    return VelocityIdentity(lhs, rhs, lhs == rhs)


def limit_velocity(m) -> float:
    me = float(m.value if hasattr(m, "value") else m)
    if me < 0:
        raise ValueError("mass must be nonnegative")
    if me > 1:
        warnings.warn(f"m*eps = {me} is outside the proved range 0 <= m*eps <= 1", stacklevel=2)
    return 1.0 - me / math.sqrt(1.0 + me * me)


@dataclass(frozen=True)
class VelocityReport:
    T: int
    mean_avg_velocity: float
    mean_inst_velocity: list = field(repr=False)
    limit: float
    delta: float
    proved_range: bool


def velocity_report(T: int, m, mode: str = "float") -> VelocityReport:
    mass = resolve_mass(m, mode)
    avg, inst = velocity_series(T, mass, mode)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lim = limit_velocity(mass)
    return VelocityReport(
        T=T,
        mean_avg_velocity=float(avg[-1]),
        mean_inst_velocity=[float(u) for u in inst],
        limit=lim,
        delta=float(avg[-1]) - lim,
        proved_range=float(mass.value) <= 1,
    )


@dataclass(frozen=True)
class RateCheck:
    C: float
    calibration: tuple[int, int]
    verification: tuple[int, int]
    worst_ratio: float
    failures: list
    holds: bool


def rate_check(m=1, calibration=(100, 200), verification=(201, 2000)) -> RateCheck:
    """Calibrate ``C`` in ``|E(v_T) - limit| <= C/T`` on one window, verify on another.

    ``C`` is the largest ``T * |E(v_T) - limit|`` seen over ``calibration``;
    ``failures`` lists every ``T`` in ``verification`` where the bound breaks.
    """
    avg, _ = velocity_series(verification[1], m, "float")
    lim = limit_velocity(m)
    scaled = {T: T * abs(avg[T - 1] - lim) for T in range(1, verification[1] + 1)}
    C = max(scaled[T] for T in range(calibration[0], calibration[1] + 1))
    window = range(verification[0], verification[1] + 1)
    failures = [T for T in window if scaled[T] > C]
    worst = max(scaled[T] for T in window) / C
    return RateCheck(C, tuple(calibration), tuple(verification), worst, failures, not failures)


# --------------------------------------------------------------------------
# left-chirality mass and its series


def sum_a1_squared(t: int, m, mode: str = "exact"):
    return amplitude_row_dp(t, m, mode).sum_squares()[0]


def central_binomial_series(t: int) -> Fraction:
    """``1/2 * sum_{k < t//2} C(2k, k) / (-4)**k``."""
    total = Fraction(0)
    term = Fraction(1)  # C(2k, k) / (-4)**k
    for k in range(t // 2):
        total += term
        term *= Fraction(-(2 * k + 1) * (2 * k + 2), 4 * (k + 1) ** 2)
    return total / 2


def left_prob_series(t: int, m=1) -> tuple[Fraction, Fraction]:
    """``(sum a1**2, series value)``; only defined for ``m*eps = 1``."""
    mass = resolve_mass(m, "exact")
    if mass.value != 1:
        raise HypothesisViolation("the central-binomial series holds only for m*eps = 1")
    return sum_a1_squared(t, mass), central_binomial_series(t)


def left_prob_limit(m) -> float:
    me = float(m.value if hasattr(m, "value") else m)
    return me / (2.0 * math.sqrt(1.0 + me * me))


def _cmp_sqrt(x: Fraction, r: Fraction) -> int:
    """Sign of ``x - sqrt(r)`` for rational ``x`` and ``r > 0``."""
    if x <= 0:
        return -1
    d = x * x - r
    return (d > 0) - (d < 0)


@dataclass(frozen=True)
class CtSequence:
    """``c_t = sum a1**2 - 1/(2 sqrt 2)`` at ``m*eps = 1`` with exact fact checks.

    ``sums[t-1]`` holds the exact rational ``sum a1**2``; ``values`` are
    floating ``c_t`` for display.  Each entry of ``facts`` maps a fact name
    to the list of ``t`` where it fails.
    """

    t_max: int
    sums: list = field(repr=False)
    values: list = field(repr=False)
    signs: list = field(repr=False)
    facts: dict

    @property
    def ok(self) -> bool:
        return not any(self.facts.values())


def ct_sequence(t_max: int) -> CtSequence:
    sums = [row.sum_squares()[0] for row in iter_rows(1, "exact", t_max + 2)]
    eighth = Fraction(1, 8)
    half = Fraction(1, 2)
    signs = [_cmp_sqrt(s, eighth) for s in sums]
    values = [float(s) - 1 / (2 * math.sqrt(2)) for s in sums]

    pairing, decay, alternating, shrinking = [], [], [], []
    remainder = Fraction(1, 2)  # 1/2 * C(2K, K) / 4**K with K = t // 2
    K = 0
    for t in range(1, t_max + 1):
        s = sums[t - 1]
        while K < t // 2:
            remainder *= Fraction((2 * K + 1) * (2 * K + 2), 4 * (K + 1) ** 2)
            K += 1
        if t % 2 == 0 and sums[t] != s:
            pairing.append(t)
        # |c_t| <= remainder, a null sequence
        if _cmp_sqrt(s - remainder, eighth) > 0 or _cmp_sqrt(s + remainder, eighth) < 0:
            decay.append(t)
        if t > 1:
            s2 = sums[t + 1]
            if signs[t - 1] * signs[t + 1] != -1:
                alternating.append(t)
            # |c_t| > |c_{t+2}|  <=>  (s - s2) * (s + s2 - 1/sqrt 2) > 0
            d = (s > s2) - (s < s2)
            if d * _cmp_sqrt(s + s2, half) <= 0:
                shrinking.append(t)
    facts = {
        "pairing": pairing,
        "decay": decay,
        "alternating": alternating,
        "shrinking": shrinking,
    }
    return CtSequence(t_max, sums[:t_max], values[:t_max], signs[:t_max], facts)


# --------------------------------------------------------------------------
# classical flea walk


def _as_prob(p):
    if isinstance(p, str):
        p = Fraction(p) if "." not in p else float(p)
    if isinstance(p, Rational):
        p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return p


def flea_distribution(t: int, p) -> dict:
    """Position law of the biased walk after ``t`` steps (+1 with probability ``p``)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    p = _as_prob(p)
    q = 1 - p
    dist = {0: Fraction(1) if isinstance(p, Fraction) else 1.0}
    for _ in range(t):
        nxt = {}
        for x, w in dist.items():
            nxt[x + 1] = nxt.get(x + 1, 0) + p * w
            nxt[x - 1] = nxt.get(x - 1, 0) + q * w
        dist = {x: nxt[x] for x in sorted(nxt)}
    return dist


def flea_velocity_check(T: int, p) -> tuple:
    """``(E(x/T), p - q)`` for the flea walk at time ``T``."""
    if T < 1:
        raise ValueError("T must be >= 1")
    p = _as_prob(p)
    dist = flea_distribution(T, p)
    mean = sum(x * w for x, w in dist.items()) / T
    return mean, p - (1 - p)
