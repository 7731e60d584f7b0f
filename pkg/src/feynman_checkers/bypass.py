"""Amplitudes over paths that avoid a finite set of absorbing sites.

Sites of a :class:`BypassSet` absorb: a path may end at one but never pass
through it.  Running the forward recurrence and zeroing absorbing entries
after recording them yields, for every site ``v``, the amplitude
``a(v bypass T minus {v})``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .amplitude import AmplitudeRow, propagate, resolve_mass, zero_amplitude
from .errors import InvalidBypassSet, NonBlockingSetError
from .lattice import MassParam, Site


@dataclass(frozen=True)
class BypassSet:
    sites: frozenset[Site]

    def __init__(self, sites: Iterable = ()):
        parsed = set()
        for s in sites:
            if not isinstance(s, Site):
                n, tau = s
                if tau == 0 and n == 0:
                    raise InvalidBypassSet("the origin (0, 0) cannot be absorbing")
                try:
                    s = Site(int(n), int(tau))
                except ValueError as exc:
                    raise InvalidBypassSet(str(exc)) from exc
            parsed.add(s)
        object.__setattr__(self, "sites", frozenset(parsed))

    def __contains__(self, s) -> bool:
        return s in self.sites

    def __len__(self) -> int:
        return len(self.sites)

    def __iter__(self):
        return iter(sorted(self.sites, key=lambda s: (s.tau, s.n)))

    @property
    def max_tau(self) -> int:
        return max((s.tau for s in self.sites), default=0)

    def by_row(self) -> dict[int, set[int]]:
        """``tau -> {lam}`` for the reachable-parity members."""
        rows: dict[int, set[int]] = {}
        for s in self.sites:
            if (s.n + s.tau) % 2 == 0:
                rows.setdefault(s.tau, set()).add((s.tau + s.n) // 2)
        return rows

    @classmethod
    def from_json(cls, text: str) -> "BypassSet":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidBypassSet(f"malformed JSON: {exc}") from exc
        if not isinstance(data, list):
            raise InvalidBypassSet("bypass set must be a JSON array of [n, tau] pairs")
        pairs = []
        for item in data:
            if (
                not isinstance(item, list)
                or len(item) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in item)
            ):
                raise InvalidBypassSet(f"bad entry {item!r}; expected [n, tau] integers")
            pairs.append(tuple(item))
        return cls(pairs)

    @classmethod
    def load(cls, path) -> "BypassSet":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def to_json(self) -> str:
        return json.dumps([[s.n, s.tau] for s in self])

    @classmethod
    def row(cls, tau: int) -> "BypassSet":
        return cls(Site(n, tau) for n in range(-tau, tau + 1, 2))

    @classmethod
    def rotated(cls, points: Iterable[tuple[int, int]]) -> "BypassSet":
        """Build from ``(lam, mu)`` pairs."""
        return cls(Site(lam - mu, lam + mu) for lam, mu in points)


def staircase_set(mu_hat: int, n: int) -> BypassSet:
    """The union ``S_n | T_n`` used to prove the quadratic row identity.

    ``S_n`` is the row ``mu = mu_hat``, ``1 <= lam <= n``; ``T_n`` the
    points with ``mu < mu_hat`` on the time line ``lam + mu = n + mu_hat``.
    """
    if mu_hat < 1 or n < 1:
        raise ValueError("need mu_hat >= 1 and n >= 1")
    s_part = [(lam, mu_hat) for lam in range(1, n + 1)]
    t_part = [(n + mu_hat - mu, mu) for mu in range(mu_hat)]
    return BypassSet.rotated(s_part + t_part)


@dataclass(frozen=True)
class EdgeFlux:
    source: Site | None  # None stands for the origin (0, 0)
    target: Site
    j: Fraction | float


@dataclass(frozen=True)
class FluxViolation:
    site: Site
    inflow: Fraction | float
    outflow: Fraction | float


def _bypass_rows(T: BypassSet, mass: MassParam, tau_max: int):
    return propagate(mass, tau_max, T.by_row())


def arrival_amplitudes(T: BypassSet, m, mode: str = "exact", tau_max: int | None = None):
    """Rows of ``a(v bypass T minus {v})`` for every ``v`` up to ``tau_max``."""
    mass = resolve_mass(m, mode)
    if tau_max is None:
        tau_max = max(T.max_tau, 1)
    for tau, c1, c2 in _bypass_rows(T, mass, tau_max):
        yield AmplitudeRow(tau, mass, c1, c2)


def amplitude_bypass(s: Site, T: BypassSet, m, mode: str = "exact", exclude_endpoint: bool | None = None):
    """``a(s bypass T)``; for ``s`` in ``T`` the endpoint is exempt unless told otherwise."""
    if exclude_endpoint is None:
        exclude_endpoint = True
    mass = resolve_mass(m, mode)
    row = None
    for row in arrival_amplitudes(T, mass, mode, s.tau):
        pass
    if s in T and not exclude_endpoint:
        # every path to s passes through s itself
        return zero_amplitude(s.tau, mass)
    return row[s.n]


def blocking_check(T: BypassSet, horizon: int | None = None) -> bool:
    """True iff every infinite checker path from the origin meets ``T``.

    Decided on path support alone (independent of the mass): the set of
    sites reachable while avoiding ``T`` is propagated row by row and the
    set blocks iff that support dies out by ``max_tau + 1``.
    """
    top = T.max_tau
    if horizon is not None and horizon < top:
        raise ValueError(f"horizon {horizon} is below the tallest obstacle {top}")
    if top == 0:
        return False
    rows = T.by_row()
    alive = [True]
    for tau in range(1, top + 2):
        if tau > 1:
            alive = [a or b for a, b in zip(alive + [False], [False] + alive)]
        for lam in rows.get(tau, ()):
            if 1 <= lam <= tau:
                alive[lam - 1] = False
        if not any(alive):
            return True
    return False


def conservation_bypass(T: BypassSet, m, mode: str = "exact"):
    """``sum over v in T of P(v bypass T minus {v})``; 1 for blocking sets."""
    if not blocking_check(T):
        raise NonBlockingSetError("some infinite checker path avoids the set")
    mass = resolve_mass(m, mode)
    rows = T.by_row()
    total = Fraction(0) if mass.exact else []
    for row in arrival_amplitudes(T, mass, mode):
        for lam in rows.get(row.tau, ()):
            if not 1 <= lam <= row.tau:
                continue
            amp = row[2 * lam - row.tau]
            if mass.exact:
                total += amp.prob
            else:
                total.append(amp.prob)
    return total if mass.exact else math.fsum(total)


def edge_fluxes(tau_max: int, T: BypassSet, m, mode: str = "exact") -> list[EdgeFlux]:
    """Currents on every edge ending at time ``<= tau_max``.

    The edge from ``(n - 1, tau - 1)`` to ``(n, tau)`` carries ``a2**2`` and
    the edge from ``(n + 1, tau - 1)`` carries ``a1**2``, both taken from
    ``a((n, tau) bypass T minus {(n, tau)})``.
    """
    out = []
    for row in arrival_amplitudes(T, m, mode, tau_max):
        p_minus, p_plus = row.chirality_probs()
        for i, n in enumerate(row.sites()):
            tgt = Site(n, row.tau)
            src_right = None if row.tau == 1 else Site(n - 1, row.tau - 1)
            out.append(EdgeFlux(src_right, tgt, p_plus[i]))
            if row.tau > 1:
                out.append(EdgeFlux(Site(n + 1, row.tau - 1), tgt, p_minus[i]))
    return out


def kirchhoff_check(tau_max: int, T: BypassSet, m, mode: str = "exact") -> list[FluxViolation]:
    """Sites off ``T`` with ``tau < tau_max`` where inflow != outflow.

    The seed edge ``(0,0)-(1,1)`` must carry current 1; a mismatch there is
    reported against site ``(1, 1)``.
    """
    mass = resolve_mass(m, mode)
    prev = None
    violations = []
    for row in arrival_amplitudes(T, mass, mode, max(tau_max, 1)):
        p_minus, p_plus = row.chirality_probs()
        if row.tau == 1 and p_plus[0] != 1:
            violations.append(FluxViolation(Site(1, 1), 1, p_plus[0]))
        if prev is not None:
            pm_prev, pp_prev = prev.chirality_probs()
            for i, n in enumerate(prev.sites()):
                v = Site(n, prev.tau)
                if v in T:
                    continue
                inflow = pm_prev[i] + pp_prev[i]
                # up-right edge lands at lam = i + 2 (a2), up-left at lam = i + 1 (a1)
                outflow = p_plus[i + 1] + p_minus[i]
                if not _same(inflow, outflow, mass.exact):
                    violations.append(FluxViolation(v, inflow, outflow))
        prev = row
    return violations


def _same(x, y, exact: bool) -> bool:
    if exact:
        return x == y
    return abs(x - y) <= 1e-12 * max(1.0, abs(x), abs(y))


def bypass_oracle(s: Site, T: BypassSet, m):
    """Exact ``a(s bypass T minus {s})`` by enumerating every checker path to ``s``."""
    from .amplitude import ExactAmplitude, count_turns, enumerate_paths
    from .config import LIMITS

    mass = resolve_mass(m, "exact")
    LIMITS.check(s.tau, "oracle")
    p, q = mass.numerator, mass.denominator
    blocked = {t for t in T.sites if t != s}
    re = im = 0
    for steps in enumerate_paths(s):
        n, hit = 0, False
        for tau, step in enumerate(steps[:-1], start=1):
            n += step
            if Site(n, tau) in blocked:
                hit = True
                break
        if hit:
            continue
        t = count_turns(steps)
        w = p ** t * q ** (s.tau - 1 - t)
        r = t % 4
        if r == 0:
            im += w
        elif r == 1:
            re += w
        elif r == 2:
            im -= w
        else:
            re -= w
    scale = q ** (s.tau - 1)
    return ExactAmplitude(Fraction(re, scale), Fraction(im, scale), s.tau - 1, mass.value)


def random_staircase(rng, max_cols: int = 5, max_height: int = 4, extra: int = 3) -> BypassSet:
    """A random blocking set: a nondecreasing staircase closed by a time segment.

    Columns ``lam = 1 .. L`` carry a wall at height ``h_lam`` (nondecreasing);
    the points ``(L + 1, mu)`` with ``mu < h_L`` close it off.  Up to
    ``extra`` further random points inside the enclosed region are added.
    """
    L = rng.randint(1, max_cols)
    heights = sorted(rng.randint(1, max_height) for _ in range(L))
    points = {(lam, h) for lam, h in zip(range(1, L + 1), heights)}
    points |= {(L + 1, mu) for mu in range(heights[-1])}
    inside = [(lam, mu) for lam in range(1, L + 1) for mu in range(heights[lam - 1])]
    for _ in range(rng.randint(0, extra)):
        lam, mu = rng.choice(inside)
        if (lam, mu) != (1, 0) or rng.random() < 0.2:
            points.add((lam, mu))
    return BypassSet.rotated(points)
