"""Linear, row/column and quadratic amplitude-sum identities.

Infinite sums over one light-cone coordinate are truncated with a provable
bound.  For fixed ``f`` (the held coordinate) and free index ``j`` the
closed-form sums give, with ``y = (m*eps)**2``, ``q = (1 + y)**-0.5`` and
``M = max(1, y)``,

    |b1| <= m*eps * M**(f-1) * C(j+f-2, f-1) * q**(j+f-1)
    |b2| <= y     * M**(f-1) * C(j+f-2, f)   * q**(j+f-1)    (row, j = lam)
    |b2| <= y     * M**(f-1) * C(j+f-2, f-2) * q**(j+f-1)    (column, j = mu)

(Vandermonde on the binomial products).  Each envelope is a polynomial
times a geometric factor, whose term ratio is nonincreasing in ``j``; once
that ratio ``R`` drops below one the tail from ``J`` is at most
``env(J) / (1 - R)``.  Summation stops at the first ``J`` where this bound
is below ``tol / 10``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .amplitude import ExactAmplitude, amplitude_row_dp, propagate, resolve_mass
from .errors import HypothesisViolation
from .lattice import MassParam, as_mass

MAX_TERMS = 200_000


@dataclass(frozen=True)
class RotatedAmplitude:
    lam: int
    mu_row: int
    b1: float
    b2: float


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    tail_bound: float
    converged: bool
    target: float | None = None

    @property
    def diff(self) -> float | None:
        return None if self.target is None else abs(self.value - self.target)


# --------------------------------------------------------------------------
# linear sums


def linear_sums(tau: int, m, mode: str = "exact"):
    """``(sum a1, sum a2)`` over the row.

    In exact mode the result is an :class:`ExactAmplitude` whose ``A1``/``A2``
    are the two sums before the common ``(1+y)**(-(tau-1)/2)`` factor.
    """
    row = amplitude_row_dp(tau, m, mode)
    if row.exact:
        s = row.scale
        return ExactAmplitude(Fraction(sum(row.c1), s), Fraction(sum(row.c2), s), tau - 1, row.mass.value)
    return math.fsum(row.c1), math.fsum(row.c2)


def gaussian_power(re: Fraction, im: Fraction, k: int) -> tuple[Fraction, Fraction]:
    """``(re + i*im)**k`` by repeated squaring."""
    rr, ri = Fraction(1), Fraction(0)
    br, bi = Fraction(re), Fraction(im)
    while k:
        if k & 1:
            rr, ri = rr * br - ri * bi, rr * bi + ri * br
        br, bi = br * br - bi * bi, 2 * br * bi
        k >>= 1
    return rr, ri


def linear_identity_exact(tau: int, m) -> bool:
    """``(sum A2 + i sum A1) == (1 + i*m*eps)**(tau-1)`` as Gaussian rationals."""
    sums = linear_sums(tau, m, "exact")
    rr, ri = gaussian_power(Fraction(1), sums.mass, tau - 1)
    return sums.A2 == rr and sums.A1 == ri


def linear_targets(tau: int, m) -> tuple[float, float]:
    theta = (tau - 1) * math.atan(float(as_mass(m).value))
    return math.sin(theta), math.cos(theta)


# --------------------------------------------------------------------------
# envelopes and tail bounds


def _envelope(kind: str, part: str, f: int, mass: float):
    """Return ``(A, c, d)`` so that ``|b| <= A * C(j+c, d) * q**j``."""
    y = mass * mass
    q = (1.0 + y) ** -0.5
    M = max(1.0, y)
    lead = M ** (f - 1) * q ** (f - 1)
    if part == "b1":
        return mass * lead, f - 2, f - 1
    if kind == "row":
        return y * lead, f - 2, f
    return y * lead, f - 2, max(f - 2, 0)


def _comb(n: int, k: int) -> float:
    if k < 0 or n < k:
        return 0.0
    return float(math.comb(n, k))


def tail_bound(env, J: int, q: float, power: int = 1, weight_exp: int = 0, weight_base: float = 1.0) -> float:
    """Bound on ``sum_{j >= J} (w(j) * |b_j|**power)`` for an envelope ``(A, c, d)``.

    ``w(j) = j**weight_exp * weight_base**j``.  Returns ``inf`` while the
    ratio bound is still >= 1.
    """
    A, c, d = env
    if A == 0.0:
        return 0.0
    if J + c + 1 - d <= 0 or J < 1:
        return math.inf
    rho = (q ** power) * weight_base
    poly_ratio = ((J + c + 1) / (J + c + 1 - d)) ** power
    w_ratio = ((J + 1) / J) ** weight_exp if weight_exp > 0 else 1.0
    R = rho * poly_ratio * w_ratio
    if R >= 1.0:
        return math.inf
    term = (A * _comb(J + c, d) * q ** J) ** power * float(J) ** weight_exp * weight_base ** J
    return term / (1.0 - R)


def _truncation_point(env, q, tol, start, **kw) -> tuple[int, float]:
    J = max(start, 1)
    while J < MAX_TERMS:
        b = tail_bound(env, J, q, **kw)
        if b <= tol / 10:
            return J, b
        J += 1 if J < 64 else max(1, J // 16)
    return J, tail_bound(env, J, q, **kw)


# --------------------------------------------------------------------------
# values along rows and columns


def rotated_amplitude(lam: int, mu_row: int, m, mode: str = "float") -> RotatedAmplitude:
    if lam < 1 or mu_row < 0:
        raise ValueError("need lam >= 1 and mu_row >= 0")
    row = amplitude_row_dp(lam + mu_row, m, mode)
    a = row[lam - mu_row]
    if row.exact:
        a = a.to_float()
    return RotatedAmplitude(lam, mu_row, a.a1, a.a2)


def row_values(mu_row: int, lam_max: int, m) -> tuple[np.ndarray, np.ndarray]:
    """``b1, b2`` at ``(lam, mu_row)`` for ``lam = 1 .. lam_max`` (float)."""
    mass = resolve_mass(float(as_mass(m).value), "float")
    b1 = np.zeros(lam_max)
    b2 = np.zeros(lam_max)
    for tau, c1, c2 in propagate(mass, lam_max + mu_row):
        lam = tau - mu_row
        if lam >= 1:
            b1[lam - 1] = c1[lam - 1]
            b2[lam - 1] = c2[lam - 1]
    return b1, b2


def col_values(lam: int, mu_max: int, m) -> tuple[np.ndarray, np.ndarray]:
    """``b1, b2`` at ``(lam, mu)`` for ``mu = 0 .. mu_max`` (float)."""
    mass = resolve_mass(float(as_mass(m).value), "float")
    b1 = np.zeros(mu_max + 1)
    b2 = np.zeros(mu_max + 1)
    for tau, c1, c2 in propagate(mass, lam + mu_max):
        mu = tau - lam
        if mu >= 0:
            b1[mu] = c1[lam - 1]
            b2[mu] = c2[lam - 1]
    return b1, b2


def _positive_mass(m) -> float:
    me = float(as_mass(m).value)
    if me <= 0:
        raise HypothesisViolation("these identities need m*eps > 0")
    return me


def _series(values, first_index: int, J: int, bound: float, tol: float, target=None, transform=None) -> SeriesResult:
    terms = values[: J - first_index]
    if transform is not None:
        terms = transform(terms)
    value = math.fsum(terms)
    return SeriesResult(value, len(terms), bound, bound <= tol, target)


def rotated_row_sum(mu_row: int, m, tol: float = 1e-9) -> tuple[SeriesResult, SeriesResult]:
    """``sum over lam >= 1`` of ``b1`` and of ``b2`` along row ``mu_row``."""
    if mu_row < 1:
        raise HypothesisViolation("row sums are stated for mu >= 1")
    me = _positive_mass(m)
    y = me * me
    q = (1 + y) ** -0.5
    r = math.sqrt(y + 1)
    sign = 1 if mu_row % 2 else -1
    targets = (sign * (1 + r) / me, -sign * (2 + y + 2 * r) / y)
    out = []
    for part, target in zip(("b1", "b2"), targets):
        env = _envelope("row", part, mu_row, me)
        J, bound = _truncation_point(env, q, tol, 1)
        b1, b2 = row_values(mu_row, J - 1, me)
        vals = b1 if part == "b1" else b2
        out.append(_series(vals, 1, J, bound, tol, target))
    return out[0], out[1]


def rotated_col_sum(lam: int, m, tol: float = 1e-9) -> tuple[SeriesResult, SeriesResult]:
    """``sum over mu >= 0`` of ``b1`` and of ``b2`` along column ``lam``."""
    if lam < 1:
        raise ValueError("lam must be >= 1")
    me = _positive_mass(m)
    y = me * me
    q = (1 + y) ** -0.5
    r = math.sqrt(y + 1)
    sign = 1 if lam % 2 else -1
    targets = (sign * (1 + r) / me, float(sign))
    out = []
    for part, target in zip(("b1", "b2"), targets):
        env = _envelope("col", part, lam, me)
        J, bound = _truncation_point(env, q, tol, 1)
        b1, b2 = col_values(lam, J - 1, me)
        vals = b1 if part == "b1" else b2
        out.append(_series(vals, 0, J, bound, tol, target))
    return out[0], out[1]


def quadratic_sums(fixed: str, index: int, m, tol: float = 1e-9, part: str = "b1") -> SeriesResult:
    """Sum of squares along a row (``fixed="row"``) or a column (``fixed="col"``).

    Rows take ``part="b1"`` only; columns accept ``"b1"`` or ``"b2"``.
    Every target equals 1.
    """
    me = _positive_mass(m)
    q = (1 + me * me) ** -0.5
    if fixed == "row":
        if index < 1:
            raise HypothesisViolation("row identities are stated for mu >= 1")
        if part != "b1":
            raise ValueError("the proved row identity concerns b1 only")
        env = _envelope("row", part, index, me)
        J, bound = _truncation_point(env, q, tol, 1, power=2)
        b1, _ = row_values(index, J - 1, me)
        return _series(b1, 1, J, bound, tol, 1.0, np.square)
    if fixed == "col":
        if index < 1:
            raise ValueError("lam must be >= 1")
        if part not in ("b1", "b2"):
            raise ValueError("part must be 'b1' or 'b2'")
        env = _envelope("col", part, index, me)
        J, bound = _truncation_point(env, q, tol, 1, power=2)
        b1, b2 = col_values(index, J - 1, me)
        return _series(b1 if part == "b1" else b2, 0, J, bound, tol, 1.0, np.square)
    raise ValueError("fixed must be 'row' or 'col'")


def partial_square_sums(fixed: str, index: int, m, count: int, part: str = "b1") -> np.ndarray:
    """Running sums of squares along a row or column (``count`` terms)."""
    if fixed == "row":
        b1, b2 = row_values(index, count, m)
    else:
        b1, b2 = col_values(index, count - 1, m)
    vals = b1 if part == "b1" else b2
    return np.cumsum(vals * vals)


# --------------------------------------------------------------------------
# exact series oracle for weighted row sums of squares


def _poly_mul(a: list, b: list) -> list:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _falling_binomial(r: int) -> list:
    """Coefficients in ``lam`` of ``C(lam - 1, r)``."""
    poly = [Fraction(1)]
    for i in range(1, r + 1):
        poly = _poly_mul(poly, [Fraction(-i), Fraction(1)])
    return [c / math.factorial(r) for c in poly]


def _row_poly(part: str, mu: int, mass: Fraction) -> list:
    """Polynomial ``P`` with ``b(lam, mu) = q**(lam+mu-1) * P(lam)`` for ``lam >= 1``."""
    y = mass * mass
    poly = [Fraction(0)]
    if part == "b1":
        for r in range(mu):
            coeff = (-1) ** r * math.comb(mu - 1, r) * mass ** (2 * r + 1)
            poly = _poly_add(poly, [coeff * c for c in _falling_binomial(r)])
    else:
        for r in range(1, mu + 1):
            coeff = (-1) ** r * math.comb(mu - 1, r - 1) * y ** r
            poly = _poly_add(poly, [coeff * c for c in _falling_binomial(r)])
    return poly


def _poly_add(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def power_sums(x: Fraction, k_max: int) -> list[Fraction]:
    """``S_k = sum_{lam >= 1} lam**k * x**lam`` for ``k = 0 .. k_max`` (``|x| < 1``)."""
    S: list[Fraction] = []
    for k in range(k_max + 1):
        acc = x + x * sum((math.comb(k, j) * S[j] for j in range(k)), Fraction(0))
        S.append(acc / (1 - x))
    return S


def weighted_square_oracle(part: str, mu: int, mass, lam_exp: int = 0, extra_base: Fraction = Fraction(1)):
    """Closed form of ``sum_lam lam**lam_exp * extra_base**lam * b(lam, mu)**2``.

    ``lam_exp`` may be -1, 0, 1, 2, ...  Exact (a Fraction) except for
    ``lam_exp = -1`` where a logarithm appears and a float is returned.
    The answer is derived from the polynomial form of ``b`` alone, without
    touching the recurrence.
    """
    mass = Fraction(mass)
    y = mass * mass
    x = extra_base / (1 + y)  # q**2 per unit lam, times the weight base
    pref = (1 / (1 + y)) ** (mu - 1)  # q**(2(mu-1))
    coeffs = _poly_mul(_row_poly(part, mu, mass), _row_poly(part, mu, mass))
    if lam_exp >= 0:
        S = power_sums(x, len(coeffs) - 1 + lam_exp)
        return pref * sum((c * S[k + lam_exp] for k, c in enumerate(coeffs)), Fraction(0))
    if lam_exp == -1:
        S = power_sums(x, max(len(coeffs) - 2, 0))
        rational = sum((c * S[k - 1] for k, c in enumerate(coeffs) if k >= 1), Fraction(0))
        return float(pref) * (float(coeffs[0]) * -math.log1p(-float(x)) + float(rational))
    raise ValueError("lam_exp must be >= -1")


# --------------------------------------------------------------------------
# conjectured sums


CONJECTURE_ITEMS = (1, 2, 3, 4, 5)


@dataclass(frozen=True)
class ConjectureRow:
    item: int
    mu: int
    mass: str
    lhs: float
    rhs: float
    diff: float
    oracle: float
    alt_rhs: float | None
    alt_diff: float | None
    converged: bool
    terms_used: int
    status: str


def conjecture_rhs(item: int, mu: int, mass=1) -> float:
    y = float(mass) ** 2
    if item == 1:
        return (y + 2) / y
    if item == 2:
        return 3 * mu - 1
    if item == 3:
        return 13 * mu * mu - 10 * mu + 3
    if item == 4:
        return 2 ** (mu - 1) * math.log(2) - math.fsum(1 / (j * 2 ** j) for j in range(1, mu))
    if item == 5:
        return 2 ** (mu - 1) * math.comb(2 * mu - 2, mu - 1) / 3 ** (2 * mu + 1)
    raise ValueError(f"unknown conjecture item {item}")


def conjecture_alt_rhs(item: int, mu: int) -> float | None:
    """Alternative right-hand side where the conjectured one disagrees with the oracle.

    Item 4: the factor ``2**(mu-1)`` applied to the whole difference.
    Item 5: ``3**(2mu - 1)`` in the denominator.  Other items: ``None``.
    """
    if item == 4:
        return 2 ** (mu - 1) * (math.log(2) - math.fsum(1 / (j * 2 ** j) for j in range(1, mu)))
    if item == 5:
        return 2 ** (mu - 1) * math.comb(2 * mu - 2, mu - 1) / 3 ** (2 * mu - 1)
    return None


_ITEM_SPEC = {
    # item: (part, lam exponent, extra geometric base per lam)
    1: ("b2", 0, Fraction(1)),
    2: ("b1", 1, Fraction(1)),
    3: ("b1", 2, Fraction(1)),
    4: ("b1", -1, Fraction(1)),
    5: ("b1", 0, Fraction(1, 2)),
}


def conjecture_lhs(item: int, mu: int, m=1, tol: float = 1e-12) -> SeriesResult:
    """Truncated numeric sum over ``lam`` for one conjectured identity."""
    if mu < 1:
        raise HypothesisViolation("the conjectured sums are stated for mu >= 1")
    me = _positive_mass(m)
    if item != 1 and me != 1.0:
        raise HypothesisViolation("items 2-5 are stated for m*eps = 1")
    part, lam_exp, base = _ITEM_SPEC[item]
    q = (1 + me * me) ** -0.5
    env = _envelope("row", part, mu, me)
    J, bound = _truncation_point(env, q, tol, 1, power=2, weight_exp=lam_exp, weight_base=float(base))
    b1, b2 = row_values(mu, J - 1, me)
    vals = b1 if part == "b1" else b2
    lam = np.arange(1, J, dtype=float)
    weights = lam ** lam_exp * float(base) ** lam
    return _series(vals, 1, J, bound, tol, conjecture_rhs(item, mu, me), lambda v: weights * v * v)


def conjecture_oracle(item: int, mu: int, m=1) -> float:
    part, lam_exp, base = _ITEM_SPEC[item]
    return float(weighted_square_oracle(part, mu, as_mass(m, exact=True).value, lam_exp, base))


def conjecture_report(mu_row_max: int, tol: float = 1e-12, m1=1) -> list[ConjectureRow]:
    """Numeric evidence for the five conjectured sums; asserts nothing.

    Item 1 is evaluated at mass ``m1``; items 2-5 at ``m*eps = 1``.
    Items 4 and 5 also carry an alternative right-hand side (see
    :func:`conjecture_alt_rhs`).  Item 5 rows are always ``unresolved``; the
    others read ``agree`` or ``disagree`` against the conjectured right-hand side.
    """
    rows = []
    for mu in range(1, mu_row_max + 1):
        for item in CONJECTURE_ITEMS:
            m = m1 if item == 1 else 1
            res = conjecture_lhs(item, mu, m, tol)
            rhs = conjecture_rhs(item, mu, float(as_mass(m).value))
            oracle = conjecture_oracle(item, mu, m)
            diff = abs(res.value - rhs)
            alt = conjecture_alt_rhs(item, mu)
            alt_diff = None if alt is None else abs(res.value - alt)
            if item == 5:
                status = "unresolved"
            else:
                status = "agree" if diff <= max(10 * tol, 1e-9) else "disagree"
            rows.append(
                ConjectureRow(item, mu, str(as_mass(m).value), res.value, rhs, diff, oracle, alt, alt_diff,
                              res.converged, res.terms_used, status)
            )
    return rows
