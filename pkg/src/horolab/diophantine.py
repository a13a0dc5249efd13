"""Continued fractions, Diophantine classification, and special constructions.

Floats are honest here: a binary64 input only certifies the continued-fraction
digits on which the whole interval x +- slack agrees, where slack is a
thousand ulps.  Requests beyond that window raise PrecisionExhausted instead
of returning garbage digits.  Exact inputs (Fraction, integers, quadratic
surds) expand without a precision wall.

The type-100 construction keeps everything in exact integer arithmetic; its
approximant gaps are certified by exact rational interval bounds
1/(q((a'+1)q + q')) < |x - p/q| < 1/(q(a'q + q')) where a' is the next digit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DivisionNearZero, PrecisionExhausted
from .group import LatticePoint, a_t, compose, injectivity_eta, reduce_psl2z

FLOAT_DEPTH_WALL = 60
_SLACK_ULPS = 1000.0


@dataclass(frozen=True)
class ContinuedFraction:
    """x = a0 + 1/(d1 + 1/(d2 + ...)) with all d_k >= 1."""

    a0: int
    digits: tuple

    def __post_init__(self):
        if any(d < 1 for d in self.digits):
            raise ValueError("partial quotients must be >= 1")

    @property
    def depth(self) -> int:
        return len(self.digits)


@dataclass(frozen=True)
class RationalApprox:
    p: int
    q: int
    err_bound: Fraction

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("denominator must be positive")
        if math.gcd(int(self.p), int(self.q)) != 1:
            raise ValueError("approximant not in lowest terms")

    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class DiophProfile:
    mu_hat: float | None = None
    kappa_hat: float | None = None
    samples: tuple = ()


class QuadraticSurd:
    """(P + sqrt(D))/Q with D a non-square positive integer and Q | D - P^2.

    Supports the exact continued-fraction step, which is all the module needs
    from quadratic irrationals.
    """

    __slots__ = ("D", "P", "Q")

    def __init__(self, D: int, P: int = 0, Q: int = 1):
        r = math.isqrt(D)
        if r * r == D:
            raise ValueError("D must not be a perfect square")
        if Q == 0 or (D - P * P) % Q != 0:
            raise ValueError("need Q | D - P^2 for the exact CF recursion")
        self.D, self.P, self.Q = D, P, Q

    def digit_stream(self):
        d, p, q = self.D, self.P, self.Q
        r = math.isqrt(d)
        while True:
            a = (p + r) // q if q > 0 else -((-p - r) // q) - 1
            yield a
            p = a * q - p
            q = (d - p * p) // q

    def __float__(self) -> float:
        return (self.P + math.sqrt(self.D)) / self.Q


SQRT2 = QuadraticSurd(2)
GOLDEN = QuadraticSurd(5, 1, 2)


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------

def _rational_digits(x: Fraction, depth: int):
    a0 = math.floor(x)
    digits = []
    rem = x - a0
    while rem != 0 and len(digits) < depth:
        rem = 1 / rem
        a = math.floor(rem)
        digits.append(int(a))
        rem -= a
    return int(a0), digits, rem == 0


def _certified_digits(x: float, depth: int):
    """Digits on which the interval x +- slack agrees; may fall short."""
    slack = Fraction(math.ulp(abs(x)) if x else math.ulp(1.0)) * int(_SLACK_ULPS)
    lo = Fraction(x) - slack
    hi = Fraction(x) + slack
    a0_lo, dl, _ = _rational_digits(lo, depth + 1)
    a0_hi, dh, _ = _rational_digits(hi, depth + 1)
    if a0_lo != a0_hi:
        return None, []
    agree = []
    for u, v in zip(dl, dh):
        if u != v:
            break
        agree.append(u)
    return a0_lo, agree[:depth]


def cf_expand(x, depth: int) -> ContinuedFraction:
    """Expand x to the requested number of partial quotients.

    Floats certify at most FLOAT_DEPTH_WALL digits and fewer when the
    interval test fails earlier; exact inputs have no wall.  Rationals may
    terminate early, which is not an error.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if isinstance(x, QuadraticSurd):
        stream = x.digit_stream()
        a0 = next(stream)
        return ContinuedFraction(a0, tuple(next(stream) for _ in range(depth)))
    if isinstance(x, (int, Fraction)):
        a0, digits, _ = _rational_digits(Fraction(x), depth)
        return ContinuedFraction(int(a0), tuple(digits))
    if depth > FLOAT_DEPTH_WALL:
        raise PrecisionExhausted(
            f"binary64 cannot certify {depth} digits (wall at {FLOAT_DEPTH_WALL})"
        )
    a0, digits = _certified_digits(float(x), depth)
    if a0 is None or len(digits) < depth:
        got = 0 if a0 is None else len(digits)
        raise PrecisionExhausted(
            f"only {got} digits certifiable at binary64, {depth} requested"
        )
    return ContinuedFraction(a0, tuple(digits))


def cf_expand_available(x, depth: int) -> ContinuedFraction:
    """Best-effort variant: return however many digits certify, up to depth."""
    try:
        return cf_expand(x, depth)
    except PrecisionExhausted:
        pass
    depth = min(depth, FLOAT_DEPTH_WALL)
    a0, digits = _certified_digits(float(x), depth)
    if a0 is None:
        raise PrecisionExhausted("not even the integer part is certifiable")
    return ContinuedFraction(a0, tuple(digits))


# ---------------------------------------------------------------------------
# convergents
# ---------------------------------------------------------------------------

def convergent_pairs(cf: ContinuedFraction):
    """(p_k, q_k) for k = 0 .. depth, exact integers."""
    pm1, qm1 = 1, 0
    p, q = cf.a0, 1
    out = [(p, q)]
    for d in cf.digits:
        p, pm1 = d * p + pm1, p
        q, qm1 = d * q + qm1, q
        out.append((p, q))
    return out


def convergents(cf: ContinuedFraction) -> list[RationalApprox]:
    """Convergents with the classical error bounds attached.

    err_bound is 1/(q_k q_{k+1}) when the next convergent exists, else the
    universal 1/q_k^2.
    """
    pairs = convergent_pairs(cf)
    out = []
    for k, (p, q) in enumerate(pairs):
        if k + 1 < len(pairs):
            bound = Fraction(1, q * pairs[k + 1][1])
        else:
            bound = Fraction(1, q * q)
        out.append(RationalApprox(p=p, q=q, err_bound=bound))
    return out


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def _exact_gap_bounds(cf: ContinuedFraction, k: int, pairs) -> tuple[Fraction, Fraction]:
    """Exact two-sided bounds on |x - p_k/q_k| from the digit a_{k+1}."""
    p_k, q_k = pairs[k]
    p_prev, q_prev = pairs[k - 1] if k >= 1 else (1, 0)
    a_next = cf.digits[k]  # digit index k is a_{k+1} for convergent level k
    hi = Fraction(1, q_k * (a_next * q_k + q_prev))
    lo = Fraction(1, q_k * ((a_next + 1) * q_k + q_prev))
    return lo, hi


def _ln(x) -> float:
    if isinstance(x, Fraction):
        return _ln_int(x.numerator) - _ln_int(x.denominator)
    return math.log(x)


def _ln_int(n: int) -> float:
    return math.log(n)


def _slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((u - mx) ** 2 for u in xs)
    sxy = sum((u - mx) * (v - my) for u, v in zip(xs, ys))
    return sxy / sxx


def dioph_type_estimate(x, depth: int) -> float:
    """Estimated Diophantine type of x from its certified convergents.

    The estimate is the least-squares slope of log(1/gap_k) against
    log(q_k), floored at the universal value 2; bounded-digit numbers come
    out as 2 + o(1), the type-100 construction as roughly 200.  Rational
    inputs (terminating expansions) raise PrecisionExhausted.
    """
    if isinstance(x, (int, Fraction)):
        raise PrecisionExhausted("rational input has no Diophantine type")
    cf = x if isinstance(x, ContinuedFraction) else cf_expand_available(x, depth)
    cf = ContinuedFraction(cf.a0, cf.digits[:depth])
    if cf.depth < 8:
        raise PrecisionExhausted(
            f"{cf.depth} certified digits are too few for a type estimate"
        )
    pairs = convergent_pairs(cf)
    xs, ys = [], []
    for k in range(1, cf.depth):  # need digit k (= a_{k+1}) for the gap bound
        lo, hi = _exact_gap_bounds(cf, k, pairs)
        gap = (lo + hi) / 2
        xs.append(_ln_int(pairs[k][1]))
        ys.append(-_ln(gap))
    return max(2.0, _slope(xs, ys))


def is_badly_approximable(x, depth: int, bound: int) -> bool:
    """True iff every certified digit up to depth is <= bound.

    A digit above the bound anywhere in the certified prefix settles the
    answer False; certifying True needs the full requested depth.  This is a
    depth-truncated certificate, not an asymptotic statement.
    """
    if isinstance(x, (int, Fraction)):
        return False  # rationals terminate; convention: not badly approximable
    cf = x if isinstance(x, ContinuedFraction) else cf_expand_available(x, depth)
    for d in cf.digits[:depth]:
        if d > bound:
            return False
    if min(cf.depth, depth) < depth:
        raise PrecisionExhausted(
            f"no digit above {bound} in the certified prefix, but only "
            f"{cf.depth} of {depth} digits are certifiable"
        )
    return True


# ---------------------------------------------------------------------------
# the type-100 construction
# ---------------------------------------------------------------------------

_SEED_DIGITS = 15
_SCHEDULE_EXPONENT = 198
_CERTIFIED_LEVELS = 2


def construct_non_dioph_100():
    """A continued fraction that is not Diophantine of type 100.

    Seed digits 1,...,1 push the denominator ladder up the Fibonacci range
    (q_15 = 987); from there each digit is the previous denominator to the
    198th power, so the gap at level k is below q_k^(-200) and the type-100
    inequality |x - p_k/q_k| <= q_k^(-100) holds with enormous margin.  Two
    certified levels are emitted; the next would have a denominator with
    hundreds of thousands of digits.

    Returns (cf, approximants) where each approximant's err_bound is an
    exact rational upper bound for the gap, itself <= q^{-100} (verified in
    integer arithmetic by the tests).
    """
    digits = [1] * _SEED_DIGITS
    cf = ContinuedFraction(0, tuple(digits))
    pairs = convergent_pairs(cf)
    approximants = []
    for _ in range(_CERTIFIED_LEVELS):
        q_k = pairs[-1][1]
        digits.append(q_k ** _SCHEDULE_EXPONENT)
        cf = ContinuedFraction(0, tuple(digits))
        pairs = convergent_pairs(cf)
        k = len(pairs) - 2  # level whose gap the new digit certifies
        lo, hi = _exact_gap_bounds(cf, k, pairs)
        p_k, q_k = pairs[k]
        approximants.append(RationalApprox(p=p_k, q=q_k, err_bound=hi))
    return cf, approximants


# ---------------------------------------------------------------------------
# the Dirichlet-type series and lattice-point classification
# ---------------------------------------------------------------------------

def nearest_int_dist(x: float) -> float:
    """<x>: distance from x to the nearest integer."""
    return abs(x - round(x))


def lambda_partial(alpha: float, s: float, n: int) -> float:
    """Partial sum of sum 1/(<k alpha> k^s) for k <= n."""
    if s <= 1:
        raise ValueError("series needs s > 1")
    alpha = float(alpha)
    total = 0.0
    for k in range(1, n + 1):
        dist = nearest_int_dist(k * alpha)
        if dist < 1e-15:
            raise DivisionNearZero(
                f"<{k} alpha> ~ {dist:.2e}; alpha is float-indistinguishable "
                "from a rational at this index"
            )
        total += 1.0 / (dist * k ** s)
    return total


def lattice_dioph_type(p: LatticePoint, t_max: float, steps: int) -> DiophProfile:
    """Fit the cusp-excursion type of a lattice point from eta samples.

    kappa_hat is the negated least-squares slope of log eta(flow_t p) on a
    uniform t-grid, clamped into [0, 1]; it is a finite-horizon estimate of
    an asymptotic quantity and is labeled as such by construction.
    """
    if steps < 2:
        raise ValueError("need at least two grid points")
    ts, etas = [], []
    for j in range(steps):
        t = t_max * j / (steps - 1)
        flowed = reduce_psl2z(compose(p.reduced, a_t(-t)))
        ts.append(t)
        etas.append(injectivity_eta(flowed))
    slope = _slope(ts, [math.log(e) for e in etas])
    kappa = min(1.0, max(0.0, -slope))
    return DiophProfile(kappa_hat=kappa, samples=tuple(zip(ts, etas)))
