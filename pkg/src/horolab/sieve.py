"""Linear sieve with exact ground truth and classical bound functions.

The sifted sum S(A, z) = sum of a(n) over n coprime to every prime below
z is computed exactly (integer or rational arithmetic for integer or
rational weights) by two independent routes: a direct roughness scan and
Moebius inclusion-exclusion over squarefree smooth moduli.  The
upper/lower envelope uses the classical linear-sieve pair

    F(s) = 2 e^gamma / s                 on 1 <= s <= 3
    f(s) = 2 e^gamma log(s-1) / s        on 2 <= s <= 4

extended one step by the standard iteration (s F(s))' = f(s-1),
(s f(s))' = F(s-1) to cover s <= 5; beyond that RangeUnsupported.  The
asymptotic regime s > 100 that makes the lower bound uniformly positive
is unreachable at desk scale, so every report carries the achieved s and
the bound values instead; experiments require positivity at their actual
s and say so explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import DivisorExplosion, RangeUnsupported
from .sequences import primes_below, rough_numbers

EULER_GAMMA = 0.5772156649015328606
_TWO_E_GAMMA = 2.0 * math.exp(EULER_GAMMA)
_DIVISOR_CAP = 10 ** 8

_EPS_MAX = 1.0 / 200.0

# deviation note carried on every report (see module docstring)
DESK_SCALE_NOTE = (
    "bounds use the classical F/f at the achieved s in [1,5]; the"
    " asymptotic regime s>100 is not reachable at desk scale"
)


# ---------------------------------------------------------------------------
# problem container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SieveProblem:
    """Weighted sifting problem; weights may be a dict n->a(n) or an int
    N meaning uniform unit weights on 1..N."""

    weights: dict | int
    z: float
    D: float
    Q: int = 1
    eps: float = 1e-5

    def __post_init__(self):
        if self.z < 2:
            raise ValueError("z must be at least 2")
        if self.D < self.z:
            raise ValueError("need D >= z")
        if self.Q < 1:
            raise ValueError("Q must be a positive integer")
        if not 0 < self.eps < _EPS_MAX:
            raise ValueError("eps must lie in (0, 1/200)")
        if isinstance(self.weights, int):
            if self.weights < 1:
                raise ValueError("uniform support must be nonempty")
        else:
            for n, a in self.weights.items():
                if n < 1:
                    raise ValueError("support must consist of positive integers")
                if a < 0:
                    raise ValueError("weights must be nonnegative")

    @property
    def total(self):
        """|A| = sum of all weights (exact for int/Fraction weights)."""
        if isinstance(self.weights, int):
            return self.weights
        return sum(self.weights.values())

    @property
    def s_value(self) -> float:
        return math.log(self.D) / math.log(self.z)

    def sieve_primes(self) -> np.ndarray:
        """Primes below z that do not divide Q (the support of P(z))."""
        ps = primes_below(self.z)
        if self.Q > 1:
            ps = ps[self.Q % ps != 0]
        return ps


@dataclass(frozen=True)
class SieveReport:
    S: float
    X: float
    V: float
    R: float
    s: float
    lower: float
    upper: float
    mertens_ok: bool
    inside: bool
    note: str = DESK_SCALE_NOTE


# ---------------------------------------------------------------------------
# exact sifted sums
# ---------------------------------------------------------------------------

def legendre_S(problem: SieveProblem):
    """Exact sifted sum by direct roughness scan (support up to 1e8)."""
    ps = problem.sieve_primes()
    if isinstance(problem.weights, int):
        n_max = problem.weights
        if problem.Q == 1:
            return int(rough_numbers(problem.z, n_max).size)
        mask = np.ones(n_max + 1, dtype=bool)
        mask[0] = False
        for p in ps:
            mask[p::p] = False
        return int(np.count_nonzero(mask))
    total = 0
    for n, a in problem.weights.items():
        if a == 0:
            continue
        if all(n % p for p in ps if p <= n):
            total += a
    return total


def legendre_S_mobius(problem: SieveProblem):
    """The same sum via S = sum over squarefree d | P(z) of mu(d) |A_d|.

    Exact inclusion-exclusion; kept to moderate z (<= 1e4) where the
    smooth-divisor tree stays enumerable.
    """
    if problem.z > 10 ** 4:
        raise ValueError("inclusion-exclusion cross-check needs z <= 1e4")
    ps = [int(p) for p in problem.sieve_primes()]
    if isinstance(problem.weights, int):
        top = problem.weights
    else:
        top = max(problem.weights, default=0)
    total = 0
    count = 0

    def dfs(start: int, d: int, mu: int):
        nonlocal total, count
        count += 1
        if count > _DIVISOR_CAP:
            raise DivisorExplosion("smooth divisor tree exceeded 1e8 nodes")
        total += mu * _a_d(problem, d)
        for i in range(start, len(ps)):
            nd = d * ps[i]
            if nd > top:
                break
            dfs(i + 1, nd, -mu)

    dfs(0, 1, 1)
    return total


def _a_d(problem: SieveProblem, d: int):
    """|A_d| = total weight on multiples of d (exact)."""
    if isinstance(problem.weights, int):
        return problem.weights // d
    return sum(a for n, a in problem.weights.items() if n % d == 0)


# ---------------------------------------------------------------------------
# density product and the Mertens-type hypothesis
# ---------------------------------------------------------------------------

_prime_cache: dict = {"limit": 0, "primes": None, "cumlog": None}


def _primes_with_logs(limit: float):
    lim = float(limit)
    if _prime_cache["limit"] < lim:
        ps = primes_below(max(lim, 1000.0))
        _prime_cache["limit"] = max(lim, 1000.0)
        _prime_cache["primes"] = ps
        _prime_cache["cumlog"] = np.concatenate(
            ([0.0], np.cumsum(np.log1p(-1.0 / ps)))
        )
    return _prime_cache["primes"], _prime_cache["cumlog"]


def V_of_z(z: float, q_excluded: int = 1) -> float:
    """Density product V(z) = prod over p < z, p not dividing Q of (1-1/p)."""
    if z > 10 ** 7:
        raise ValueError("prime table capped at 1e7")
    ps, cum = _primes_with_logs(z)
    k = int(np.searchsorted(ps, z, side="left"))
    v = math.exp(cum[k])
    if q_excluded > 1:
        for p in ps[:k]:
            if q_excluded % int(p) == 0:
                v /= 1.0 - 1.0 / float(p)
    return v


def mertens_check(u: float, z: float, eps: float) -> bool:
    """Does prod_{u<=p<z} (1-1/p)^(-1) < (1+eps/3) log z / log u hold?"""
    if not 2 <= u < z <= 10 ** 7:
        raise ValueError("need 2 <= u < z <= 1e7")
    ps, cum = _primes_with_logs(z)
    i = int(np.searchsorted(ps, u, side="left"))
    j = int(np.searchsorted(ps, z, side="left"))
    product = math.exp(-(cum[j] - cum[i]))
    return product < (1.0 + eps / 3.0) * math.log(z) / math.log(u)


def empirical_u1(
    eps: float, z_values=(10 ** 4, 10 ** 5, 10 ** 6), u_max: int = 100
) -> int:
    """Least u0 <= u_max such that the Mertens inequality holds for every
    integer u in [u0, u_max] and every z in z_values with z > u."""
    good = u_max + 1
    for u in range(u_max, 1, -1):
        if all(mertens_check(u, z, eps) for z in z_values if z > u):
            good = u
        else:
            break
    if good > u_max:
        raise ValueError(f"no admissible u1 at or below {u_max}")
    return good


# ---------------------------------------------------------------------------
# remainders
# ---------------------------------------------------------------------------

def _check_modulus(problem: SieveProblem, d: int):
    if d < 1:
        raise ValueError("modulus must be positive")
    m = d
    for p in [int(p) for p in problem.sieve_primes()]:
        if m % p == 0:
            m //= p
            if m % p == 0:
                raise ValueError(f"{d} is not squarefree")
    if m != 1:
        raise ValueError(f"{d} does not divide P(z)")


def remainder_r(problem: SieveProblem, d: int):
    """r(d) = |A_d| - |A|/d, exact (Fraction for integer weights)."""
    _check_modulus(problem, d)
    a_d = _a_d(problem, d)
    total = problem.total
    if isinstance(a_d, int) and isinstance(total, (int, Fraction)):
        return Fraction(a_d) - Fraction(total, d)
    return a_d - total / d


def R_total(problem: SieveProblem) -> float:
    """R = sum over squarefree d | P(z), d < D*Q of |r(d)| (DFS with cap)."""
    ps = [int(p) for p in problem.sieve_primes()]
    cap = problem.D * problem.Q
    total_weight = problem.total
    acc = 0.0
    count = 0

    def dfs(start: int, d: int):
        nonlocal acc, count
        count += 1
        if count > _DIVISOR_CAP:
            raise DivisorExplosion("remainder sum exceeded 1e8 moduli")
        acc += abs(float(_a_d(problem, d)) - float(total_weight) / d)
        for i in range(start, len(ps)):
            nd = d * ps[i]
            if nd >= cap:
                break
            dfs(i + 1, nd)

    dfs(0, 1)
    return acc


# ---------------------------------------------------------------------------
# classical bound functions
# ---------------------------------------------------------------------------

def _f_base(s: float) -> float:
    # 2 e^gamma log(s-1)/s on [2, 4]
    return _TWO_E_GAMMA * math.log(s - 1.0) / s


@lru_cache(maxsize=None)
def F0(s: float) -> float:
    """Upper-bound function; 2e^gamma/s on [1,3], iterated to (3,5]."""
    if not 1.0 <= s <= 5.0:
        raise RangeUnsupported(f"F0 implemented on [1,5]; got s={s:g}")
    if s <= 3.0:
        return _TWO_E_GAMMA / s
    tail, _ = quad(_f_base, 2.0, s - 1.0, epsabs=1e-12, epsrel=1e-12)
    return (_TWO_E_GAMMA + tail) / s


@lru_cache(maxsize=None)
def f0(s: float) -> float:
    """Lower-bound function; 0 below s=2, the log form on [2,4], iterated."""
    if not 1.0 <= s <= 5.0:
        raise RangeUnsupported(f"f0 implemented on [1,5]; got s={s:g}")
    if s < 2.0:
        return 0.0
    if s <= 4.0:
        return _f_base(s)
    tail, _ = quad(lambda u: F0(u - 1.0), 4.0, s, epsabs=1e-12, epsrel=1e-12)
    return (4.0 * _f_base(4.0) + tail) / s


# ---------------------------------------------------------------------------
# bound assembly
# ---------------------------------------------------------------------------

def jr_bounds(problem: SieveProblem) -> SieveReport:
    """Assemble the sieve sandwich and check it against the exact sum."""
    s = problem.s_value
    if not 1.0 <= s <= 5.0:
        raise RangeUnsupported(f"s = log D/log z = {s:.3f} outside [1,5]")
    v = V_of_z(problem.z, problem.Q)
    total = float(problem.total)
    x = v * total
    r = R_total(problem)
    wobble = problem.eps * math.exp(14.0 - s)
    lower = (f0(s) - wobble) * x - r
    upper = (F0(s) + wobble) * x + r
    exact = float(legendre_S(problem))
    # u = 2 is excluded: e^gamma > 1/log 2 makes the product exceed the
    # envelope for every eps, and the hypothesis only asks for SOME
    # starting point u1.  Desk measurement puts u1 = 3 on z <= 1e7.
    mertens_ok = all(
        mertens_check(u, problem.z, problem.eps)
        for u in range(3, min(100, int(problem.z)))
    )
    return SieveReport(
        S=exact,
        X=x,
        V=v,
        R=r,
        s=s,
        lower=lower,
        upper=upper,
        mertens_ok=mertens_ok,
        inside=lower <= exact <= upper,
    )
