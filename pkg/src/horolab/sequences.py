"""Sampling-time generators and integer factorization support.

Three families of sampling sets drive the experiments: polynomial-rate
sparse times c*n^(1+gamma), quadratic times alpha*n^2, and L-almost-prime
integers.  The almost-prime machinery runs on a sieve array of Omega values
(prime factors counted with multiplicity), built once per size and cached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import FactorizationTooLarge

FACTORIZE_LIMIT = 10 ** 12
_TRIAL_LIMIT = 10 ** 6


@dataclass(frozen=True)
class PowerSparse:
    c: float
    gamma: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")


@dataclass(frozen=True)
class Squares:
    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class AlmostPrimes:
    L: int
    c: float = 1.0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be at least 1")
        if not self.c > 0:
            raise ValueError("c must be positive")


@dataclass(frozen=True)
class SequenceSpec:
    kind: PowerSparse | Squares | AlmostPrimes
    n_max: int

    def __post_init__(self):
        if not 1 <= self.n_max <= 10 ** 9:
            raise ValueError("n_max out of range")


def gen_times(spec: SequenceSpec) -> Iterator[float]:
    """Strictly increasing sampling times for the given family."""
    kind = spec.kind
    if isinstance(kind, PowerSparse):
        expo = 1.0 + kind.gamma
        for n in range(1, spec.n_max + 1):
            yield kind.c * math.exp(expo * math.log(n))
    elif isinstance(kind, Squares):
        for n in range(1, spec.n_max + 1):
            yield kind.alpha * float(n * n)
    elif isinstance(kind, AlmostPrimes):
        for n in almost_primes(kind.L, spec.n_max):
            yield kind.c * float(n)
    else:
        raise TypeError(f"unknown sequence kind {kind!r}")


# ---------------------------------------------------------------------------
# Omega sieve
# ---------------------------------------------------------------------------

_omega_cache: dict[int, np.ndarray] = {}


def primes_below(z: float) -> np.ndarray:
    """All primes p < z as an int64 array."""
    if z <= 2:
        return np.zeros(0, dtype=np.int64)
    n = int(math.ceil(z)) - 1  # strict: integral z excludes itself
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def omega_table(n_max: int) -> np.ndarray:
    """Omega(n) (with multiplicity) for 0 <= n <= n_max; entry 0 unused.

    Built by adding one per prime-power divisor class: Omega(n) counts the
    prime powers p^k dividing n, summed over k >= 1.
    """
    if n_max in _omega_cache:
        return _omega_cache[n_max]
    om = np.zeros(n_max + 1, dtype=np.uint8)
    for p in primes_below(n_max + 1):
        pk = int(p)
        while pk <= n_max:
            om[pk::pk] += 1
            pk *= int(p)
    _omega_cache[n_max] = om
    return om


def omega_big(n: int) -> int:
    """Omega(n) for a single integer via factorization."""
    return factorize(n).omega_big


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple

    @property
    def omega_big(self) -> int:
        return len(self.factors)


def factorize(n: int) -> Factorization:
    """Exact factorization by trial division plus a single large-prime tail.

    After removing every prime below 10^6, a surviving cofactor of an input
    <= 10^12 must itself be prime.
    """
    if n < 1:
        raise ValueError("need a positive integer")
    if n > FACTORIZE_LIMIT:
        raise FactorizationTooLarge(f"{n} exceeds the 10^12 factorization bound")
    m = int(n)
    out = []
    for p in range(2, _TRIAL_LIMIT + 1):
        if p * p > m:
            break
        while m % p == 0:
            out.append(p)
            m //= p
    if m > 1:
        out.append(m)
    return Factorization(n=int(n), factors=tuple(out))


def almost_primes(L: int, n_max: int) -> np.ndarray:
    """{n <= n_max : Omega(n) <= L}, ascending; includes 1 (Omega(1) = 0)."""
    if L < 1:
        raise ValueError("L must be at least 1")
    om = omega_table(n_max)
    hits = np.nonzero(om[1:] <= L)[0] + 1
    return hits.astype(np.int64)


def rough_numbers(z: float, n_max: int) -> np.ndarray:
    """{n <= n_max : gcd(n, product of primes < z) = 1}, ascending."""
    if z > 10 ** 6:
        raise ValueError("z beyond the supported sieve range")
    mask = np.ones(n_max + 1, dtype=bool)
    mask[0] = False
    for p in primes_below(z):
        mask[p::p] = False
    return np.nonzero(mask)[0].astype(np.int64)
