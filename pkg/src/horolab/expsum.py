"""Oscillatory-sum families with their theoretical envelopes attached.

Three sum families appear downstream: polynomial-phase sums along
c*n^(1+gamma), quadratic sums along alpha*n^2, and finite geometric sums
over arithmetic progressions.  Each evaluator returns an OscillatorySum
carrying the computed value together with the matching envelope; implicit
constants are always reported as fitted ratios, never asserted.

Phase accuracy: polynomial phases are evaluated in plain binary64 (the
frac of a ~1e8 phase keeps ~2 ulp there); quadratic phases go through a
double-double representation of beta = k*alpha/l so that frac(beta * n^2)
stays accurate to ~1e-22 even at n near the 9e7 index cap (n^2 must stay
exactly representable).

Conjugation symmetry is exact by construction: negative frequencies are
evaluated at |k| and conjugated.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import kernels
from .diophantine import QuadraticSurd, nearest_int_dist
from .errors import QuadratureUnderResolved, ResonanceDetected

QUAD_INDEX_CAP = 9 * 10 ** 7  # keeps n^2 exact in binary64

_SPLITTER = 134217729.0


# ---------------------------------------------------------------------------
# double-double helpers for the quadratic phase constant
# ---------------------------------------------------------------------------

def _two_prod(a: float, b: float):
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def to_dd(x) -> tuple[float, float]:
    """(hi, lo) double-double rendering of a real given in any exact form."""
    if isinstance(x, tuple):
        return float(x[0]), float(x[1])
    if isinstance(x, QuadraticSurd):
        s = math.sqrt(x.D)
        corr = float((Fraction(x.D) - Fraction(s) ** 2) / (2 * Fraction(s)))
        # (P + s + corr) / Q in dd
        hi, lo = _dd_add(float(x.P), 0.0, s, corr)
        return _dd_div_int(hi, lo, x.Q)
    if isinstance(x, (int, float)):
        return float(x), 0.0
    if isinstance(x, Fraction):
        hi = float(x)
        lo = float(x - Fraction(hi))
        return hi, lo
    raise TypeError(f"cannot render {type(x).__name__} as double-double")


def _dd_add(ahi, alo, bhi, blo):
    s = ahi + bhi
    v = s - ahi
    e = (ahi - (s - v)) + (bhi - v)
    lo = e + alo + blo
    hi = s + lo
    return hi, lo - (hi - s)


def _dd_div_int(hi, lo, q: int):
    d = float(q)
    q1 = hi / d
    p, e = _two_prod(q1, d)
    r = ((hi - p) - e + lo) / d
    h = q1 + r
    return h, r - (h - q1)


def _dd_scale(hi, lo, k: int, l: int):
    """beta = (k/l) * (hi + lo) as a dd pair, k > 0."""
    p, e = _two_prod(hi, float(k))
    e += lo * float(k)
    h = p + e
    lo2 = e - (h - p)
    return _dd_div_int(h, lo2, l)


# ---------------------------------------------------------------------------
# sum containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OscillatorySum:
    value: complex
    n_terms: int
    bound: float | None = None

    @property
    def modulus(self) -> float:
        return abs(self.value)

    @property
    def ratio(self) -> float | None:
        if self.bound is None:
            return None
        return self.modulus / self.bound

    def __post_init__(self):
        if self.modulus > self.n_terms * (1.0 + 1e-12) + 1e-12:
            raise ValueError("triangle inequality violated; corrupt sum")


def raw_exp_sum(phases, n: int, threads: int = 1) -> OscillatorySum:
    """Compensated sum of e^{2 pi i phi} over the first n phases."""
    if n > 10 ** 9:
        raise ValueError("term budget exceeded")
    arr = np.fromiter(phases, dtype=np.float64, count=n) if not isinstance(
        phases, np.ndarray
    ) else np.asarray(phases, dtype=np.float64)[:n]

    def block(b0, b1):
        return arr[b0:b1]

    val = kernels.osc_sum(block, 0, arr.size, threads=threads)
    return OscillatorySum(value=val, n_terms=int(arr.size))


def power_sum(
    c: float,
    gamma: float,
    k: int,
    l: float = 1.0,
    n: int = 0,
    threads: int = 1,
) -> OscillatorySum:
    """Sum of e^{2 pi i k c m^{1+gamma} / l} for m = 1..n, with envelope.

    The envelope is (|k|^{1/2} N^{(1+gamma)/2} + |k|^{-1/2} N^{(1-gamma)/2})
    * l^{1/2}; its implicit constant is what the ratio field estimates.
    """
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if not c > 0:
        raise ValueError("c must be positive")
    if k == 0:
        raise ValueError("frequency must be nonzero")
    if n > 10 ** 9:
        raise ValueError("term budget exceeded")
    mult = abs(k) * c / l
    expo = 1.0 + gamma

    def block(b0, b1):
        return kernels.phases_power(mult, expo, b0, b1)

    val = kernels.osc_sum(block, 1, n + 1, threads=threads)
    if k < 0:
        val = val.conjugate()
    ak = float(abs(k))
    bound = (
        math.sqrt(ak) * n ** ((1 + gamma) / 2)
        + n ** ((1 - gamma) / 2) / math.sqrt(ak)
    ) * math.sqrt(l)
    return OscillatorySum(value=val, n_terms=n, bound=bound)


def quad_sum(
    alpha,
    k: int,
    l: int = 1,
    m: int = 0,
    n: int = 0,
    eps: float = 0.01,
    threads: int = 1,
) -> OscillatorySum:
    """Sum of e^{2 pi i k alpha j^2 / l} for j = m+1..n, with envelope.

    alpha may be a float, Fraction, QuadraticSurd, or an explicit (hi, lo)
    pair; it is rendered double-double so the reduced phases stay sharp.
    The envelope is (N-M)^{1/2+eps} |k|^{1/2+eps} l^{1/2}; the constant C
    in front is never asserted, only reported via the ratio.
    """
    if m >= n:
        raise ValueError("need m < n")
    if n > QUAD_INDEX_CAP:
        raise ValueError(f"index cap {QUAD_INDEX_CAP} keeps n^2 exact")
    if k == 0:
        raise ValueError("frequency must be nonzero")
    hi, lo = to_dd(alpha)
    bhi, blo = _dd_scale(hi, lo, abs(int(k)), int(l))

    def block(b0, b1):
        return kernels.phases_quad(bhi, blo, b0, b1)

    val = kernels.osc_sum(block, m + 1, n + 1, threads=threads)
    if k < 0:
        val = val.conjugate()
    bound = (n - m) ** (0.5 + eps) * abs(k) ** (0.5 + eps) * math.sqrt(l)
    return OscillatorySum(value=val, n_terms=n - m, bound=bound)


def vdc_difference_check(alpha, k: int, l: int, n: int) -> float:
    """|S|^2 minus the expanded double sum over pair differences.

    The expansion sum_{p,q <= N} e^{2 pi i k alpha (q^2 - p^2)/l} equals
    |S_N|^2 identically; evaluating both sides independently (the double sum
    term by term in double-double phase arithmetic) gives an internal
    consistency oracle for the quadratic machinery.  Returns the absolute
    difference; O(N^2) work, keep N <= 10^3.
    """
    if n > 2000:
        raise ValueError("double sum is quadratic work; keep n small")
    s = quad_sum(alpha, k=k, l=l, m=0, n=n)
    hi, lo = to_dd(alpha)
    bhi, blo = _dd_scale(hi, lo, abs(int(k)), int(l))
    phi = kernels.phases_quad(bhi, blo, 1, n + 1)
    if k < 0:
        phi = -phi
    total = 0.0
    # sum over q of sum over p of e(beta (q^2 - p^2)): accumulate row sums
    # in index order with plain Neumaier compensation
    comp = 0.0
    for q in range(n):
        row = np.cos(2.0 * np.pi * (phi[q] - phi))
        v = float(np.sum(row))
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
    double_sum = total + comp
    return abs(s.modulus ** 2 - double_sum)


# ---------------------------------------------------------------------------
# periodic test functions
# ---------------------------------------------------------------------------

_NORM_SAMPLES = 1 << 12


@dataclass(frozen=True)
class PeriodicTestFn:
    """Real periodic test function: Fourier polynomial or smooth closure."""

    period: float
    coeffs: dict | None = None
    closure: Callable | None = None
    smoothness: int = 2

    def __post_init__(self):
        if (self.coeffs is None) == (self.closure is None):
            raise ValueError("provide exactly one of coeffs / closure")
        if self.coeffs is not None:
            for k, a in self.coeffs.items():
                conj = complex(self.coeffs.get(-k, 0.0))
                if abs(complex(a).conjugate() - conj) > 1e-12:
                    raise ValueError("coefficients must have conjugate symmetry")

    @property
    def mean(self) -> float:
        if self.coeffs is not None:
            return complex(self.coeffs.get(0, 0.0)).real
        xs = np.arange(_NORM_SAMPLES) * (self.period / _NORM_SAMPLES)
        return float(np.mean(self.closure(xs)))

    def evaluate(self, x):
        xs = np.asarray(x, dtype=np.float64)
        if self.closure is not None:
            return self.closure(xs)
        tot = np.zeros_like(xs)
        for k, a in sorted(self.coeffs.items()):
            if k == 0:
                tot = tot + complex(a).real
            else:
                ang = (2.0 * np.pi * k / self.period) * xs
                a = complex(a)
                tot = tot + a.real * np.cos(ang) - a.imag * np.sin(ang)
        return tot

    def derivative_sup(self, order: int) -> float:
        """Sampled sup of |f^{(order)}| on one period."""
        xs = np.arange(_NORM_SAMPLES) * (self.period / _NORM_SAMPLES)
        if self.coeffs is not None:
            tot = np.zeros(_NORM_SAMPLES, dtype=np.complex128)
            for k, a in self.coeffs.items():
                w = 2j * np.pi * k / self.period
                tot += complex(a) * w ** order * np.exp(w * xs)
            return float(np.abs(tot.real).max())
        vals = np.asarray(self.closure(xs), dtype=np.float64)
        for _ in range(order):
            vals = np.gradient(vals, self.period / _NORM_SAMPLES, edge_order=2)
        return float(np.abs(vals).max())

    def sobolev_sup_norm(self, order: int = 2) -> float:
        """max over derivative orders 0..order of the sampled sup norms."""
        return max(self.derivative_sup(j) for j in range(order + 1))

    def active_frequencies(self):
        if self.coeffs is None:
            raise ValueError("closure functions need fourier_coefficients first")
        return sorted(k for k in self.coeffs if k != 0 and self.coeffs[k] != 0)


def fourier_coefficients(f: PeriodicTestFn, k_max: int, samples: int = 1 << 12):
    """Trapezoid-rule coefficients a_k, |k| <= k_max, with a doubling check."""

    def compute(m):
        xs = np.arange(m) * (f.period / m)
        vals = np.asarray(f.evaluate(xs), dtype=np.float64)
        out = {}
        for k in range(-k_max, k_max + 1):
            ph = np.exp(-2j * np.pi * k * np.arange(m) / m)
            out[k] = complex(np.sum(vals * ph) / m)
        return out

    once = compute(samples)
    twice = compute(2 * samples)
    drift = max(abs(once[k] - twice[k]) for k in once)
    if drift > 1e-8:
        raise QuadratureUnderResolved(
            f"coefficients moved {drift:.2e} when doubling the sample count"
        )
    return twice


def periodic_deficit_power(
    f: PeriodicTestFn, c: float, gamma: float, n: int, threads: int = 1
):
    """(deficit, bound) for the orbit sum of f along c*m^{1+gamma}.

    deficit = |sum_m f(c m^{1+gamma}) - n * mean(f)|, evaluated exactly as
    a combination of power_sum values per active frequency; bound is
    l^3 N^{(1+gamma)/2} ||f||_{2,inf}.
    """
    if f.coeffs is None:
        f = PeriodicTestFn(f.period, coeffs=fourier_coefficients(f, k_max=16))
    acc = 0j
    for k in sorted(kk for kk in f.coeffs if kk != 0):
        a = complex(f.coeffs[k])
        if a == 0:
            continue
        s = power_sum(c, gamma, k, l=f.period, n=n, threads=threads)
        acc += a * s.value
    bound = f.period ** 3 * n ** ((1 + gamma) / 2) * f.sobolev_sup_norm(2)
    return abs(acc), bound


def progression_deficit(
    f: PeriodicTestFn, c: float, d: int, k_steps: int, mu: float = 2.0
):
    """(deficit, bound) for the average of f over the progression c*d*j.

    deficit = |(1/K) sum_{j=0}^{K-1} f(c d j) - mean(f)| via the geometric
    closed form per frequency; bound = d^mu l^{[mu]+8} / K * ||f||.
    The caller certifies mu (the Diophantine type of c/period).
    """
    if d < 1 or k_steps < 1:
        raise ValueError("need positive d and step count")
    if f.coeffs is None:
        # high-order derivative norms from sampled data are hopeless; use
        # the spectral side for both the sum and the norm
        f = PeriodicTestFn(f.period, coeffs=fourier_coefficients(f, k_max=16))
    coeffs = f.coeffs
    acc = 0j
    big_k = k_steps
    for k in sorted(kk for kk in coeffs if kk != 0):
        a = complex(coeffs[k])
        if a == 0:
            continue
        theta = k * c * d / f.period
        if nearest_int_dist(theta) < 1e-14:
            raise ResonanceDetected(
                f"frequency {k}: progression phase {theta!r} collides with an integer"
            )
        num = cmath.exp(2j * np.pi * theta * big_k) - 1.0
        den = cmath.exp(2j * np.pi * theta) - 1.0
        acc += a * (num / den) / big_k
    order = math.floor(mu) + 8
    bound = (
        d ** mu * f.period ** (math.floor(mu) + 8) / big_k * f.sobolev_sup_norm(order)
    )
    return abs(acc), bound


@dataclass(frozen=True)
class DecayReport:
    coeffs: dict
    envelope: dict
    satisfied: bool
    norm: float


def fourier_decay_check(f: PeriodicTestFn, k_max: int) -> DecayReport:
    """Verify |a_k| <= l^2/(4 pi^2 k^2) * ||f||_{2,inf} for 1 <= |k| <= k_max."""
    coeffs = (
        dict(f.coeffs)
        if f.coeffs is not None
        else fourier_coefficients(f, k_max=k_max)
    )
    norm = f.sobolev_sup_norm(2)
    envelope = {}
    ok = True
    for k in range(-k_max, k_max + 1):
        if k == 0:
            continue
        bound = f.period ** 2 / (4 * math.pi ** 2 * k ** 2) * norm
        envelope[k] = bound
        a = abs(complex(coeffs.get(k, 0.0)))
        if a > bound * (1 + 1e-9) + 1e-12:
            ok = False
    return DecayReport(coeffs=coeffs, envelope=envelope, satisfied=ok, norm=norm)
