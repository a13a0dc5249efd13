"""Periodic horocycle orbits, their period integrals, and error budgets.

A rational point here is the coset of a lower-triangular unipotent with
rational parameter p/q: its horocycle orbit closes up after time exactly
q^2, which is proved in exact integer arithmetic, never numerically.
Period integrals along the closed orbit and the invariant (Haar)
integral over the modular surface are computed by certified midpoint
quadrature, and the error budgets used by the desk replays are plain
formula evaluators with log10 companions for the regimes where binary64
underflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .diophantine import ContinuedFraction, _ln, cf_expand_available, convergents
from .errors import (
    NoApproximantFound,
    NotReduced,
    QuadratureUnderResolved,
)
from .testfns import HAAR_NORMALIZATION, SurfaceTestFn

_CHUNK = 1 << 20
_LN10 = math.log(10.0)


# ---------------------------------------------------------------------------
# periodic points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PeriodicPoint:
    """Coset of the lower unipotent with parameter p/q; orbit period q^2."""

    p: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be a positive integer")
        if math.gcd(self.p, self.q) != 1:
            raise NotReduced(f"{self.p}/{self.q} is not in lowest terms")

    @property
    def period(self) -> int:
        return self.q * self.q

    def fixes(self, s: int) -> bool:
        """Exact test: does flowing for integer time s return to the coset?

        Conjugating the time-s flow by the base matrix gives entries
        (1 -/+ s p/q, s; -s p^2/q^2, 1 +/- s p/q); the coset returns iff
        all are integers, i.e. q | s*p and q^2 | s*p^2.
        """
        s = int(s)
        return (s * self.p) % self.q == 0 and (s * self.p * self.p) % (
            self.q * self.q
        ) == 0

    def x_float(self) -> float:
        return self.p / self.q


def make_periodic_point(p: int, q: int) -> PeriodicPoint:
    """Certified periodic point: gcd check plus the exact period witness.

    The minimality of q^2 follows from gcd(p, q) = 1 in integer
    arithmetic: q^2 | s*p^2 forces q^2 | s.  The returned point's fixes()
    makes the exhaustive witness available for any q.
    """
    pt = PeriodicPoint(int(p), int(q))
    if not pt.fixes(pt.period):
        raise AssertionError("period witness failed; integer arithmetic broken")
    return pt


def certify_minimal_period(pt: PeriodicPoint) -> bool:
    """Exhaustively confirm no s in 1..q^2-1 fixes the coset (O(q^2))."""
    for s in range(1, pt.period):
        if pt.fixes(s):
            return False
    return pt.fixes(pt.period)


# ---------------------------------------------------------------------------
# approximating sequences of periodic points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApproxStep:
    point: PeriodicPoint
    gap: float
    gap_log10: float
    gap_exact: Fraction


def approx_periodic_sequence(x, kappa: float, depth: int = 40) -> tuple:
    """Periodic points tracking x with gap <= (q^2)^(-1/(1-kappa)).

    The caller certifies that x is not Diophantine of type
    2/(1-kappa); this routine just filters the convergents of x by the
    certified gap bound (the exact upper bound 1/(q_k q_{k+1}), compared
    in log space so astronomically small gaps never underflow).
    """
    if not 0 < kappa < 1:
        raise ValueError("kappa must lie in (0, 1)")
    cf = x if isinstance(x, ContinuedFraction) else cf_expand_available(x, depth)
    exponent = 2.0 / (1.0 - kappa)
    steps = []
    seen = set()
    for approx in convergents(cf):
        # q = 1 satisfies gap <= q^(-anything) vacuously; the tracking
        # sequence starts where the decay requirement has content
        if approx.q < 2 or approx.q in seen:
            continue
        # certified upper bound on |x - p/q| against q^(-exponent)
        if _ln(approx.err_bound) <= -exponent * math.log(approx.q):
            seen.add(approx.q)
            lg = _ln(approx.err_bound) / _LN10
            steps.append(
                ApproxStep(
                    point=make_periodic_point(approx.p, approx.q),
                    gap=float(approx.err_bound),
                    gap_log10=lg,
                    gap_exact=approx.err_bound,
                )
            )
    if not steps:
        raise NoApproximantFound(
            f"no convergent of depth <= {depth} has gap <= q^-{exponent:.3g}; "
            "the point is too Diophantine for this kappa"
        )
    return tuple(steps)


# ---------------------------------------------------------------------------
# period integrals along closed orbits
# ---------------------------------------------------------------------------

def _orbit_chunks(pt: PeriodicPoint, samples: int):
    """Midpoint nodes of one full period, yielded in fixed chunks."""
    h = pt.period / samples
    for b0 in range(0, samples, _CHUNK):
        b1 = min(b0 + _CHUNK, samples)
        s = (np.arange(b0, b1, dtype=np.float64) + 0.5) * h
        yield s


def _reduced_orbit(pt: PeriodicPoint, s: np.ndarray):
    zx, zy = kernels.horo_images(pt.x_float(), 1.0, s)
    return kernels.reduce_points(zx, zy)


def _reduced_y(pt: PeriodicPoint, s: np.ndarray) -> np.ndarray:
    return _reduced_orbit(pt, np.asarray(s, dtype=np.float64))[1]


def _family_pass(fns, pt: PeriodicPoint, samples: int, threads: int):
    """One shared reduced-orbit sweep valuing every function in fns.

    Smooth functions accumulate composite-midpoint chunk sums; functions
    declaring jump levels get the level crossings of the reduced height
    collected during the same sweep (sign changes between consecutive
    nodes, streamed across chunk boundaries with wraparound) and then
    sharpened by vectorized bisection — the reduced height is continuous
    in s, so each flagged cell holds a root.  Between consecutive roots a
    break function is constant along the orbit and integrates as an
    exactly measured interval sum.
    """
    levels = sorted({lv for f in fns for lv in f.breaks})
    h = pt.period / samples
    parts = [[] for _ in fns]
    idx_bits = {lv: [] for lv in levels}
    flag_bits = {lv: [] for lv in levels}
    first = {}
    last = {}
    base = 0
    for s in _orbit_chunks(pt, samples):
        rx, ry = _reduced_orbit(pt, s)
        for j, f in enumerate(fns):
            if not f.breaks:
                parts[j].append(kernels.tree_sum(f(rx, ry), threads=threads))
        for lv in levels:
            fl = ry > lv
            if base == 0:
                first[lv] = bool(fl[0])
            elif last[lv] != bool(fl[0]):
                idx_bits[lv].append(np.array([base - 1], dtype=np.int64))
                flag_bits[lv].append(np.array([last[lv]]))
            inner = np.nonzero(fl[:-1] != fl[1:])[0]
            if inner.size:
                idx_bits[lv].append(inner.astype(np.int64) + base)
                flag_bits[lv].append(fl[inner])
            last[lv] = bool(fl[-1])
        base += s.size

    roots = {}
    for lv in levels:
        if last[lv] != first[lv]:
            idx_bits[lv].append(np.array([samples - 1], dtype=np.int64))
            flag_bits[lv].append(np.array([last[lv]]))
        if not idx_bits[lv]:
            roots[lv] = np.empty(0)
            continue
        idx = np.concatenate(idx_bits[lv])
        above_lo = np.concatenate(flag_bits[lv])
        lo = (idx + 0.5) * h
        hi = (idx + 1.5) * h  # wraps past the period for the last cell
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            same = (_reduced_y(pt, mid % pt.period) > lv) == above_lo
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        roots[lv] = 0.5 * (lo + hi)

    out = []
    for j, f in enumerate(fns):
        if f.breaks:
            rs = np.sort(np.concatenate([roots[lv] for lv in f.breaks]))
            if rs.size == 0:
                mids = np.array([0.5 * pt.period])
                lengths = np.array([float(pt.period)])
            else:
                ends = np.append(rs[1:], rs[0] + pt.period)
                mids = 0.5 * (rs + ends) % pt.period
                lengths = ends - rs
            rx, ry = _reduced_orbit(pt, mids)
            out.append(float(np.sum(f(rx, ry) * lengths)) / pt.period)
        else:
            out.append(kernels._neumaier(parts[j]) / samples)
    return out


def period_integral_family(
    fns,
    pt: PeriodicPoint,
    samples: int | None = None,
    tol: float = 1e-6,
    threads: int = 1,
    max_doublings: int = 5,
) -> tuple:
    """Averages of several functions over one closed orbit, shared sweep.

    Composite midpoint along [0, q^2] with at least 64 nodes per unit
    time; functions that declare jump levels get their crossing times
    sharpened by bisection, so indicators integrate to certificate
    accuracy too.  The certificate is adaptive: the node count doubles
    until one more doubling moves every result by less than tol; if that
    never happens within max_doublings rounds, QuadratureUnderResolved.
    """
    if samples is None:
        samples = 64 * pt.period
    if samples < 64 * pt.period:
        raise QuadratureUnderResolved(
            f"period {pt.period} needs at least {64 * pt.period} samples"
        )
    coarse = _family_pass(fns, pt, samples, threads)
    delta = math.inf
    for _ in range(max_doublings):
        samples *= 2
        fine = _family_pass(fns, pt, samples, threads)
        delta = max(abs(a - b) for a, b in zip(fine, coarse))
        if delta < tol:
            return tuple(fine)
        coarse = fine
    raise QuadratureUnderResolved(
        f"doubling still moved a period integral by {delta:.2e}"
    )


def period_integral(
    f: SurfaceTestFn,
    pt: PeriodicPoint,
    samples: int | None = None,
    tol: float = 1e-6,
    threads: int = 1,
    max_doublings: int = 5,
) -> float:
    """Average of f over one full closed orbit, with a doubling certificate."""
    return period_integral_family(
        (f,), pt, samples=samples, tol=tol, threads=threads,
        max_doublings=max_doublings,
    )[0]


# ---------------------------------------------------------------------------
# the invariant integral over the modular surface
# ---------------------------------------------------------------------------

def _haar_pass(f: SurfaceTestFn, grid: int) -> float:
    """(3/pi) * double integral of f y^-2 over the fundamental domain.

    Substituting v = 1/y maps each column to the bounded range
    (0, (1-x^2)^(-1/2)]; midpoint in both directions, with the v-grid
    split at every declared jump level so indicators are exact.
    """
    xs = (np.arange(grid) + 0.5) / grid - 0.5
    breaks_v = sorted(1.0 / b for b in f.breaks) if f.breaks else []
    total = 0.0
    for x in xs:
        v_top = 1.0 / math.sqrt(1.0 - x * x)
        cuts = [0.0] + [v for v in breaks_v if v < v_top] + [v_top]
        col = 0.0
        for a, b in zip(cuts, cuts[1:]):
            length = b - a
            cnt = max(1, round(grid * length / v_top))
            v = a + (np.arange(cnt) + 0.5) * (length / cnt)
            col += (length / cnt) * float(np.sum(f(np.full(cnt, x), 1.0 / v)))
        total += col / grid
    return HAAR_NORMALIZATION * total


def haar_integral(f: SurfaceTestFn, grid: int = 512, tol: float = 1e-6) -> float:
    """Invariant integral of f, normalized to total mass 1, with doubling check."""
    coarse = _haar_pass(f, grid)
    fine = _haar_pass(f, 2 * grid)
    if abs(fine - coarse) >= tol:
        raise QuadratureUnderResolved(
            f"doubling moved the invariant integral by {abs(fine - coarse):.2e}"
        )
    return fine


def haar_value(f: SurfaceTestFn, grid: int = 512, tol: float = 1e-6) -> float:
    """Closed form when the function carries one, else certified quadrature."""
    if f.haar_closed_form is not None:
        return f.haar_closed_form
    return haar_integral(f, grid=grid, tol=tol)


# ---------------------------------------------------------------------------
# error budgets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorBudget:
    """Named bound components; total is their plain sum.

    log10_terms carries exact-log companions so schedules whose terms
    underflow binary64 (gaps like q^-200) still order correctly.
    """

    terms: dict
    log10_terms: dict

    @property
    def total(self) -> float:
        return float(sum(self.terms.values()))

    @property
    def total_log10(self) -> float:
        return max(self.log10_terms.values())


def _log10(value) -> float:
    if isinstance(value, Fraction):
        return _ln(value) / _LN10
    if value <= 0:
        return -math.inf
    return math.log10(value)


def _pow10(lg: float) -> float:
    if lg < -300.0:
        return 0.0
    if lg > 300.0:
        return math.inf
    return 10.0 ** lg


def orbit_divergence_bound(s: float, delta: float) -> float:
    """Nearby-orbit divergence after time s: max(s^2, s, 1) * delta."""
    if delta < 0:
        raise ValueError("need a nonnegative initial distance")
    return max(s * s, s, 1.0) * delta


def orbit_divergence_intermediate(n, gap) -> float:
    """The cruder N^5 * gap form used before time-splitting tightens it."""
    return _pow10(5.0 * _log10(n) + _log10(gap))


def error_budget_p23(n, gamma: float, d_pq, d_q) -> ErrorBudget:
    """Budget N^{2+2g} d(p,q) + d(q)^3 N^{(g-1)/2} for the type-k replay."""
    lg_n = _log10(n)
    lg1 = (2.0 + 2.0 * gamma) * lg_n + _log10(d_pq)
    lg2 = 3.0 * _log10(d_q) + 0.5 * (gamma - 1.0) * lg_n
    logs = {"orbit_divergence": lg1, "periodic_equidistribution": lg2}
    return ErrorBudget(
        terms={k: _pow10(v) for k, v in logs.items()}, log10_terms=logs
    )


def error_budget_l45(n, gap, q: int, eps: float = 0.01) -> ErrorBudget:
    """Budget N^4 |x-p/q| + q^6 N^{-1/2+eps} for the quadratic-times replay."""
    lg_n = _log10(n)
    lg1 = 4.0 * lg_n + _log10(gap)
    lg2 = 6.0 * _log10(q) + (eps - 0.5) * lg_n
    logs = {"orbit_divergence": lg1, "weyl_equidistribution": lg2}
    return ErrorBudget(
        terms={k: _pow10(v) for k, v in logs.items()}, log10_terms=logs
    )


def schedule_p23(d_q: int) -> int:
    """Orbit length schedule d(q)^10 for the type-kappa replay."""
    return int(d_q) ** 10


def schedule_l45(q: int) -> int:
    """Orbit length schedule q^24 for the quadratic-times replay."""
    return int(q) ** 24
