"""Arithmetic in PSL(2,R), the upper-half-plane action, and the modular quotient.

Matrices are stored projectively with a fixed sign convention (c > 0, or
c = 0 and a > 0).  Points of the quotient are right cosets; reduction
applies integer generators on the left, which moves the base-point image
z = g.i by the classical Gauss steps z -> z - round(x), z -> -1/z until it
lands in the standard fundamental domain {|x| <= 1/2, |z| >= 1}.

Entries may be any real-number type supporting field operations; integer and
Fraction matrices stay exact through compose/invert.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import EnumerationOverflow, ReductionStall

_DET_TOL = 1e-9
_REDUCTION_BUDGET = 10 ** 6


@dataclass(frozen=True)
class GroupElement:
    """Unimodular 2x2 real matrix modulo sign."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if abs(det - 1) > _DET_TOL:
            raise ValueError(f"determinant {det!r} too far from 1")
        if self.c < 0 or (self.c == 0 and self.a < 0):
            object.__setattr__(self, "a", -self.a)
            object.__setattr__(self, "b", -self.b)
            object.__setattr__(self, "c", -self.c)
            object.__setattr__(self, "d", -self.d)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def close_to(self, other: "GroupElement", tol: float = 1e-12) -> bool:
        return all(
            abs(float(p) - float(q)) <= tol
            for p, q in zip(self.entries(), other.entries())
        )


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"not an upper-half-plane point: y={self.y!r}")


IDENTITY = GroupElement(1, 0, 0, 1)
OMEGA = GroupElement(0, -1, 1, 0)
BASE_POINT = HalfPlanePoint(0.0, 1.0)


def u0(s) -> GroupElement:
    """Upper-triangular unipotent u0(s) = (1, s; 0, 1)."""
    return GroupElement(1, s, 0, 1)


def lower_unipotent(y) -> GroupElement:
    """Lower-triangular unipotent (1, 0; y, 1)."""
    return GroupElement(1, 0, y, 1)


def a_t(t: float) -> GroupElement:
    """Diagonal flow element; acts on the half plane as z -> exp(-t) z."""
    e = math.exp(t / 2.0)
    return GroupElement(1.0 / e, 0.0, 0.0, e)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    return GroupElement(
        g.a * h.a + g.b * h.c,
        g.a * h.b + g.b * h.d,
        g.c * h.a + g.d * h.c,
        g.c * h.b + g.d * h.d,
    )


def invert(g: GroupElement) -> GroupElement:
    return GroupElement(g.d, -g.b, -g.c, g.a)


def mobius_act(g: GroupElement, z: HalfPlanePoint) -> HalfPlanePoint:
    a, b, c, d = (float(v) for v in g.entries())
    dr = c * z.x + d
    di = c * z.y
    den = dr * dr + di * di
    nr = a * z.x + b
    ni = a * z.y
    return HalfPlanePoint((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)


def hyperbolic_distance(z1: HalfPlanePoint, z2: HalfPlanePoint) -> float:
    dx = z1.x - z2.x
    dy = z1.y - z2.y
    arg = 1.0 + (dx * dx + dy * dy) / (2.0 * z1.y * z2.y)
    return math.acosh(arg)


# ---------------------------------------------------------------------------
# fundamental-domain reduction
# ---------------------------------------------------------------------------

_T_STEP = "T"  # (1, 1; 0, 1) applied on the left, with an integer power
_S_STEP = "S"  # (0, -1; 1, 0) applied on the left


@dataclass(frozen=True)
class LatticePoint:
    """A point of the quotient: original representative plus its reduction.

    ``reduced = gamma . g`` for the integer matrix gamma encoded by ``word``
    (leftmost word entry applied last).
    """

    g: GroupElement
    reduced: GroupElement
    word: tuple

    def image(self) -> HalfPlanePoint:
        return mobius_act(self.reduced, BASE_POINT)

    def gamma(self) -> GroupElement:
        return word_to_gamma(self.word)


def word_to_gamma(word: Sequence) -> GroupElement:
    g = GroupElement(1, 0, 0, 1)
    for step in word:
        if step[0] == _T_STEP:
            g = compose(GroupElement(1, step[1], 0, 1), g)
        elif step[0] == _S_STEP:
            g = compose(OMEGA, g)
        else:
            raise ValueError(f"unknown reduction step {step!r}")
    return g


def reduce_psl2z(g: GroupElement) -> LatticePoint:
    """Left-reduce g until its base-point image lies in the fundamental domain."""
    z = mobius_act(g, BASE_POINT)
    x, y = z.x, z.y
    word = []
    budget = _REDUCTION_BUDGET
    while True:
        n = round(x)
        if n != 0:
            budget -= abs(n)
            word.append((_T_STEP, -n))
            x -= n
        r2 = x * x + y * y
        if r2 >= 1.0 - 1e-12:
            break
        budget -= 1
        word.append((_S_STEP,))
        x, y = -x / r2, y / r2
        if budget <= 0:
            raise ReductionStall("generator budget exhausted during reduction")
    gamma = word_to_gamma(word)
    reduced = compose(gamma, g)
    return LatticePoint(g=g, reduced=reduced, word=tuple(word))


def lattice_point(g: GroupElement) -> LatticePoint:
    return reduce_psl2z(g)


# ---------------------------------------------------------------------------
# cusp excursion and injectivity radius
# ---------------------------------------------------------------------------

def cusp_excursion(p: LatticePoint, t: float) -> float:
    """Distance from the base point to the time-t geodesic push of p.

    The flow acts on representatives by right multiplication with a_t(-t),
    which sends the base-point image upward along the imaginary axis for the
    identity coset: dist(t) = t there.
    """
    if t < 0:
        raise ValueError("excursion time must be nonnegative")
    flowed = compose(p.reduced, a_t(-t))
    q = reduce_psl2z(flowed)
    return hyperbolic_distance(BASE_POINT, q.image())


def _conjugated_gap_sq(x: float, y: float, ga: int, gb: int, gc: int, gd: int) -> float:
    # squared Frobenius distance || B^{-1} gamma B - I ||_F^2 where B is the
    # Borel part of the reduced representative (the rotation part drops out)
    m00 = ga - x * gc
    m01 = (ga * x + gb - x * (gc * x + gd)) / y
    m10 = gc * y
    m11 = gc * x + gd
    return (m00 - 1.0) ** 2 + m01 * m01 + m10 * m10 + (m11 - 1.0) ** 2


def injectivity_eta(p: LatticePoint) -> float:
    """Frobenius distance from the identity to the nearest group translate.

    Enumerates integer matrices inside the entry box allowed for the reduced
    height; the minimum is realized either by an integer translation (norm
    1/y) or by a finite set of small-c candidates pruned by the running best.
    """
    z = p.image()
    x, y = z.x, z.y
    dist = hyperbolic_distance(BASE_POINT, z)
    # the (1 - 1e-12) guard keeps acosh/exp round-trip noise from pushing a
    # boundary case (dist = log 1000 exactly) over the cap
    entry_bound = math.ceil(10.0 * math.exp(dist) * (1.0 - 1e-12))
    if entry_bound > 10 ** 4:
        raise EnumerationOverflow(
            f"entry bound {entry_bound} exceeds enumeration cap"
        )
    best_sq = 1.0 / (y * y)  # gamma = u0(+-1)
    c_max = min(entry_bound, int(math.floor(math.sqrt(best_sq) / y)) + 1)
    for gc in range(1, c_max + 1):
        if (gc * y) ** 2 >= best_sq:
            continue
        slack = math.sqrt(best_sq) + 1.0
        a_lo = math.floor(x * gc - slack)
        a_hi = math.ceil(x * gc + slack)
        d_lo = math.floor(-x * gc - slack)
        d_hi = math.ceil(-x * gc + slack)
        for ga in range(a_lo, a_hi + 1):
            for gd in range(d_lo, d_hi + 1):
                num = ga * gd - 1
                if num % gc != 0:
                    continue
                gb = num // gc
                for sa, sb, sc, sd in ((ga, gb, gc, gd), (-ga, -gb, -gc, -gd)):
                    val = _conjugated_gap_sq(x, y, sa, sb, sc, sd)
                    if val < best_sq:
                        best_sq = val
    return math.sqrt(best_sq)


def effective_radius(p: LatticePoint, big_t: float) -> float:
    """r(p, T) = T * exp(-dist at geodesic time log T); the probe radius."""
    if big_t < 1:
        raise ValueError("T must be at least 1")
    return big_t * math.exp(-cusp_excursion(p, math.log(big_t)))


# ---------------------------------------------------------------------------
# Bruhat decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BruhatFactors:
    """g = u0(s) a_t(t) lower(y)  or  g = omega a_t(t) lower(y)."""

    branch: str  # "UAU-" or "wAU-"
    s: float
    t: float
    y: float

    def recompose(self) -> GroupElement:
        core = compose(a_t(self.t), lower_unipotent(self.y))
        if self.branch == "UAU-":
            return compose(u0(self.s), core)
        return compose(OMEGA, core)


def bruhat_decompose(g: GroupElement) -> BruhatFactors:
    a, b, c, d = (float(v) for v in g.entries())
    if abs(d) <= 1e-14:
        # c > 0 by sign normalization when d = 0
        return BruhatFactors(branch="wAU-", s=0.0, t=-2.0 * math.log(c), y=-a * c)
    return BruhatFactors(branch="UAU-", s=b / d, t=2.0 * math.log(abs(d)), y=c / d)
