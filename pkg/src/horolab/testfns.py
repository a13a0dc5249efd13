"""Test functions on the modular surface.

Every observable used downstream is pulled back from the base point: a
function f(x, y) evaluated at the reduced image of a lattice point in the
standard fundamental domain.  That restriction keeps the invariant
integral a two-dimensional quadrature while still giving enough
functions to detect density and equidistribution (height indicators see
the cusp, bumps see compact pieces).

Height indicators come with their closed-form invariant integrals:
the normalized measure of {y > c} in the fundamental domain is
(3/pi) * integral_{-1/2}^{1/2} integral_c^inf y^-2 dy dx = 3/(pi*c)
whenever c >= 1 (the level set then clears the floor of the domain).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# normalized so the total invariant mass of the fundamental domain is 1;
# the un-normalized hyperbolic area of F is pi/3
HAAR_NORMALIZATION = 3.0 / math.pi


@dataclass(frozen=True)
class SurfaceTestFn:
    """Observable on the quotient, evaluated at reduced coordinates.

    breaks lists the y-levels where the function jumps (empty for smooth
    functions); quadratures split their grids there so indicators
    integrate exactly.  haar_closed_form carries the exact invariant
    integral when one is known.
    """

    name: str
    fn: Callable = field(compare=False)
    breaks: tuple = ()
    haar_closed_form: float | None = None

    def __call__(self, x, y):
        return self.fn(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))


def one() -> SurfaceTestFn:
    return SurfaceTestFn(
        name="one",
        fn=lambda x, y: np.ones_like(y),
        haar_closed_form=1.0,
    )


def height_indicator(c: float) -> SurfaceTestFn:
    """Indicator of {y > c}; closed-form mass 3/(pi c) for c >= 1."""
    if not c > 0:
        raise ValueError("height cut must be positive")
    closed = 3.0 / (math.pi * c) if c >= 1.0 else None
    return SurfaceTestFn(
        name=f"height>{c:g}",
        fn=lambda x, y: (y > c).astype(np.float64),
        breaks=(float(c),),
        haar_closed_form=closed,
    )


def height_band(c1: float, c2: float) -> SurfaceTestFn:
    """Indicator of {c1 < y <= c2}; closed form when the band clears y=1."""
    if not 0 < c1 < c2:
        raise ValueError("need 0 < c1 < c2")
    closed = None
    if c1 >= 1.0:
        closed = 3.0 / math.pi * (1.0 / c1 - 1.0 / c2)
    return SurfaceTestFn(
        name=f"band({c1:g},{c2:g}]",
        fn=lambda x, y: ((y > c1) & (y <= c2)).astype(np.float64),
        breaks=(float(c1), float(c2)),
        haar_closed_form=closed,
    )


def smooth_height(c: float) -> SurfaceTestFn:
    """Smooth saturating surrogate for the height indicator: 1/(1+(c/y)^4)."""
    if not c > 0:
        raise ValueError("height scale must be positive")
    return SurfaceTestFn(
        name=f"smooth-height({c:g})",
        fn=lambda x, y: 1.0 / (1.0 + (c / y) ** 4),
    )


def gaussian_bump(x0: float, y0: float, width: float) -> SurfaceTestFn:
    """Bump centered at (x0, y0), Gaussian in (x, log y) coordinates.

    Nonnegative, peak value 1; suitable as a sieve weight.
    """
    if not (y0 > 0 and width > 0):
        raise ValueError("need y0 > 0 and width > 0")

    def fn(x, y):
        u = (x - x0) / width
        v = (np.log(y) - math.log(y0)) / width
        return np.exp(-(u * u + v * v))

    return SurfaceTestFn(name=f"bump({x0:g},{y0:g};{width:g})", fn=fn)


def standard_family() -> tuple[SurfaceTestFn, ...]:
    """The default observable set for equidistribution experiments."""
    return (
        height_indicator(1.5),
        height_indicator(2.0),
        height_indicator(3.0),
        height_band(1.0, 1.5),
        smooth_height(2.0),
        gaussian_bump(0.0, 1.2, 0.3),
        gaussian_bump(0.25, 1.8, 0.4),
    )
