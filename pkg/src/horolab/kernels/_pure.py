"""NumPy fallback kernels.

Every function here has a compiled twin in ``_fast``; the two must agree
bit-for-bit on the pure-arithmetic paths (fundamental-domain reduction,
pairwise block sums of identical inputs) and to a few ulps on paths that
evaluate transcendental functions (cos/sin/pow differ between libm and
NumPy's loops).

The deterministic summation contract: a stream is cut into fixed blocks of
``BLOCK`` terms by global index, each block is zero-padded and reduced by a
balanced pairwise tree, and block results are combined in index order with
Neumaier compensation.  The schedule depends only on the index range, never
on thread count, so parallel and serial runs produce identical bits.
"""

from __future__ import annotations

import numpy as np

BLOCK = 16384  # 2**14, fixed by the summation contract

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker split constant


def backend_name() -> str:
    return "pure"


# ---------------------------------------------------------------------------
# fundamental-domain reduction (bulk)
# ---------------------------------------------------------------------------

def reduce_points(x: np.ndarray, y: np.ndarray, max_iter: int = 512):
    """Gauss-reduce points x+iy into {|x| <= 1/2, x^2+y^2 >= 1}.

    Returns (x_red, y_red, iterations_used).  The per-point operation
    sequence is: translate by -rint(x); if |z|^2 < 1 - 1e-12 invert
    (x,y) -> (-x, y)/|z|^2; repeat; final translate.  Points that finish
    early keep being "translated" by rint(x) = 0, which is a bitwise no-op,
    so the masked vector loop reproduces the scalar loop exactly.
    """
    x = np.array(x, dtype=np.float64, copy=True)
    y = np.array(y, dtype=np.float64, copy=True)
    used = max_iter
    for it in range(max_iter):
        x -= np.rint(x)
        r2 = x * x + y * y
        live = r2 < 1.0 - 1e-12
        if not live.any():
            used = it
            break
        inv = r2[live]
        x[live] = -x[live] / inv
        y[live] = y[live] / inv
    x -= np.rint(x)
    return x, y, used


# ---------------------------------------------------------------------------
# phase generation
# ---------------------------------------------------------------------------

def phases_power(mult: float, expo: float, n0: int, n1: int) -> np.ndarray:
    """frac(mult * n**expo) for n in [n0, n1)."""
    n = np.arange(n0, n1, dtype=np.float64)
    p = mult * np.exp(expo * np.log(n))
    return p - np.floor(p)


def phases_quad(bhi: float, blo: float, n0: int, n1: int) -> np.ndarray:
    """frac(beta * n^2) with beta = bhi + blo a double-double constant.

    n^2 must stay below 2**53 (callers enforce n <= 9e7) so the square is
    exact; the product bhi*n^2 is corrected by a Dekker two-product error
    term plus the blo tail, keeping the fractional part accurate to ~1e-22
    even when beta*n^2 ~ 1e13.
    """
    n = np.arange(n0, n1, dtype=np.float64)
    m = n * n
    p = bhi * m
    c = _SPLITTER * bhi
    ahi = c - (c - bhi)
    alo = bhi - ahi
    c = _SPLITTER * m
    mhi = c - (c - m)
    mlo = m - mhi
    err = ((ahi * mhi - p) + ahi * mlo + alo * mhi) + alo * mlo
    f = p - np.floor(p)
    phi = f + (err + blo * m)
    return phi - np.floor(phi)


def times_quad(alpha: float, n0: int, n1: int) -> np.ndarray:
    """t_n = alpha * n^2 as plain binary64 (full value, not reduced)."""
    n = np.arange(n0, n1, dtype=np.float64)
    return alpha * (n * n)


# ---------------------------------------------------------------------------
# horocycle orbit images
# ---------------------------------------------------------------------------

def horo_images(x: float, h: float, t: np.ndarray):
    """Images (1,0;x,1) . (t + i h) on the upper half plane.

    Returns (re, im) arrays; the formula is w/(xw+1) with w = t+ih, written
    out in real arithmetic so both backends execute the same operations.
    """
    t = np.asarray(t, dtype=np.float64)
    dr = x * t + 1.0
    di = x * h
    d2 = dr * dr + di * di
    zx = (t * dr + h * di) / d2
    zy = (h * dr - t * di) / d2
    return zx, zy


# ---------------------------------------------------------------------------
# deterministic block sums
# ---------------------------------------------------------------------------

def _pair_tree(a: np.ndarray) -> float:
    while a.size > 1:
        a = a[0::2] + a[1::2]
    return float(a[0])


def _padded(a: np.ndarray) -> np.ndarray:
    if a.size == BLOCK:
        return a
    out = np.zeros(BLOCK, dtype=np.float64)
    out[: a.size] = a
    return out


def sum_block_cis(phi: np.ndarray):
    """(sum cos 2*pi*phi, sum sin 2*pi*phi) by the padded pairwise tree."""
    ang = (2.0 * np.pi) * np.asarray(phi, dtype=np.float64)
    re = _pair_tree(_padded(np.cos(ang)))
    im = _pair_tree(_padded(np.sin(ang)))
    return re, im


def sum_block_real(v: np.ndarray) -> float:
    return _pair_tree(_padded(np.asarray(v, dtype=np.float64)))
