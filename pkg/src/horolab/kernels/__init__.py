"""Numeric kernel dispatch.

Two interchangeable backends implement the hot loops:

* ``horolab.kernels._fast`` — Cython + libc.math, nogil hot loops;
* ``horolab.kernels._pure`` — NumPy fallback, identical operation order.

The compiled backend is preferred when importable.  Set the environment
variable ``HOROLAB_KERNELS`` to ``pure`` or ``ext`` to force a choice (the
benchmark and the cross-backend tests do this).

Pure-arithmetic kernels (fundamental-domain reduction, double-double quad
phases, horocycle images, pairwise tree sums of given values) agree between
backends bit-for-bit; kernels that call transcendental functions (power
phases, cos/sin) agree to libm-vs-NumPy ulp differences only.

All stream sums follow one deterministic schedule: fixed 2**14-term blocks
cut by global index, a zero-padded balanced pairwise tree inside each block,
and a Neumaier-compensated combine of block results in index order.  Thread
counts change wall time, never bits.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .. import errors
from . import _pure

BLOCK = _pure.BLOCK

_FORCED = os.environ.get("HOROLAB_KERNELS", "").strip().lower()

_backend = None
if _FORCED in ("", "ext"):
    try:
        from . import _fast as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = None
        if _FORCED == "ext":
            raise ImportError(
                "HOROLAB_KERNELS=ext but the compiled backend is not built"
            )
if _backend is None:
    _backend = _pure


def backend() -> str:
    """Name of the active backend: 'ext' or 'pure'."""
    return _backend.backend_name()


def get_module(name: str | None = None):
    """Return a backend module by name ('pure' / 'ext' / None for active)."""
    if name is None:
        return _backend
    if name == "pure":
        return _pure
    if name == "ext":
        from . import _fast

        return _fast
    raise ValueError(f"unknown kernel backend {name!r}")


# ---------------------------------------------------------------------------
# bulk fundamental-domain reduction
# ---------------------------------------------------------------------------

def reduce_points(x, y, max_iter: int = 512, module=None):
    """Reduce arrays of upper-half-plane points; raises ReductionStall."""
    mod = module or _backend
    xr, yr, used = mod.reduce_points(x, y, max_iter)
    if used >= max_iter:
        raise errors.ReductionStall(
            f"reduction did not converge within {max_iter} inversions"
        )
    return xr, yr


# ---------------------------------------------------------------------------
# deterministic stream sums
# ---------------------------------------------------------------------------

def _blocks(n0: int, n1: int):
    b = n0
    while b < n1:
        e = min(b + BLOCK, n1)
        yield b, e
        b = e


def _neumaier(parts):
    s = 0.0
    comp = 0.0
    for v in parts:
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
    return s + comp


def osc_sum(phase_fn, n0: int, n1: int, threads: int = 1, module=None) -> complex:
    """Sum of e^{2 pi i phase_fn(n)} over n in [n0, n1).

    ``phase_fn(b0, b1)`` must return the phases for one index block; it is
    called once per block, possibly from worker threads.  The combination
    order is fixed by the block index, so the result is independent of
    ``threads``.
    """
    mod = module or _backend
    spans = list(_blocks(n0, n1))

    def one(span):
        phi = phase_fn(span[0], span[1])
        return mod.sum_block_cis(phi)

    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, spans))
    else:
        parts = [one(s) for s in spans]
    re = _neumaier([p[0] for p in parts])
    im = _neumaier([p[1] for p in parts])
    return complex(re, im)


def tree_sum(values, threads: int = 1, module=None) -> float:
    """Deterministic sum of a float array under the block/tree/Neumaier schedule."""
    mod = module or _backend
    v = np.ascontiguousarray(values, dtype=np.float64)
    spans = list(_blocks(0, v.size))
    if not spans:
        return 0.0

    def one(span):
        return mod.sum_block_real(v[span[0]:span[1]])

    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(one, spans))
    else:
        parts = [one(s) for s in spans]
    return _neumaier(parts)


# ---------------------------------------------------------------------------
# re-exported bulk helpers (backend-dispatched)
# ---------------------------------------------------------------------------

def phases_power(mult, expo, n0, n1, module=None):
    return (module or _backend).phases_power(mult, expo, n0, n1)


def phases_quad(bhi, blo, n0, n1, module=None):
    return (module or _backend).phases_quad(bhi, blo, n0, n1)


def times_quad(alpha, n0, n1, module=None):
    return (module or _backend).times_quad(alpha, n0, n1)


def horo_images(x, h, t, module=None):
    return (module or _backend).horo_images(x, h, t)
