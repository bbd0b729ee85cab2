"""Hot accumulation kernels: numba-jitted with a pure-numpy fallback.

The direct convolution path scatter-adds |supp(f)| * |supp(g)| products into a
dense box; at n ~ 10^2..10^3 this loop dominates total runtime, so it is
compiled with numba when available.  Set ``LATCONV_PURE_NUMPY=1`` to force the
numpy fallback (used by the benchmark and as a safety hatch on platforms
without numba).
"""

import os

import numpy as np

PURE_NUMPY = os.environ.get("LATCONV_PURE_NUMPY", "").strip() not in ("", "0")

if not PURE_NUMPY:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        PURE_NUMPY = True


def _scatter_convolve_numpy(f_pts, f_vals, g_pts, g_vals, out_flat, strides, offset):
    # One vectorized scatter per point of the smaller operand; np.add.at
    # applies updates in element order, keeping the reduction deterministic.
    base = (f_pts - offset) @ strides
    for j in range(g_pts.shape[0]):
        idx = base + g_pts[j] @ strides
        np.add.at(out_flat, idx, f_vals * g_vals[j])


if PURE_NUMPY:
    scatter_convolve = _scatter_convolve_numpy
    USING_NUMBA = False
else:
    @njit(cache=True)
    def _scatter_convolve_numba(f_pts, f_vals, g_pts, g_vals, out_flat, strides, offset):
        d = f_pts.shape[1]
        for i in range(f_pts.shape[0]):
            base = 0
            for k in range(d):
                base += (f_pts[i, k] - offset[k]) * strides[k]
            fv = f_vals[i]
            for j in range(g_pts.shape[0]):
                idx = base
                for k in range(d):
                    idx += g_pts[j, k] * strides[k]
                out_flat[idx] += fv * g_vals[j]

    scatter_convolve = _scatter_convolve_numba
    USING_NUMBA = True
