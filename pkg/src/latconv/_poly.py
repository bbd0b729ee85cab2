"""Multi-index polynomial arithmetic on coefficient dicts.

A polynomial is a dict mapping exponent tuples to complex coefficients.
Keys are plain int tuples of a fixed length d; values may be complex.
"""

from __future__ import annotations

import numpy as np


def poly_eval(coeffs, xi):
    """Evaluate at xi of shape (..., d); returns complex array of shape (...)."""
    xi = np.asarray(xi)
    scalar = xi.ndim == 1
    pts = xi[None, :] if scalar else xi
    out = np.zeros(pts.shape[:-1], dtype=np.complex128)
    for beta, c in coeffs.items():
        term = np.ones(pts.shape[:-1])
        for j, b in enumerate(beta):
            if b:
                term = term * pts[..., j] ** b
        out += c * term
    return out[0] if scalar else out


def poly_eval_real(coeffs, xi):
    """Evaluate the real part Re P (coefficientwise real part) at real xi."""
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim == 1
    pts = xi[None, :] if scalar else xi
    out = np.zeros(pts.shape[:-1])
    for beta, c in coeffs.items():
        cr = c.real if isinstance(c, complex) else float(np.real(c))
        if cr == 0.0:
            continue
        term = np.full(pts.shape[:-1], cr)
        for j, b in enumerate(beta):
            if b:
                term = term * pts[..., j] ** b
        out += term
    return out[0] if scalar else out


def poly_grad_real(coeffs, xi):
    """Gradient of Re P at real xi of shape (..., d); same leading shape + (d,)."""
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim == 1
    pts = xi[None, :] if scalar else xi
    d = pts.shape[-1]
    out = np.zeros(pts.shape[:-1] + (d,))
    for beta, c in coeffs.items():
        cr = float(np.real(c))
        if cr == 0.0:
            continue
        for j, bj in enumerate(beta):
            if not bj:
                continue
            term = np.full(pts.shape[:-1], cr * bj)
            for k, bk in enumerate(beta):
                p = bk - 1 if k == j else bk
                if p:
                    term = term * pts[..., k] ** p
            out[..., j] += term
    return out[0] if scalar else out


def poly_hess_real(coeffs, xi):
    """Hessian of Re P at real xi of shape (d,) -> (d, d) or (k, d) -> (k, d, d)."""
    xi = np.asarray(xi, dtype=float)
    scalar = xi.ndim == 1
    pts = xi[None, :] if scalar else xi
    d = pts.shape[-1]
    out = np.zeros(pts.shape[:-1] + (d, d))
    for beta, c in coeffs.items():
        cr = float(np.real(c))
        if cr == 0.0:
            continue
        for j, bj in enumerate(beta):
            if not bj:
                continue
            for k, bk in enumerate(beta):
                if k == j:
                    if bj < 2:
                        continue
                    factor = cr * bj * (bj - 1)
                else:
                    if not bk:
                        continue
                    factor = cr * bj * bk
                term = np.full(pts.shape[:-1], factor)
                for l, bl in enumerate(beta):
                    p = bl - (l == j) - (l == k)
                    if p:
                        term = term * pts[..., l] ** p
                out[..., j, k] += term
    return out[0] if scalar else out


def poly_mul(a, b, max_degree=None):
    out = {}
    for ba, ca in a.items():
        for bb, cb in b.items():
            key = tuple(x + y for x, y in zip(ba, bb))
            if max_degree is not None and sum(key) > max_degree:
                continue
            out[key] = out.get(key, 0.0) + ca * cb
    return out


def poly_add(a, b, scale=1.0):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0.0) + scale * v
    return out


def poly_prune(coeffs, tol=0.0):
    return {k: v for k, v in coeffs.items() if abs(v) > tol}


def poly_compose_linear(coeffs, mat):
    """Coefficients of xi -> P(M xi) for a d x d matrix M."""
    mat = np.asarray(mat, dtype=float)
    d = mat.shape[0]
    zero = tuple([0] * d)
    # linear forms L_i(xi) = sum_j M[i, j] xi_j as degree-1 polynomials
    forms = []
    for i in range(d):
        form = {}
        for j in range(d):
            if mat[i, j] != 0.0:
                key = tuple(1 if k == j else 0 for k in range(d))
                form[key] = mat[i, j]
        forms.append(form)
    out = {}
    for beta, c in coeffs.items():
        term = {zero: complex(c)}
        for i, b in enumerate(beta):
            for _ in range(b):
                term = poly_mul(term, forms[i])
        out = poly_add(out, term)
    return poly_prune(out, 0.0)


def log1p_series(u, order):
    """Truncated composition log(1 + u) for a series u with no constant term."""
    d = len(next(iter(u))) if u else 0
    out = {}
    power_u = dict(u)
    sign = 1.0
    for k in range(1, order + 1):
        if k > 1:
            power_u = poly_mul(power_u, u, max_degree=order)
            if not power_u:
                break
        out = poly_add(out, power_u, scale=sign / k)
        sign = -sign
    return poly_prune(out, 0.0) if d else out
