"""Numerical evaluation of the attractor H_P^t and local-limit assembly.

H_P^t(x) = (2 pi)^-d integral e^{-t P(xi)} e^{-i x.xi} dxi is computed by
tensor trapezoid quadrature over a box on which t Re P >= T_CUT = 46 at the
boundary (integrand below ~1e-20 there), so truncation dominates nothing and
the trapezoid rule is effectively spectral.  A grid variant evaluates whole
lattice windows with one FFT of the sampled weight e^{-t P}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from . import _config
from .errors import ResourceLimitError
from .homogeneous import sphere_samples
from .lattice import LatticeFunction

_BOUNDARY_DIRS_SEED = 777


def _ray_reach(P, t, u, target):
    """Smallest r with t Re P(r u) >= target along the ray u (doubling + bisection)."""
    r = 1e-3
    for _ in range(120):
        if t * P.real(r * u) >= target:
            break
        r *= 2.0
    else:
        raise ValueError("Re P does not grow along a ray; invalid polynomial")
    lo, hi = r / 2.0, r
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if t * P.real(mid * u) >= target:
            hi = mid
        else:
            lo = mid
    return hi


def box_halfwidths(P, t):
    """Per-axis half-widths L with t Re P >= T_CUT on the box boundary."""
    d = P.dim
    dirs = sphere_samples(d, 256 * d, seed=_BOUNDARY_DIRS_SEED)
    axes = np.concatenate([np.eye(d), -np.eye(d)])
    dirs = np.concatenate([dirs, axes])
    L = np.zeros(d)
    for u in dirs:
        r = _ray_reach(P, t, u, _config.T_CUT)
        L = np.maximum(L, 1.25 * r * np.abs(u))
    # verify on sampled faces, expanding if undershooting
    for _ in range(8):
        if _boundary_min(P, t, L) >= _config.T_CUT:
            return L
        L = L * 1.35
    raise ValueError("could not certify the quadrature box; invalid polynomial")


def _boundary_min(P, t, L, n_face=33):
    d = P.dim
    worst = np.inf
    grids = [np.linspace(-L[j], L[j], n_face) for j in range(d)]
    for j in range(d):
        rest = [grids[k] for k in range(d) if k != j]
        mesh = np.meshgrid(*rest, indexing="ij") if rest else []
        face = np.empty((mesh[0].size if rest else 1, d))
        for sgn in (-1.0, 1.0):
            col = 0
            for k in range(d):
                if k == j:
                    face[:, k] = sgn * L[j]
                else:
                    face[:, k] = mesh[col].reshape(-1)
                    col += 1
            worst = min(worst, float(t * P.real(face).min()))
    return worst


def _axis_nodes(L, N):
    return np.linspace(-L, L, N)


def _weight_grid(P, t, nodes):
    """e^{-t P} on the tensor grid of per-axis nodes (chunked along axis 0)."""
    d = P.dim
    shape = tuple(len(g) for g in nodes)
    out = np.empty(shape, dtype=np.complex128)
    chunk = max(1, int(2 ** 22 // max(1, np.prod(shape[1:], dtype=np.int64))))
    for start in range(0, shape[0], chunk):
        stop = min(shape[0], start + chunk)
        mesh = np.meshgrid(nodes[0][start:stop], *nodes[1:], indexing="ij")
        pts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
        out[start:stop] = np.exp(-t * P(pts)).reshape((stop - start,) + shape[1:])
    return out


def attractor_eval(P, t, x):
    """H_P^t at one or more real points x (shape (d,) or (k, d)).

    Tensor trapezoid with >= 8 quadrature points per oscillation of
    e^{-i x.xi} at the largest requested |x_j|, at least 256 per axis.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1
    xs = x[None, :] if scalar else x
    L = box_halfwidths(P, t)
    xmax = np.abs(xs).max(axis=0)
    N = [max(256, int(np.ceil(8.0 * L[j] * xmax[j] / np.pi)) + 1)
         for j in range(P.dim)]
    nodes = [_axis_nodes(L[j], N[j]) for j in range(P.dim)]
    W = _weight_grid(P, t, nodes)
    # trapezoid end weights (integrand ~ 1e-20 there; kept for form)
    for j in range(P.dim):
        sl = [slice(None)] * P.dim
        for end in (0, -1):
            sl[j] = end
            W[tuple(sl)] *= 0.5
    h = np.array([nodes[j][1] - nodes[j][0] for j in range(P.dim)])
    vol = float(np.prod(h)) / (2.0 * np.pi) ** P.dim
    out = np.empty(xs.shape[0], dtype=np.complex128)
    acc = W
    for k in range(xs.shape[0]):
        phase = np.exp(-1j * xs[k, 0] * nodes[0])
        red = np.tensordot(phase, acc, axes=(0, 0))
        for j in range(1, P.dim):
            red = np.tensordot(np.exp(-1j * xs[k, j] * nodes[j]), red, axes=(0, 0))
        out[k] = red * vol
    return complex(out[0]) if scalar else out


@dataclass
class AttractorGrid:
    """H_P^t(x + shift) over an integer window, evaluated by one FFT."""

    P: object
    t: float
    lo: np.ndarray            # window lower corner (integers)
    values: np.ndarray        # dense complex array over the window
    shift: np.ndarray         # real offset applied to every lattice point
    box_halfwidths: np.ndarray
    grid_sizes: tuple

    def value_at(self, x):
        idx = tuple(int(c) - int(l) for c, l in zip(x, self.lo))
        return complex(self.values[idx])


def attractor_grid(P, t, window, shift=None, oversample=2):
    """Evaluate H_P^t(x + shift) for all integer x in the window.

    ``window`` is a sequence of per-axis (lo, hi) inclusive integer bounds.
    The quadrature box is rounded up to [-pi K_j, pi K_j] so the lattice sum
    collapses to an FFT; the per-axis size keeps alias images of the Schwartz
    tail at least one window width away.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    d = P.dim
    lo = np.array([int(a) for a, _ in window], dtype=np.int64)
    hi = np.array([int(b) for _, b in window], dtype=np.int64)
    if np.any(hi < lo):
        raise ValueError("empty window")
    shift = np.zeros(d) if shift is None else np.asarray(shift, dtype=float)
    L = box_halfwidths(P, t)
    K = np.maximum(1, np.ceil(L / np.pi).astype(int))
    reach = np.maximum(np.abs(lo + np.floor(shift)), np.abs(hi + np.ceil(shift)))
    N = [int(sfft.next_fast_len(int(max(256, oversample * K[j] * (reach[j] + 16)))))
         for j in range(d)]
    cells = int(np.prod(N, dtype=np.int64))
    if cells * 16 * 2 > _config.MEMORY_CAP_BYTES:
        raise ResourceLimitError(f"attractor grid {tuple(N)} exceeds the memory cap")
    nodes = [(-np.pi * K[j] + 2.0 * np.pi * K[j] * np.arange(N[j]) / N[j])
             for j in range(d)]
    W = _weight_grid(P, t, nodes)
    for j in range(d):
        # fold the real shift into the weight
        ph = np.exp(-1j * shift[j] * nodes[j])
        sl = [None] * d
        sl[j] = slice(None)
        W = W * ph[tuple(sl)]
    spec = sfft.fftn(W, workers=_config.FFT_WORKERS)
    hstep = np.array([2.0 * np.pi * K[j] / N[j] for j in range(d)])
    vol = float(np.prod(hstep)) / (2.0 * np.pi) ** d
    idx = []
    phase = []
    for j in range(d):
        xj = np.arange(lo[j], hi[j] + 1)
        idx.append(np.mod(xj * K[j], N[j]))
        # e^{-i x (-pi K)} factor from the grid origin
        phase.append(np.exp(1j * np.pi * K[j] * (xj + shift[j])))
    vals = spec[np.ix_(*idx)].astype(np.complex128)
    for j in range(d):
        sl = [None] * d
        sl[j] = slice(None)
        vals = vals * phase[j][tuple(sl)]
    vals *= vol
    return AttractorGrid(P=P, t=float(t), lo=lo, values=vals, shift=shift,
                         box_halfwidths=L, grid_sizes=tuple(N))


def llt_approx(analysis, n, window):
    """Local-limit approximation over an integer window.

    Sums e^{-i x.xi_q} phi-hat(xi_q)^n H_{P_q}^n(x - n alpha_q) over the
    mu-minimal points of the analysis; unit-modulus powers are taken as
    e^{i n omega_q} for stability.
    """
    if analysis.mu_phi is None:
        raise ValueError(f"analysis verdict is {analysis.verdict}; no local limit")
    d = analysis.function.dim
    lo = np.array([int(a) for a, _ in window], dtype=np.int64)
    hi = np.array([int(b) for _, b in window], dtype=np.int64)
    shape = tuple(int(h - l + 1) for l, h in zip(lo, hi))
    total = np.zeros(shape, dtype=np.complex128)
    axes = [np.arange(lo[j], hi[j] + 1) for j in range(d)]
    for pa in analysis.minimal_points():
        cls = pa.classification
        grid = attractor_grid(cls.poly, n, list(zip(lo, hi)),
                              shift=-n * cls.alpha)
        pref = np.exp(1j * n * pa.phase)
        vals = grid.values * pref
        for j in range(d):
            ph = np.exp(-1j * axes[j] * pa.xi[j])
            sl = [None] * d
            sl[j] = slice(None)
            vals = vals * ph[tuple(sl)]
        total += vals
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    return LatticeFunction(d, pts, total.reshape(-1))
