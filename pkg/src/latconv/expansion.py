"""Taylor expansion of the log-symbol and classification of unit-modulus points.

For xi0 with |phi-hat(xi0)| = 1 the function Gamma(xi) = log(phi-hat(xi + xi0)
/ phi-hat(xi0)) is expanded about 0 by composing the exact Taylor coefficients
of the shifted, renormalized symbol with the log(1+u) series.  Classification
then asks whether Gamma = i a.xi - P(xi) + o(Re P) for a polynomial P whose
real part is positive definite and which scales as t P(xi) = P(t^E xi): the
quadratic part of Re(-Gamma) fixes the weight-one directions, remaining axes
are searched over even orders, sub-homogeneous coefficients must vanish, and
the kept part must have positive real part.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._poly import poly_compose_linear, poly_prune
from .errors import NotNormalizedError
from .homogeneous import (HomogeneousPolynomial, _canonical_signs,
                          sphere_samples)
from .lattice import LatticeFunction
from .symbol import SymbolView, find_omega, normalize

from . import _poly

VERDICT_PHT = "positive-homogeneous-type"
VERDICT_NOT = "not-positive-homogeneous-type"
VERDICT_INDETERMINATE = "indeterminate"

DRIFT_REAL_TOL = 1e-8
SUBHOMOGENEOUS_TOL = 1e-8
NULL_EIGENVALUE_TOL = 1e-9


@dataclass
class TaylorSeries:
    """Taylor coefficients of Gamma about 0, orders 1..m (no constant term)."""

    dim: int
    order: int
    coeffs: dict

    def linear(self):
        out = np.zeros(self.dim, dtype=np.complex128)
        for j in range(self.dim):
            key = tuple(1 if k == j else 0 for k in range(self.dim))
            out[j] = self.coeffs.get(key, 0.0)
        return out


@dataclass
class Classification:
    verdict: str
    alpha: np.ndarray | None = None
    poly: HomogeneousPolynomial | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.verdict == VERDICT_PHT

    @property
    def E(self):
        return None if self.poly is None else self.poly.E

    @property
    def mu(self):
        return None if self.poly is None else self.poly.mu


def gamma_taylor(sym, xi0, m):
    """Taylor series of Gamma_{xi0} = log(phi-hat(.+xi0)/phi-hat(xi0)) to order m.

    Coefficients of f(xi) = phi-hat(xi + xi0)/phi-hat(xi0) come from the exact
    moment formula; the log is a formal composition with log(1+u) truncated at
    total order m.
    """
    if m < 2:
        raise ValueError("expansion order must be >= 2")
    f = sym.source
    d = f.dim
    xi0 = np.asarray(xi0, dtype=float)
    v0 = sym.evaluate(xi0)
    if abs(abs(v0) - 1.0) > 1e-9:
        raise NotNormalizedError(f"|phi-hat(xi0)| = {abs(v0):.12g}, not unit modulus")
    psi = f.values * np.exp(1j * (f.points.astype(float) @ xi0)) / v0
    ipts = 1j * f.points.astype(float)
    u = {}
    for beta in itertools.product(*(range(m + 1),) * d):
        total = sum(beta)
        if total == 0 or total > m:
            continue
        term = psi.copy()
        fact = 1.0
        for j, b in enumerate(beta):
            if b:
                term = term * ipts[:, j] ** b
                fact *= math.factorial(b)
        u[beta] = complex(term.sum()) / fact
    series = _poly.log1p_series(u, m)
    return TaylorSeries(dim=d, order=m, coeffs=poly_prune(series, 0.0))


def _quadratic_hessian(q_coeffs, dim):
    """Symmetric H with Re(quadratic part of Q)(xi) = xi . H xi."""
    H = np.zeros((dim, dim))
    for beta, c in q_coeffs.items():
        if sum(beta) != 2:
            continue
        nz = [j for j, b in enumerate(beta) if b]
        if len(nz) == 1:
            H[nz[0], nz[0]] = c.real
        else:
            j, k = nz
            H[j, k] = H[k, j] = c.real / 2.0
    return H


def _weight_assignments(null_axes, quad_axes, m_max, reverse=False):
    """All weight tuples: 1 on quadratic axes, even orders on null axes."""
    orders = list(range(4, m_max + 1, 2))
    if reverse:
        orders = orders[::-1]
    d = len(null_axes) + len(quad_axes)
    for combo in itertools.product(orders, repeat=len(null_axes)):
        weights = [0] * d
        for j in quad_axes:
            weights[j] = 1
        for j, two_m in zip(null_axes, combo):
            weights[j] = two_m // 2
        yield tuple(weights)


def _split_by_weight(coeffs, weights):
    """(survivors below homogeneity, kept part at |beta:2m| = 1)."""
    kept, survivors = {}, {}
    for beta, c in coeffs.items():
        h = sum(Fraction(b, 2 * m) for b, m in zip(beta, weights))
        if h == 1:
            kept[beta] = c
        elif h < 1:
            survivors[beta] = c
    return survivors, kept


def classify(sym, xi0, m_max=12, basis=None, reverse_search=False):
    """Classify xi0 in Omega(phi) as positive-homogeneous type or not.

    ``basis`` optionally overrides the orthogonal change of coordinates from
    the Hessian eigendecomposition (escape hatch for polynomials needing a
    non-orthogonal normal form, which the automatic search cannot find).
    ``reverse_search`` flips the null-axis order search direction; the result
    must not depend on it (uniqueness of the leading polynomial).
    """
    d = sym.dim
    series = gamma_taylor(sym, xi0, m_max)
    lin = series.linear()
    diagnostics = {"order": m_max}
    if np.max(np.abs(lin.real)) > DRIFT_REAL_TOL:
        diagnostics["reason"] = "linear term has a real component"
        return Classification(VERDICT_NOT, diagnostics=diagnostics)
    alpha = lin.imag.copy()

    # Q = -(Gamma - i alpha . xi): orders 2..m_max
    q = {beta: -c for beta, c in series.coeffs.items() if sum(beta) >= 2}
    q = poly_prune(q, 0.0)
    if not q or max(abs(c) for c in q.values()) <= SUBHOMOGENEOUS_TOL:
        reason = ("pure translation (log-symbol is linear)"
                  if len(sym.source) == 1 else
                  f"no nonlinear content through order {m_max}")
        verdict = VERDICT_NOT if len(sym.source) == 1 else VERDICT_INDETERMINATE
        diagnostics["reason"] = reason
        return Classification(verdict, alpha=alpha, diagnostics=diagnostics)

    H = _quadratic_hessian(q, d)
    if basis is not None:
        A = np.asarray(basis, dtype=float).reshape(d, d)
        evals = np.diag(A.T @ H @ A)
    else:
        # off-diagonal mass below the sub-homogeneity tolerance is
        # indistinguishable from zero: keep the natural axis order then
        off = np.abs(H - np.diag(np.diag(H))).max() if d > 1 else 0.0
        if off <= 1e-9 * max(1.0, np.abs(H).max()):
            A = np.eye(d)
            evals = np.diag(H).copy()
        else:
            evals, A = np.linalg.eigh(H)
            A = _canonical_signs(A)
            evals = np.diag(A.T @ H @ A)
    if evals.min() < -1e-6:
        diagnostics["reason"] = "quadratic real part is indefinite"
        return Classification(VERDICT_NOT, alpha=alpha, diagnostics=diagnostics)

    quad_axes = [j for j in range(d) if evals[j] > NULL_EIGENVALUE_TOL]
    null_axes = [j for j in range(d) if evals[j] <= NULL_EIGENVALUE_TOL]
    q_rot = poly_prune(poly_compose_linear(q, A), 0.0)

    samples = sphere_samples(d, 1000 * d)
    saw_vanishing_null_axis = False
    for weights in _weight_assignments(null_axes, quad_axes, m_max,
                                       reverse=reverse_search):
        survivors, kept = _split_by_weight(q_rot, weights)
        if survivors and max(abs(c) for c in survivors.values()) > SUBHOMOGENEOUS_TOL:
            continue
        # sign certification on each axis: the pure monomial xi_j^{2 m_j}
        # must be present with positive real part
        axis_ok = True
        for j, m in enumerate(weights):
            beta = tuple(2 * m if k == j else 0 for k in range(d))
            c = kept.get(beta, 0.0)
            if abs(c) <= SUBHOMOGENEOUS_TOL:
                saw_vanishing_null_axis = True
                axis_ok = False
                break
            if c.real <= 0.0:
                axis_ok = False
                break
        if not axis_ok:
            continue
        if _poly.poly_eval_real(kept, samples).min() <= 0.0:
            continue
        kept = poly_prune(kept, 1e-13 * max(abs(c) for c in kept.values()))
        poly = HomogeneousPolynomial(d, kept, A, weights)
        res_norms = _residual_norms(q_rot, kept, weights, A, samples)
        diagnostics["residual_norms"] = res_norms
        diagnostics["weights"] = weights
        return Classification(VERDICT_PHT, alpha=alpha, poly=poly,
                              diagnostics=diagnostics)

    if saw_vanishing_null_axis and not _any_survivor_everywhere(
            q_rot, null_axes, quad_axes, m_max, d):
        diagnostics["reason"] = (
            f"order {m_max} insufficient: some null axis carries no "
            "sub-homogeneous obstruction but no positive pure term either")
        return Classification(VERDICT_INDETERMINATE, alpha=alpha,
                              diagnostics=diagnostics)
    diagnostics["reason"] = ("every admissible weight assignment leaves a "
                             "surviving sub-homogeneous term or a "
                             "non-positive kept part")
    return Classification(VERDICT_NOT, alpha=alpha, diagnostics=diagnostics)


def _any_survivor_everywhere(q_rot, null_axes, quad_axes, m_max, d):
    """True when every assignment is blocked by a surviving lower-order term."""
    for weights in _weight_assignments(null_axes, quad_axes, m_max):
        survivors, _ = _split_by_weight(q_rot, weights)
        if not survivors or max(abs(c) for c in survivors.values()) <= SUBHOMOGENEOUS_TOL:
            return False
    return True


def _residual_norms(q_rot, kept, weights, A, samples):
    """Numerical surrogate for Upsilon = o(Re P): max |t Q(t^-E xi) - P(xi)|."""
    diag = np.array([1.0 / (2 * m) for m in weights])
    out = {}
    for t in (10.0, 100.0, 1000.0):
        scaled = samples * t ** (-diag)
        q_vals = _poly.poly_eval(q_rot, scaled) * t
        p_vals = _poly.poly_eval(kept, samples)
        out[t] = float(np.max(np.abs(q_vals - p_vals)))
    return out


@dataclass
class PointAnalysis:
    xi: np.ndarray
    value: complex
    phase: float
    classification: Classification


@dataclass
class SpectralAnalysis:
    """Full spectral classification of a lattice function."""

    function: LatticeFunction          # normalized copy
    scale: float
    omega: object                      # OmegaSet
    points: list
    mu_phi: Fraction | None
    minimal: list                      # indices attaining mu_phi

    @property
    def ok(self):
        return (len(self.points) > 0
                and all(p.classification.ok for p in self.points))

    @property
    def verdict(self):
        if not self.points:
            return VERDICT_NOT
        verdicts = {p.classification.verdict for p in self.points}
        if verdicts == {VERDICT_PHT}:
            return VERDICT_PHT
        if VERDICT_INDETERMINATE in verdicts:
            return VERDICT_INDETERMINATE
        return VERDICT_NOT

    def minimal_points(self):
        return [self.points[i] for i in self.minimal]


def analyze(f, m_max=12, grid_n=None, basis=None):
    """Normalize, locate Omega, classify every point, take the rational minimum.

    A single-point support (c delta_y) has |phi-hat| constant equal to one, so
    Omega is the whole torus; the analysis reports the canonical representative
    0 with the pure-translation diagnostic instead of enumerating a continuum.
    """
    g, scale = normalize(f, grid_n=grid_n)
    sym = SymbolView(g)
    if len(g) == 1:
        from .symbol import OmegaSet
        xi = np.zeros(g.dim)
        val = sym.evaluate(xi)
        cls = Classification(VERDICT_NOT,
                             alpha=g.points[0].astype(float),
                             diagnostics={"reason": "pure translation "
                                                    "(log-symbol is linear)"})
        pa = PointAnalysis(xi=xi, value=complex(val),
                           phase=float(np.angle(val)), classification=cls)
        omega = OmegaSet(points=xi[None, :], values=np.array([val]),
                         phases=np.array([float(np.angle(val))]))
        return SpectralAnalysis(function=g, scale=scale, omega=omega,
                                points=[pa], mu_phi=None, minimal=[])
    omega = find_omega(sym, grid_n=grid_n)
    points = []
    for xi, val, ph in zip(omega.points, omega.values, omega.phases):
        cls = classify(sym, xi, m_max=m_max, basis=basis)
        points.append(PointAnalysis(xi=xi, value=complex(val), phase=float(ph),
                                    classification=cls))
    mu_phi = None
    minimal = []
    if points and all(p.classification.ok for p in points):
        mus = [p.classification.mu for p in points]
        mu_phi = min(mus)
        minimal = [i for i, m in enumerate(mus) if m == mu_phi]
    return SpectralAnalysis(function=g, scale=scale, omega=omega, points=points,
                            mu_phi=mu_phi, minimal=minimal)
