import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

import latconv
from latconv import examples
from latconv.homogeneous import (HomogeneousPolynomial, contraction_check,
                                 from_quadratic_form, is_exponent,
                                 matrix_power_t, p_fitted,
                                 trace_invariance_check)


@pytest.fixture(scope="module")
def abs2_poly():
    # P = |xi|^2 on R^2
    return HomogeneousPolynomial(2, {(2, 0): 1.0, (0, 2): 1.0}, np.eye(2), (1, 1))


def test_group_action_identity(abs2_poly):
    xi = np.array([0.3, -1.2])
    assert_allclose(abs2_poly.group_action(1.0, xi), xi, atol=1e-15)


def test_group_action_componentwise():
    P = HomogeneousPolynomial(2, {(4, 0): 1.0, (0, 2): 1.0}, np.eye(2), (2, 1))
    assert_allclose(P.E, np.diag([0.25, 0.5]))
    assert_allclose(P.group_action(16.0, np.array([1.0, 1.0])), [2.0, 4.0],
                    atol=1e-12)


def test_group_law(abs2_poly, rng):
    for _ in range(10):
        s, t = rng.uniform(0.1, 5.0, size=2)
        xi = rng.standard_normal(2)
        lhs = abs2_poly.group_action(s * t, xi)
        rhs = abs2_poly.group_action(s, abs2_poly.group_action(t, xi))
        assert_allclose(lhs, rhs, atol=1e-12)


def test_is_exponent_abs2(abs2_poly):
    ok, dev = is_exponent(abs2_poly, np.eye(2) / 2)
    assert ok
    # antisymmetric perturbations stay inside Exp(|.|^2)
    skew = np.array([[0.0, 0.3], [-0.3, 0.0]])
    ok, _ = is_exponent(abs2_poly, np.eye(2) / 2 + skew)
    assert ok
    ok, dev = is_exponent(abs2_poly, np.diag([0.5, 0.25]))
    assert not ok
    assert dev > 1e-3


def test_trace_invariance(abs2_poly, ex73_analysis):
    skew = np.array([[0.0, 0.3], [-0.3, 0.0]])
    assert trace_invariance_check(abs2_poly, np.eye(2) / 2,
                                  np.eye(2) / 2 + skew)
    P = ex73_analysis.points[0].classification.poly
    E = P.E
    A = P.basis
    diag = A.T @ E @ A
    assert trace_invariance_check(P, E, E)
    assert abs(np.trace(E) - 0.75) < 1e-10
    assert abs(np.trace(diag) - 0.75) < 1e-10
    with pytest.raises(ValueError):
        trace_invariance_check(abs2_poly, np.eye(2) / 2, np.diag([0.5, 0.25]))


def test_contraction(ex73_analysis):
    assert contraction_check(np.diag([0.25, 0.5]))
    assert contraction_check(ex73_analysis.points[0].classification.poly.E)
    assert not contraction_check(np.zeros((2, 2)))


def test_semi_elliptic_form_ex73(ex73_analysis):
    P = ex73_analysis.points[0].classification.poly
    A, m, semi = P.semi_elliptic_form()
    # one quadratic axis at 1/4 and one quartic axis; coefficient per weight
    by_weight = {}
    for j, mj in enumerate(m):
        beta = tuple(2 * mj if k == j else 0 for k in range(2))
        by_weight[mj] = semi[beta]
    assert by_weight[1] == pytest.approx(0.25, abs=1e-8)
    # realized quartic coefficient (the printed 23/96 is inconsistent with
    # the function's own Taylor expansion; see test_expansion)
    assert by_weight[2] == pytest.approx(0.25, abs=1e-8)
    # round trip: composing the normal form back with A^{-1} restores P
    from latconv._poly import poly_compose_linear
    back = poly_compose_linear(semi, np.linalg.inv(A))
    for k in set(back) | set(P.coeffs):
        assert abs(back.get(k, 0.0) - P.coeffs.get(k, 0.0)) < 1e-10


def test_semi_elliptic_form_ex71(ex71_analysis):
    P = ex71_analysis.points[0].classification.poly
    A, m, semi = P.semi_elliptic_form()
    assert_allclose(A, np.eye(2), atol=1e-12)
    assert m == (3, 2)
    assert semi[(6, 0)] == pytest.approx(1 / 64, abs=1e-10)
    assert semi[(0, 4)] == pytest.approx(2 / 64, abs=1e-10)
    assert semi[(3, 2)] == pytest.approx(-2j / 64, abs=1e-10)


def test_semi_elliptic_form_quadratic():
    C = np.array([[2.0, 0.5], [0.5, 1.0]])
    P = from_quadratic_form(C)
    A, m, semi = P.semi_elliptic_form()
    assert m == (1, 1)
    evals = np.linalg.eigvalsh(C)
    got = sorted(semi[k].real for k in semi)
    assert_allclose(got, np.sort(evals) / 2, atol=1e-12)
    xi = np.array([0.7, -0.4])
    assert P(xi) == pytest.approx(xi @ C @ xi / 2, abs=1e-12)


def test_p_fitted():
    # standard basis is fitted for semi-elliptic (diagonal) polynomials
    f75 = examples.get("ex75:3,2")
    ana = latconv.analyze(f75)
    P = ana.points[0].classification.poly
    ok, weights = p_fitted(P, [np.array([1, 0]), np.array([0, 1])])
    assert ok and weights == (3, 2)
    ok, _ = p_fitted(P, [np.array([0, 0]), np.array([0, 0])])
    assert ok


def test_p_fitted_rejects_rotated(ex73_analysis):
    P = ex73_analysis.points[0].classification.poly
    ok, _ = p_fitted(P, [np.array([1, 0]), np.array([0, 1])])
    assert not ok
    # vectors along the rotated axes are fitted
    v1 = np.array([1, -1])
    v2 = np.array([1, 1])
    cols = [P.basis.T @ v1, P.basis.T @ v2]
    vecs = [v1, v2] if abs(cols[0][1]) < 1e-9 else [v2, v1]
    ok, _ = p_fitted(P, vecs)
    assert ok


def test_axis_positivity_and_even_orders(intro_analysis, ex71_analysis,
                                         ex73_analysis, srw2_analysis):
    for ana in (intro_analysis, ex71_analysis, ex73_analysis, srw2_analysis):
        for pa in ana.points:
            P = pa.classification.poly
            _, m, semi = P.semi_elliptic_form()
            for j, mj in enumerate(m):
                beta = tuple(2 * mj if k == j else 0 for k in range(P.dim))
                assert semi[beta].real > 0.0


def test_operator_norm_bound(ex73_analysis, rng):
    # ||t^E|| <= C t^{lambda_max} for t >= 1 with a fitted constant
    E = ex73_analysis.points[0].classification.poly.E
    lam_max = float(np.linalg.eigvalsh(E).max())
    ts = np.geomspace(1.0, 1e4, 40)
    ratios = [np.linalg.norm(matrix_power_t(E, t), 2) / t ** lam_max
              for t in ts]
    C = max(ratios)
    assert np.isfinite(C)
    ts2 = np.geomspace(1e4, 1e6, 10)
    for t in ts2:
        assert np.linalg.norm(matrix_power_t(E, t), 2) <= (C + 1e-9) * t ** lam_max


def test_sphere_to_space_coverage(intro_analysis, rng):
    # every nonzero xi is t^E eta for a sphere point eta: solve for t by
    # bisection on |t^{-E} xi| = 1
    P = intro_analysis.points[0].classification.poly
    for _ in range(100):
        xi = rng.standard_normal(2) * float(rng.uniform(0.1, 50.0))
        lo, hi = 1e-12, 1e12
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            r = np.linalg.norm(np.linalg.inv(
                matrix_power_t(P.E, mid)) @ xi)
            if r > 1.0:
                lo = mid
            else:
                hi = mid
        t = math.sqrt(lo * hi)
        eta = np.linalg.inv(matrix_power_t(P.E, t)) @ xi
        assert abs(np.linalg.norm(eta) - 1.0) < 1e-6
        assert_allclose(P.group_action(t, eta), xi, rtol=1e-6, atol=1e-9)


def test_mu_exact_rational(ex71_analysis):
    P = ex71_analysis.points[0].classification.poly
    assert P.mu == Fraction(1, 6) + Fraction(1, 4)
    assert isinstance(P.mu, Fraction)


def test_invalid_construction():
    with pytest.raises(ValueError):
        # |beta:2m| != 1
        HomogeneousPolynomial(1, {(3,): 1.0}, np.eye(1), (2,))
    with pytest.raises(ValueError):
        # not positive
        HomogeneousPolynomial(1, {(2,): -1.0}, np.eye(1), (1,))
