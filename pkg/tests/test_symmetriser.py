import logging

import numpy as np
import pytest
from scipy.linalg import eigvals

from weakhyp.symbol import SymbolMatrix
from weakhyp.symmetriser import (build_symmetriser, char_poly_path, check_function, companion_matrix, faddeev,
                                 gr_bounds, hamilton_cayley, minor_rank, symmetriser_residual)
from weakhyp.timepoly import PolyMatrix, TimePoly

T_SAMPLES = np.linspace(0.0, 1.0, 11)


def test_faddeev_matches_numpy_char_poly():
    rng = np.random.default_rng(3)
    M = rng.standard_normal((3, 3))
    c, adj = faddeev(PolyMatrix.constant(M))
    assert np.allclose([p(0.0) for p in c], np.poly(M)[::-1])
    tau = 0.7
    adjugate = sum(adj[h](0.0) * tau ** (2 - h) for h in range(3))
    det = np.linalg.det(tau * np.eye(3) - M)
    assert np.allclose(adjugate, det * np.linalg.inv(tau * np.eye(3) - M))


def test_char_poly_vanishes_on_eigenvalues():
    rng = np.random.default_rng(4)
    # symmetric components keep the spectrum real
    comps = []
    for _ in range(2):
        c = rng.standard_normal((3, 3, 3))
        comps.append(PolyMatrix(c + c.transpose(0, 2, 1)))
    A = SymbolMatrix(comps)
    xi = np.array([1.5, -0.5])
    cp = char_poly_path(A, xi)
    for t in (0.2, 0.9):
        for lam in np.linalg.eigvals(A.normalized(xi)(t)):
            assert abs(cp(t, lam)) < 1e-8


def test_jt_symmetriser(jt):
    xi = 3.0
    s = xi ** 2 / (1 + xi ** 2)
    sp = build_symmetriser(char_poly_path(jt, [xi]))
    assert np.allclose(sp.Q(0.5), np.diag([2 * s * 0.25, 2.0]))
    assert sp.minors[0].allclose(TimePoly([2.0]))
    assert sp.delta.allclose(TimePoly([0, 0, 4 * s]))
    assert sp.psi.degree == -1
    assert not sp.delta_vanishes


def test_symmetriser_symmetrises_companion_matrix():
    A = SymbolMatrix.from_roots([[0, 1], [0.5, -1], [0, 0, 2]])
    cp = char_poly_path(A, [2.0])
    sp = build_symmetriser(cp)
    assert symmetriser_residual(sp, cp, T_SAMPLES) < 1e-10
    for t in T_SAMPLES:
        C = companion_matrix(cp)(t)
        assert np.allclose(np.linalg.eigvals(C).imag, 0.0, atol=1e-6)
        assert np.min(np.linalg.eigvalsh(np.real(sp.Q(t)))) > -1e-10


def test_check_function_for_two_distinct_roots():
    # roots t and 2t: psi = -9 a^2 with a = xi / <xi>
    A = SymbolMatrix.from_roots([[0, 1], [0, 2]])
    sp = build_symmetriser(char_poly_path(A, [1.0]))
    assert sp.psi.allclose(TimePoly([-4.5]))
    assert check_function(sp).allclose(TimePoly([-4.5]))


def test_check_function_undefined_for_scalar_equation(caplog):
    A = SymbolMatrix([PolyMatrix.constant(np.array([[1.0]]))])
    sp = build_symmetriser(char_poly_path(A, [1.0]))
    with caplog.at_level(logging.WARNING):
        assert check_function(sp).degree == -1
    assert 'undefined' in caplog.text


def test_hamilton_cayley_jacobi_identity(jt):
    sp = build_symmetriser(char_poly_path(jt, [2.0]))
    d = hamilton_cayley(sp)
    assert len(d) == 3
    assert d[0].allclose(sp.delta)
    assert d[1].allclose(-sp.delta.deriv())


def test_hamilton_cayley_generic_identity():
    A = SymbolMatrix.from_roots([[0, 1], [1, -1], [0.5, 0, 1]])
    sp = build_symmetriser(char_poly_path(A, [1.0]))
    d = hamilton_cayley(sp)
    for t in (0.3, 0.8):
        tau = 1.7
        lhs = np.linalg.det(tau * np.real(sp.Q(t)) - np.real(sp.Q.deriv()(t)))
        rhs = sum(np.real(d[j](t)) * tau ** (3 - j) for j in range(4))
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-10)


def test_gr_bounds(jt):
    xi = 3.0
    s = xi ** 2 / (1 + xi ** 2)
    sp = build_symmetriser(char_poly_path(jt, [xi]))
    c1, c2 = gr_bounds(sp, T_SAMPLES)
    assert c2 == pytest.approx(2 * s + 2)
    assert c1 == pytest.approx(1 / (2 * s + 2))


def test_minor_rank_counts_distinct_roots(jt):
    sp = build_symmetriser(char_poly_path(jt, [2.0]))
    assert minor_rank(sp, 0.0) == 1
    assert minor_rank(sp, 0.5) == 2


def test_double_root_delta_vanishes(double_root):
    sp = build_symmetriser(char_poly_path(double_root, [5.0]))
    assert sp.delta_vanishes
    assert not sp.minor_vanishes(1)


def hyperbolic_symbol(rng, m, degree=2):
    """
    S C(t) S^-1 for the companion matrix C of prod (tau - lambda_k(t)) with random real lambda_k,
    spread around k - (m - 1) / 2
    """
    roots = []
    for k in range(m):
        c = rng.uniform(-0.25, 0.25, degree + 1)
        c[0] += k - (m - 1) / 2
        roots.append(TimePoly(c))
    C = SymbolMatrix.from_roots(roots).components[0].coeffs
    S = rng.standard_normal((m, m)) + m * np.eye(m)
    coeffs = np.einsum('ab,kbc,cd->kad', S, C, np.linalg.inv(S))
    return SymbolMatrix([PolyMatrix(coeffs)]), roots


@pytest.mark.parametrize('seed', range(20))
def test_two_root_symmetriser_closed_form(seed):
    rng = np.random.default_rng(seed)
    l1, l2 = TimePoly(rng.standard_normal(3)), TimePoly(rng.standard_normal(3))
    xi = 1.5
    a = xi / np.sqrt(1 + xi ** 2)
    mu1, mu2 = l1 * a, l2 * a
    sp = build_symmetriser(char_poly_path(SymbolMatrix.from_roots([l1, l2]), [xi]))
    expected = [[mu1 ** 2 + mu2 ** 2, -(mu1 + mu2)], [-(mu1 + mu2), TimePoly([2.0])]]
    for i in range(2):
        for j in range(2):
            assert sp.Q.entry(i, j).allclose(expected[i][j], rtol=1e-9)
    assert sp.delta.allclose((mu1 - mu2) ** 2, rtol=1e-9)
    assert sp.psi.allclose(-(mu1.deriv() + mu2.deriv()) ** 2, rtol=1e-9)


@pytest.mark.parametrize('seed', range(20))
def test_symmetriser_identities_on_random_hyperbolic_systems(seed):
    rng = np.random.default_rng(100 + seed)
    m = 2 + seed % 3
    A, roots = hyperbolic_symbol(rng, m)
    xi = 1.3
    a = xi / np.sqrt(1 + xi ** 2)
    cp = char_poly_path(A, [xi])
    sp = build_symmetriser(cp)
    samples = np.linspace(0.0, 1.0, 50)
    scale = max(1.0, sp.Q.norm())
    assert symmetriser_residual(sp, cp, samples) <= 1e-9 * scale ** 2

    d = hamilton_cayley(sp)
    atol = 1e-10 * scale ** m
    assert d[1].allclose(-sp.delta.deriv(), rtol=1e-8, atol=atol)
    assert d[2].allclose(sp.psi, rtol=1e-8, atol=atol)

    Qs = np.real(sp.Q.evaluate_many(samples))
    dQs = np.real(sp.Q.deriv().evaluate_many(samples))
    deltas = np.real(sp.delta(samples))
    for t, Q, det in zip(samples, Qs, deltas):
        mu = [r(t) * a for r in roots]
        product = np.prod([(mu[i] - mu[j]) ** 2 for i in range(m) for j in range(i)])
        if product > 1e-6:
            assert det == pytest.approx(product, rel=1e-7, abs=1e-12 * np.trace(Q) ** m)

    # sum of squared generalized eigenvalues of (dQ/dt, Q) from the Hamilton-Cayley coefficients
    k = int(np.argmax(deltas))
    t = samples[k]
    d0, d1, d2 = (np.real(d[j](t)) for j in range(3))
    taus = eigvals(dQs[k], Qs[k])
    assert (d1 / d0) ** 2 - 2 * d2 / d0 == pytest.approx(np.real(np.sum(taus ** 2)), rel=1e-5, abs=1e-8)

    c1, c2 = gr_bounds(sp, samples)
    for Q, det in zip(Qs, deltas):
        V = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        norm2 = np.real(np.vdot(V, V))
        energy = np.real(np.vdot(V, Q @ V))
        assert c1 * det * norm2 <= energy + 1e-9 * c2 * norm2
        assert energy <= c2 * norm2 * (1 + 1e-9)
