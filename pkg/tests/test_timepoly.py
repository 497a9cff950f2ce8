import numpy as np
import pytest

from weakhyp.timepoly import DimensionMismatch, PolyMatrix, TimePoly, eval_deriv, poly_cofactor, poly_det


def random_poly_matrix(rng, m, degree):
    return PolyMatrix(rng.standard_normal((degree + 1, m, m)))


def test_evaluation_and_derivatives():
    p = TimePoly([1, 2, 3])
    assert p(2.0) == pytest.approx(17.0)
    assert eval_deriv(p, 2.0) == pytest.approx(17.0)
    assert eval_deriv(p, 2.0, 1) == pytest.approx(14.0)
    assert eval_deriv(p, 2.0, 2) == pytest.approx(6.0)
    assert eval_deriv(p, 2.0, 3) == pytest.approx(0.0)


def test_trailing_noise_is_trimmed():
    assert TimePoly([1.0, 0.0, 1e-20]).degree == 0
    assert TimePoly([0.0, 0.0]).degree == -1
    assert (TimePoly([1.0, 1.0]) - TimePoly([1.0, 1.0])).degree == -1


def test_zero_polynomial():
    zero = TimePoly()
    assert zero.degree == -1
    assert zero(0.3) == 0.0
    assert (zero * TimePoly([1, 2])).degree == -1
    assert zero.is_zero()


def test_ring_operations():
    p = TimePoly([1, 1])
    q = TimePoly([-1, 1])
    assert (p * q).allclose(TimePoly([-1, 0, 1]))
    assert (p ** 3).allclose(TimePoly([1, 3, 3, 1]))
    assert (2 - p).allclose(TimePoly([1, -1]))
    assert (p / 2)(1.0) == pytest.approx(1.0)


def test_taylor_coefficients():
    p = TimePoly([0, 0, 1])
    assert np.allclose(p.taylor(1.0, 2), [1.0, 2.0, 1.0])


def test_real_roots_and_sup_norm():
    p = TimePoly([-0.25, 1]) * TimePoly([-0.75, 1])
    assert np.allclose(p.real_roots((0.0, 1.0)), [0.25, 0.75])
    assert TimePoly([0, 1, -1]).sup_norm((0.0, 1.0)) == pytest.approx(0.25)
    assert TimePoly([1, 0, 1]).real_roots().size == 0


def test_poly_matrix_evaluation_shapes():
    rng = np.random.default_rng(0)
    M = random_poly_matrix(rng, 3, 2)
    ts = np.linspace(0, 1, 5)
    many = M.evaluate_many(ts)
    assert many.shape == (5, 3, 3)
    for k, t in enumerate(ts):
        assert np.allclose(many[k], M(t))
    assert PolyMatrix.zeros(2).evaluate_many(ts).shape == (5, 2, 2)


def test_poly_matrix_product_matches_pointwise_product():
    rng = np.random.default_rng(1)
    A = random_poly_matrix(rng, 3, 2)
    B = random_poly_matrix(rng, 3, 1)
    for t in (0.0, 0.4, 1.0):
        assert np.allclose((A @ B)(t), A(t) @ B(t))
        assert np.allclose(A.deriv()(t), sum(k * A.coeffs[k] * t ** (k - 1) for k in range(1, 3)))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        PolyMatrix.identity(2) @ PolyMatrix.identity(3)
    with pytest.raises(DimensionMismatch):
        PolyMatrix.identity(2) + PolyMatrix.identity(3)


def test_kron_identity_is_block_diagonal():
    M = PolyMatrix.constant(np.array([[1.0, 2.0], [3.0, 4.0]]))
    K = M.kron_identity(2)(0.0)
    assert K.shape == (4, 4)
    assert np.allclose(K[:2, :2], M(0.0))
    assert np.allclose(K[2:, 2:], M(0.0))
    assert np.allclose(K[:2, 2:], 0.0)


def test_determinant_of_small_matrix():
    t = TimePoly.monomial(1)
    one = TimePoly.constant(1.0)
    assert poly_det([[t, one], [one, t]]).allclose(TimePoly([-1, 0, 1]))


@pytest.mark.parametrize('m', [1, 2, 3, 4])
def test_determinant_matches_numpy(m):
    rng = np.random.default_rng(m)
    M = random_poly_matrix(rng, m, 2)
    d = poly_det(M)
    for t in np.linspace(-1, 1, 7):
        assert d(t) == pytest.approx(np.linalg.det(M(t)), rel=1e-9, abs=1e-9)


def test_cofactor_inverts_up_to_determinant():
    rng = np.random.default_rng(7)
    M = random_poly_matrix(rng, 3, 1)
    cof = poly_cofactor(M)
    d = poly_det(M)
    for t in (0.1, 0.6):
        assert np.allclose(M(t) @ cof(t).T, d(t) * np.eye(3))
