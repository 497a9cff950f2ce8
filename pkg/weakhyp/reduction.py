import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import binom

from .operators import OperatorPoly, op_compose
from .symmetriser import char_poly_path, faddeev
from .timepoly import PolyMatrix
from .utils.utils import bracket

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BlockSylvesterSystem:
    """
    D_t U - principal(t) U + lower(t) U = 0 for U = {D_t^(j-1) <xi>^(m-j) u}, one block of size m per component of u
    """
    xi: tuple
    bracket: float
    principal: PolyMatrix
    lower: PolyMatrix
    char_poly: object
    L: OperatorPoly
    mu: OperatorPoly
    C: OperatorPoly
    symbol: object = None

    def __post_init__(self):
        object.__setattr__(self, 'generator', (self.principal - self.lower) * 1j)

    @property
    def m(self):
        return self.char_poly.m

    @property
    def size(self):
        return self.principal.shape[0]

    def rhs(self, t, V):
        """
        dV/dt = i (principal - lower) V
        """
        return self.generator(t) @ V

    def initial_data(self, g, t0=0.0):
        """
        U(t0) for data u(t0) = g of the unreduced system
        """
        assert self.symbol is not None, 'initial data needs the symbol the system was assembled from'
        return lift_solution(self.symbol, self.xi, g, t0)


def cofactor_operator(A, xi):
    """
    L = sum_h A_h D_t^(m-1-h), the adjugate of (tau I - A) with tau -> D_t
    """
    m = A.m
    _, adj = faddeev(A.poly_matrix(xi))
    return OperatorPoly([adj[m - 1 - k] for k in range(m)])


def _reduce(A, xi):
    m = A.m
    M = A.poly_matrix(xi)
    c, adj = faddeev(M)
    L = OperatorPoly([adj[m - 1 - k] for k in range(m)])
    mu = OperatorPoly.scalar(c, m)
    P = op_compose(L, OperatorPoly.dt(m) - OperatorPoly.multiplication(M))
    coeffs = []
    for h in range(max(len(mu.coeffs), len(P.coeffs))):
        diff = mu.coeff(h) - P.coeff(h)
        # exact cancellations leave rounding noise behind
        if diff.norm() <= 1e-13 * (mu.coeff(h).norm() + P.coeff(h).norm()):
            diff = PolyMatrix.zeros(m)
        coeffs.append(diff)
    C = OperatorPoly(coeffs)
    assert C.order <= m - 1, 'lower order part must not reach order m'
    return c, L, mu, C


def principal_and_lower(A, xi):
    """
    mu = det(tau I - A) with tau -> D_t and C = mu I - L o (D_t I - A)
    """
    _, _, mu, C = _reduce(A, xi)
    return mu, C


def lower_order_terms(A, xi):
    """
    sum_h A_h sum_{q >= 1} binom(m-1-h, q) (D_t^q A) D_t^(m-1-h-q), the lower order part written out
    """
    m = A.m
    M = A.poly_matrix(xi)
    _, adj = faddeev(M)
    coeffs = [PolyMatrix.zeros(m) for _ in range(m)]
    for h in range(m):
        for q in range(1, m - h):
            DqA = M.deriv(q) * complex((-1j) ** q)
            coeffs[m - 1 - h - q] = coeffs[m - 1 - h - q] + adj[h] @ DqA * float(binom(m - 1 - h, q))
    return OperatorPoly(coeffs)


def block_sylvester_assemble(A, xi):
    m = A.m
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    b = bracket(xi)
    c, L, mu, C = _reduce(A, xi)

    # companion block: <xi> on the superdiagonal, -b_j <xi>^(1-j) in the last row
    deg = max(p.degree for p in c) + 1
    block = np.zeros((max(deg, 1), m, m), dtype=np.result_type(float, *[p.coeffs.dtype for p in c]))
    for i in range(m - 1):
        block[0, i, i + 1] = b
    for h in range(m):
        block[:c[h].degree + 1, m - 1, h] = -c[h].coeffs * b ** (h + 1 - m)
    principal = PolyMatrix(block).kron_identity(m)

    # lower order part only feeds the last row of every block
    deg = max([C.coeff(h).degree for h in range(m)] + [0]) + 1
    lower = np.zeros((deg, m * m, m * m), dtype=complex)
    for h in range(m):
        Ch = C.coeff(h)
        if Ch.degree < 0:
            continue
        scale = b ** (h + 1 - m)
        for i in range(m):
            for k in range(m):
                lower[:Ch.degree + 1, i * m + m - 1, k * m + h] = -Ch.coeffs[:, i, k] * scale

    logger.info('assembled %dx%d block system at xi=%s', m * m, m * m, tuple(xi))
    return BlockSylvesterSystem(xi=tuple(xi), bracket=b, principal=principal, lower=PolyMatrix(lower),
                                char_poly=char_poly_path(A, xi), L=L, mu=mu, C=C, symbol=A)


def _time_derivative_maps(M, count):
    """
    B_0..B_{count-1} with D_t^k u = B_k u along solutions of D_t u = M u
    """
    B = [PolyMatrix.identity(M.shape[0])]
    for _ in range(1, count):
        B.append(B[-1].deriv() * (-1j) + B[-1] @ M)
    return B


def lift_solution(A, xi, u, t):
    """
    U = {D_t^(j-1) <xi>^(m-j) u} at time t for a solution value u(t) of D_t u = A u
    """
    m = A.m
    b = bracket(xi)
    u = np.asarray(u, dtype=complex)
    B = _time_derivative_maps(A.poly_matrix(xi), m)
    U = np.zeros(m * m, dtype=complex)
    for j in range(m):
        w = B[j](t) @ u
        for i in range(m):
            U[i * m + j] = b ** (m - 1 - j) * w[i]
    return U


def initial_data_map(A, xi, g, t0=0.0):
    return lift_solution(A, xi, g, t0)


def lower_order_bound_check(A, t_grid, xi_grid, systems=None):
    """
    smallest c with ||lower(t, xi)|| <= c max_k ||D_t^k A_0(t, xi)|| on the grid;
    inf when the right side vanishes and the left does not
    """
    t_grid = np.asarray(t_grid, dtype=float)
    worst = 0.0
    for idx, xi in enumerate(xi_grid):
        bs = systems[idx] if systems is not None else block_sylvester_assemble(A, xi)
        num = np.linalg.norm(bs.lower.evaluate_many(t_grid), ord=2, axis=(1, 2))
        A0 = A.normalized(xi)
        den = np.zeros(t_grid.shape)
        for k in range(1, A.m):
            Dk = A0.deriv(k)
            if Dk.degree >= 0:
                den = np.maximum(den, np.linalg.norm(Dk.evaluate_many(t_grid), ord=2, axis=(1, 2)))
        tiny = 1e-12 * max(1.0, float(np.max(num)) if num.size else 0.0)
        for n_val, d_val in zip(num, den):
            if d_val > tiny:
                worst = max(worst, n_val / d_val)
            elif n_val > tiny:
                logger.warning('lower order part is nonzero where A_0 is stationary at xi=%s', tuple(np.atleast_1d(xi)))
                return np.inf
    return float(worst)
