import numpy as np
from scipy.special import binom

from .timepoly import DimensionMismatch, PolyMatrix, TimePoly


class OperatorPoly:
    """
    sum_h M_h(t) D_t^h with D_t = -i d/dt; matrix coefficients always stand to the left of the D_t powers
    """

    def __init__(self, coeffs):
        coeffs = [c if isinstance(c, PolyMatrix) else PolyMatrix.from_entries(c) for c in coeffs]
        assert len(coeffs) > 0, 'an operator needs at least one coefficient'
        shape = coeffs[0].shape
        for c in coeffs:
            if c.shape != shape:
                raise DimensionMismatch('coefficient shapes {} and {} differ'.format(shape, c.shape))
        # drop vanishing top coefficients
        while len(coeffs) > 1 and coeffs[-1].degree < 0:
            coeffs = coeffs[:-1]
        self.coeffs = tuple(coeffs)
        self.shape = shape

    @classmethod
    def multiplication(cls, matrix):
        return cls([matrix])

    @classmethod
    def identity(cls, m):
        return cls([PolyMatrix.identity(m)])

    @classmethod
    def dt(cls, m=1):
        return cls([PolyMatrix.zeros(m), PolyMatrix.identity(m)])

    @classmethod
    def scalar(cls, polys, m=1):
        """
        sum_h polys[h](t) D_t^h acting diagonally on C^m
        """
        eye = PolyMatrix.identity(m)
        return cls([eye * TimePoly(p.coeffs if isinstance(p, TimePoly) else p) for p in polys])

    @property
    def order(self):
        for h in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[h].degree >= 0:
                return h
        return -1

    def coeff(self, h):
        if 0 <= h < len(self.coeffs):
            return self.coeffs[h]
        return PolyMatrix.zeros(*self.shape)

    def __add__(self, other):
        if not isinstance(other, OperatorPoly):
            return NotImplemented
        if self.shape != other.shape:
            raise DimensionMismatch('cannot add {} and {}'.format(self.shape, other.shape))
        n = max(len(self.coeffs), len(other.coeffs))
        return OperatorPoly([self.coeff(h) + other.coeff(h) for h in range(n)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return OperatorPoly([-c for c in self.coeffs])

    def __matmul__(self, other):
        return op_compose(self, other)

    def __repr__(self):
        return 'OperatorPoly(shape={}, order={})'.format(self.shape, self.order)


def op_compose(P, Q):
    """
    P o Q, moving D_t^h of P past the coefficients of Q with
    D_t^h M = sum_r binom(h, r) (D_t^r M) D_t^(h - r)
    """
    if P.shape[1] != Q.shape[0]:
        raise DimensionMismatch('cannot compose {} with {}'.format(P.shape, Q.shape))
    shape = (P.shape[0], Q.shape[1])
    out = [PolyMatrix.zeros(*shape) for _ in range(len(P.coeffs) + len(Q.coeffs) - 1)]
    for h, p in enumerate(P.coeffs):
        if p.degree < 0:
            continue
        for k, q in enumerate(Q.coeffs):
            for r in range(h + 1):
                dq = q.deriv(r)
                if dq.degree < 0:
                    break
                term = p @ dq * complex(binom(h, r) * (-1j) ** r)
                out[h - r + k] = out[h - r + k] + term
    return OperatorPoly(out)


def op_residual(P, Q, t_samples=None):
    """
    sup over D_t powers, entries and sampled t of |P_h(t) - Q_h(t)|
    """
    if P.shape != Q.shape:
        raise DimensionMismatch('cannot compare {} with {}'.format(P.shape, Q.shape))
    if t_samples is None:
        t_samples = np.linspace(0.0, 1.0, 33)
    n = max(len(P.coeffs), len(Q.coeffs))
    worst = 0.0
    for h in range(n):
        diff = P.coeff(h) - Q.coeff(h)
        if diff.degree < 0:
            continue
        worst = max(worst, float(np.max(np.abs(diff.evaluate_many(t_samples)))))
    return worst
