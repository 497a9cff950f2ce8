import numpy as np

from .timepoly import DimensionMismatch, PolyMatrix, TimePoly
from .utils.utils import bracket


class SymbolMatrix:
    """
    First order symbol A(t, xi) = sum_j A_j(t) xi_j with polynomial-in-t entries.
    """

    def __init__(self, components):
        components = [c if isinstance(c, PolyMatrix) else PolyMatrix.from_entries(c) for c in components]
        assert len(components) > 0, 'a symbol needs at least one spatial component'
        m = components[0].shape[0]
        for c in components:
            if c.shape != (m, m):
                raise DimensionMismatch('every component must be {}x{}, got {}'.format(m, m, c.shape))
        self.components = tuple(components)
        self.m = m
        self.n = len(components)

    @classmethod
    def from_table(cls, m, n, table):
        """
        table maps (row, col, component) with 0-based indices to a list of t-coefficients
        """
        components = []
        for k in range(n):
            entries = [[TimePoly(table.get((i, j, k), ())) for j in range(m)] for i in range(m)]
            components.append(PolyMatrix.from_entries(entries))
        return cls(components)

    @classmethod
    def from_roots(cls, roots):
        """
        xi times the companion matrix of prod_k (tau - roots_k(t)), one spatial dimension
        """
        roots = [r if isinstance(r, TimePoly) else TimePoly(r) for r in roots]
        m = len(roots)
        # coefficients of prod (tau - r_k), ascending in tau
        poly = [TimePoly.constant(1.0)]
        for r in roots:
            shifted = [TimePoly()] + poly
            scaled = [-r * c for c in poly] + [TimePoly()]
            poly = [a + b for a, b in zip(shifted, scaled)]
        rows = [[TimePoly.constant(1.0) if j == i + 1 else TimePoly() for j in range(m)] for i in range(m - 1)]
        rows.append([-poly[j] for j in range(m)])
        return cls([PolyMatrix.from_entries(rows)])

    def _check_xi(self, xi):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if xi.shape != (self.n,):
            raise DimensionMismatch('frequency must have {} components, got {}'.format(self.n, xi.shape))
        return xi

    def poly_matrix(self, xi):
        """
        A(., xi) as a matrix polynomial in t
        """
        xi = self._check_xi(xi)
        out = PolyMatrix.zeros(self.m)
        for x, c in zip(xi, self.components):
            if x != 0:
                out = out + c * float(x)
        return out

    def normalized(self, xi):
        """
        A_0(., xi) = <xi>^-1 A(., xi)
        """
        return self.poly_matrix(xi) / bracket(xi)

    def at(self, t, xi):
        return self.poly_matrix(xi)(t)

    def deriv_at(self, t, xi, k=1):
        return self.poly_matrix(xi).deriv(k)(t)

    def is_t_constant(self):
        return all(c.degree <= 0 for c in self.components)

    def __repr__(self):
        return 'SymbolMatrix(m={}, n={})'.format(self.m, self.n)

    def __reduce__(self):
        return SymbolMatrix, (list(self.components),)
