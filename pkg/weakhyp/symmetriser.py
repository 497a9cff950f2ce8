import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .timepoly import PolyMatrix, TimePoly, poly_cofactor, poly_det
from .utils.globals import ZERO_TOL

logger = logging.getLogger(__name__)


def faddeev(M):
    """
    Leverrier-Faddeev recursion in the polynomial ring.

    Returns (c, adj) where c[k] is the coefficient of tau^k in det(tau I - M) (c[m] = 1)
    and adj[h] is the coefficient of tau^(m-1-h) in adj(tau I - M).
    """
    m = M.shape[0]
    eye = PolyMatrix.identity(m)
    c = [None] * (m + 1)
    c[m] = TimePoly.constant(1.0)
    adj = []
    Mk = PolyMatrix.zeros(m)
    for k in range(1, m + 1):
        Mk = M @ Mk + eye * c[m - k + 1]
        adj.append(Mk)
        c[m - k] = -(M @ Mk).trace() / k
    return c, adj


@dataclass(frozen=True, eq=False)
class CharPolyPath:
    """
    p(t, tau) = tau^m - h_1 tau^(m-1) - ... - h_m for A_0 = <xi>^-1 A
    """
    xi: tuple
    h: tuple

    @property
    def m(self):
        return len(self.h)

    def coefficients(self):
        """
        coefficients of p ascending in tau, as TimePoly
        """
        return [-self.h[self.m - k - 1] for k in range(self.m)] + [TimePoly.constant(1.0)]

    def __call__(self, t, tau):
        return sum(c(t) * tau ** k for k, c in enumerate(self.coefficients()))


def char_poly_path(A, xi):
    c, _ = faddeev(A.normalized(xi))
    m = A.m
    h = tuple(-c[m - j] for j in range(1, m + 1))
    return CharPolyPath(xi=tuple(np.atleast_1d(xi).astype(float)), h=h)


def companion_matrix(cp):
    """
    Sylvester form: ones on the superdiagonal, (h_m, ..., h_1) in the last row
    """
    m = cp.m
    rows = [[TimePoly.constant(1.0) if j == i + 1 else TimePoly() for j in range(m)] for i in range(m - 1)]
    rows.append([cp.h[m - 1 - j] for j in range(m)])
    return PolyMatrix.from_entries(rows)


@dataclass(frozen=True, eq=False)
class SymmetriserPath:
    xi: tuple
    Q: PolyMatrix
    minors: tuple

    @property
    def m(self):
        return self.Q.shape[0]

    @property
    def delta(self):
        return self.minors[-1]

    @cached_property
    def cofactor(self):
        return poly_cofactor(self.Q)

    @cached_property
    def psi(self):
        return check_function(self)

    def minor_scale(self, j):
        return max(1.0, self.Q.norm()) ** j

    def minor_vanishes(self, j, tol=ZERO_TOL):
        """
        True when Delta_j is identically zero up to floating noise
        """
        return self.minors[j - 1].is_zero(scale=self.minor_scale(j), tol=tol)

    @property
    def delta_vanishes(self):
        return self.minor_vanishes(self.m)


def bezoutian(f, g):
    """
    Q with sum_ij Q_ij tau^i sigma^j = (f(tau) g(sigma) - g(tau) f(sigma)) / (tau - sigma),
    f and g given as TimePoly coefficient lists ascending in tau
    """
    n = max(len(f), len(g))
    f = list(f) + [TimePoly()] * (n - len(f))
    g = list(g) + [TimePoly()] * (n - len(g))
    size = n - 1
    Q = [[TimePoly() for _ in range(size)] for _ in range(size)]
    for a in range(n):
        for b in range(a):
            w = f[a] * g[b] - f[b] * g[a]
            if w.degree < 0:
                continue
            for k in range(a - b):
                Q[b + k][a - 1 - k] = Q[b + k][a - 1 - k] + w
    return Q


def build_symmetriser(cp):
    f = cp.coefficients()
    fp = [f[k] * k for k in range(1, len(f))]
    Q = PolyMatrix.from_entries(bezoutian(f, fp))
    m = cp.m
    minors = tuple(poly_det(Q.submatrix(list(range(m - j, m)), list(range(m - j, m)))) for j in range(1, m + 1))
    return SymmetriserPath(xi=cp.xi, Q=Q, minors=minors)


def check_function(sp):
    """
    psi = 1/2 trace(dQ/dt d(Q^co)/dt)
    """
    if sp.m < 2:
        logger.warning('check function is undefined for m = 1, returning zero')
        return TimePoly()
    return (sp.Q.deriv() @ sp.cofactor.deriv()).trace() / 2


def hamilton_cayley(sp):
    """
    d_0..d_m with det(tau Q - dQ/dt) = sum_j d_j tau^(m-j); d_j collects the determinants
    of Q with j of its columns replaced by those of dQ/dt
    """
    m = sp.m
    Q = sp.Q.entries()
    dQ = sp.Q.deriv().entries()
    d = []
    for j in range(m + 1):
        total = TimePoly()
        for cols in combinations(range(m), j):
            mixed = [[dQ[r][c] if c in cols else Q[r][c] for c in range(m)] for r in range(m)]
            total = total + poly_det(mixed)
        d.append(total if j % 2 == 0 else -total)
    return d


def symmetriser_residual(sp, cp, t_samples):
    """
    max over samples of ||Q C - C^T Q|| for the companion matrix C of cp
    """
    C = companion_matrix(cp)
    R = sp.Q @ C - C.T @ sp.Q
    return float(np.max(np.linalg.norm(R.evaluate_many(t_samples), ord=2, axis=(1, 2))))


def gr_bounds(sp, t_grid):
    """
    c_1, c_2 with c_1 det Q |V|^2 <= <QV, V> <= c_2 |V|^2 on the grid
    """
    c2 = float(np.max(np.real(sp.Q.trace()(np.asarray(t_grid)))))
    c2 = max(c2, np.finfo(float).tiny)
    return c2 ** -(sp.m - 1), c2


def minor_rank(sp, t, tol=ZERO_TOL):
    """
    number of leading positive trailing minors Delta_1, Delta_2, ... at t
    """
    scale = max(float(np.real(sp.Q.trace()(t))), 1.0)
    r = 0
    for j, minor in enumerate(sp.minors, start=1):
        if np.real(minor(t)) <= tol * scale ** j:
            break
        r = j
    return r
