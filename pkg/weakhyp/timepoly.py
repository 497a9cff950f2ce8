import logging
from math import factorial

import numpy as np
from numpy.polynomial import polynomial as P

from .utils.globals import TRIM_TOL, ZERO_TOL

logger = logging.getLogger(__name__)


class DimensionMismatch(ValueError):
    pass


def _as_array(coeffs):
    c = np.array(coeffs)
    if c.ndim == 0:
        c = c.reshape(1)
    if c.dtype.kind not in 'fc':
        c = c.astype(float)
    return c


def _trim(c, trim_tol):
    """
    drops trailing coefficients whose magnitude is below trim_tol relative to the largest one;
    works on scalar (n,) and matrix (n, r, c) coefficient arrays
    """
    if c.shape[0] == 0:
        return c
    mags = np.abs(c.reshape(c.shape[0], -1)).max(axis=1)
    scale = mags.max()
    if scale == 0:
        return c[:0]
    keep = np.nonzero(mags > trim_tol * scale)[0]
    c = c[:keep[-1] + 1]
    if c.dtype.kind == 'c' and np.abs(c.imag).max() <= trim_tol * scale:
        c = c.real.copy()
    return c


def _padded_sum(a, b, sign=1):
    n = max(a.shape[0], b.shape[0])
    out = np.zeros((n,) + a.shape[1:], dtype=np.result_type(a, b))
    out[:a.shape[0]] += a
    out[:b.shape[0]] += sign * b
    return out


class TimePoly:
    """
    Polynomial in t, coeffs[k] is the coefficient of t^k. The zero polynomial has degree -1.
    """

    def __init__(self, coeffs=(), trim_tol=TRIM_TOL):
        c = _trim(_as_array(coeffs), trim_tol)
        c.setflags(write=False)
        self._coeffs = c

    @classmethod
    def constant(cls, value):
        return cls([value])

    @classmethod
    def monomial(cls, k, value=1.0):
        c = np.zeros(k + 1, dtype=np.result_type(float, type(value)))
        c[k] = value
        return cls(c)

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def degree(self):
        return self._coeffs.shape[0] - 1

    def __call__(self, t):
        if self.degree < 0:
            return np.zeros_like(np.asarray(t, dtype=float)) + 0.0
        return P.polyval(t, self._coeffs)

    def deriv(self, k=1):
        assert k >= 0, 'derivative order must be non-negative'
        if k == 0:
            return self
        if self.degree < k:
            return TimePoly()
        return TimePoly(P.polyder(self._coeffs, k))

    def conj(self):
        return TimePoly(np.conj(self._coeffs))

    def norm(self):
        return float(np.linalg.norm(self._coeffs))

    def is_zero(self, scale=1.0, tol=ZERO_TOL):
        return self.norm() <= tol * scale

    def taylor(self, t0, order):
        """
        Taylor coefficients a_0..a_order of the polynomial around t0
        """
        return np.array([eval_deriv(self, t0, k) / factorial(k) for k in range(order + 1)])

    def real_roots(self, interval=None, imag_tol=1e-9):
        if self.degree < 1:
            return np.array([])
        roots = P.polyroots(self._coeffs)
        roots = roots[np.abs(np.imag(roots)) <= imag_tol * (1.0 + np.abs(roots))]
        roots = np.sort(np.real(roots))
        if interval is not None:
            a, b = interval
            roots = roots[(roots >= a) & (roots <= b)]
        return roots

    def sup_norm(self, interval):
        """
        max |p| on the closed interval, from endpoints and critical points
        """
        if self.degree < 0:
            return 0.0
        a, b = interval
        candidates = np.concatenate([[a, b], self.deriv().real_roots(interval)])
        return float(np.max(np.abs(self(candidates))))

    def allclose(self, other, rtol=1e-10, atol=0.0):
        diff = (self - other).norm()
        scale = max(self.norm(), _lift(other).norm())
        return diff <= atol + rtol * scale

    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return TimePoly(_padded_sum(self._coeffs, other._coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return TimePoly(_padded_sum(self._coeffs, other._coeffs, sign=-1))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TimePoly(-self._coeffs)

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if self.degree < 0 or other.degree < 0:
            return TimePoly()
        return TimePoly(P.polymul(self._coeffs, other._coeffs))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        assert np.isscalar(scalar), 'only division by scalars is exact'
        return TimePoly(self._coeffs / scalar)

    def __pow__(self, k):
        assert int(k) == k and k >= 0, 'only non-negative integer powers'
        out = TimePoly.constant(1.0)
        for _ in range(int(k)):
            out = out * self
        return out

    def __repr__(self):
        return 'TimePoly({})'.format(np.array2string(self._coeffs, precision=6, separator=', '))

    def __reduce__(self):
        return TimePoly, (np.array(self._coeffs),)


def _lift(value):
    if isinstance(value, TimePoly):
        return value
    if np.isscalar(value):
        return TimePoly.constant(value)
    return NotImplemented


def eval_deriv(p, t, k=0):
    """
    k-th t-derivative of p evaluated at t
    """
    assert k >= 0, 'derivative order must be non-negative'
    return p.deriv(k)(t)


class PolyMatrix:
    """
    Matrix polynomial in t, stored as an array of shape (degree + 1, rows, cols).
    """

    def __init__(self, coeffs, trim_tol=TRIM_TOL):
        c = _as_array(coeffs)
        assert c.ndim == 3, 'coefficient array must have shape (degree + 1, rows, cols)'
        c = _trim(c, trim_tol)
        c.setflags(write=False)
        self._coeffs = c

    @classmethod
    def zeros(cls, rows, cols=None):
        cols = rows if cols is None else cols
        return cls(np.zeros((0, rows, cols)))

    @classmethod
    def identity(cls, m):
        return cls(np.eye(m)[None])

    @classmethod
    def constant(cls, matrix):
        return cls(np.asarray(matrix)[None])

    @classmethod
    def from_entries(cls, rows):
        rows = [[_lift(e) for e in row] for row in rows]
        r, cc = len(rows), len(rows[0])
        n = max(e.degree for row in rows for e in row) + 1
        dtype = np.result_type(float, *[e.coeffs.dtype for row in rows for e in row])
        c = np.zeros((n, r, cc), dtype=dtype)
        for i, row in enumerate(rows):
            assert len(row) == cc, 'ragged matrix rows'
            for j, e in enumerate(row):
                c[:e.degree + 1, i, j] = e.coeffs
        return cls(c)

    @property
    def coeffs(self):
        return self._coeffs

    @property
    def shape(self):
        return self._coeffs.shape[1:]

    @property
    def degree(self):
        return self._coeffs.shape[0] - 1

    def __call__(self, t):
        if self.degree < 0:
            return np.zeros(self.shape)
        return P.polyval(t, self._coeffs, tensor=True)

    def evaluate_many(self, ts):
        ts = np.asarray(ts, dtype=float)
        if self.degree < 0:
            return np.zeros((ts.shape[0],) + self.shape)
        return np.moveaxis(P.polyval(ts, self._coeffs), -1, 0)

    def deriv(self, k=1):
        assert k >= 0, 'derivative order must be non-negative'
        if k == 0:
            return self
        if self.degree < k:
            return PolyMatrix.zeros(*self.shape)
        return PolyMatrix(P.polyder(self._coeffs, k, axis=0))

    def entry(self, i, j):
        return TimePoly(self._coeffs[:, i, j])

    def entries(self):
        r, cc = self.shape
        return [[self.entry(i, j) for j in range(cc)] for i in range(r)]

    def trace(self):
        return TimePoly(np.trace(self._coeffs, axis1=1, axis2=2))

    def submatrix(self, rows, cols):
        return PolyMatrix(self._coeffs[:, rows, :][:, :, cols])

    def kron_identity(self, m):
        """
        block diagonal matrix with m copies of self
        """
        eye = np.eye(m)
        if self.degree < 0:
            return PolyMatrix.zeros(m * self.shape[0], m * self.shape[1])
        return PolyMatrix(np.stack([np.kron(eye, c) for c in self._coeffs]))

    @property
    def T(self):
        return PolyMatrix(self._coeffs.transpose(0, 2, 1))

    def conj(self):
        return PolyMatrix(np.conj(self._coeffs))

    def norm(self):
        return float(np.linalg.norm(self._coeffs))

    def is_zero(self, scale=1.0, tol=ZERO_TOL):
        return self.norm() <= tol * scale

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch('shapes {} and {} differ'.format(self.shape, other.shape))

    def __add__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return PolyMatrix(_padded_sum(self._coeffs, other._coeffs))

    def __sub__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return PolyMatrix(_padded_sum(self._coeffs, other._coeffs, sign=-1))

    def __neg__(self):
        return PolyMatrix(-self._coeffs)

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if self.degree < 0 or other.degree < 0:
            return PolyMatrix.zeros(*self.shape)
        out = np.zeros((self.degree + other.degree + 1,) + self.shape,
                       dtype=np.result_type(self._coeffs, other.coeffs))
        for i, p in enumerate(other.coeffs):
            out[i:i + self.degree + 1] += p * self._coeffs
        return PolyMatrix(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        assert np.isscalar(scalar), 'only division by scalars is exact'
        return PolyMatrix(self._coeffs / scalar)

    def __matmul__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch('cannot multiply {} by {}'.format(self.shape, other.shape))
        shape = (self.shape[0], other.shape[1])
        if self.degree < 0 or other.degree < 0:
            return PolyMatrix.zeros(*shape)
        out = np.zeros((self.degree + other.degree + 1,) + shape,
                       dtype=np.result_type(self._coeffs, other.coeffs))
        for i, a in enumerate(self._coeffs):
            out[i:i + other.degree + 1] += a @ other.coeffs
        return PolyMatrix(out)

    def __repr__(self):
        return 'PolyMatrix(shape={}, degree={})'.format(self.shape, self.degree)

    def __reduce__(self):
        return PolyMatrix, (np.array(self._coeffs),)


def _entries(matrix):
    if isinstance(matrix, PolyMatrix):
        return matrix.entries()
    return [[_lift(e) for e in row] for row in matrix]


def poly_det(matrix):
    """
    determinant in the polynomial ring, by minor expansion memoized over the remaining columns;
    uses only ring operations
    """
    entries = _entries(matrix)
    m = len(entries)
    if m == 0:
        return TimePoly.constant(1.0)
    cache = {}

    def minor(row, cols):
        if row == m:
            return TimePoly.constant(1.0)
        if cols in cache:
            return cache[cols]
        total = TimePoly()
        for pos, col in enumerate(cols):
            entry = entries[row][col]
            if entry.degree < 0:
                continue
            term = entry * minor(row + 1, cols[:pos] + cols[pos + 1:])
            total = total + term if pos % 2 == 0 else total - term
        cache[cols] = total
        return total

    return minor(0, tuple(range(m)))


def poly_cofactor(matrix):
    """
    cofactor matrix, entry (i, j) is (-1)^(i+j) times the minor without row i and column j
    """
    entries = _entries(matrix)
    m = len(entries)
    rows = []
    for i in range(m):
        row = []
        for j in range(m):
            sub = [[entries[r][c] for c in range(m) if c != j] for r in range(m) if r != i]
            d = poly_det(sub)
            row.append(d if (i + j) % 2 == 0 else -d)
        rows.append(row)
    return PolyMatrix.from_entries(rows)
