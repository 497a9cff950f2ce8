import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as P

from .timepoly import TimePoly
from .utils.globals import COEFF_NOISE, DELTA_FLOOR, RATIO_CAP, REFINE_GROWTH, T_POINTS
from .utils.utils import chebyshev_grid, refine_grid

logger = logging.getLogger(__name__)


class IdenticallyZeroDelta(ValueError):
    def __init__(self, xi=None):
        self.xi = None if xi is None else tuple(np.atleast_1d(xi).astype(float))
        super(IdenticallyZeroDelta, self).__init__(
            'Delta(., xi) vanishes identically{}'.format('' if xi is None else ' at xi={}'.format(self.xi)))


@dataclass
class ConstantEstimate:
    value: float
    witness: float
    coarse: float
    refined: float
    n_points: int

    def __float__(self):
        return float(self.value)


@dataclass
class BadSet:
    xi: tuple
    eps: float
    intervals: list
    total_length: float
    threshold: float
    interval: tuple = (0.0, 1.0)

    def contains(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.zeros(t.shape, dtype=bool)
        for a, b in self.intervals:
            inside |= (t >= a) & (t <= b)
        return inside

    def good_intervals(self):
        lo, hi = self.interval
        good, cursor = [], lo
        for a, b in self.intervals:
            if a > cursor:
                good.append((cursor, a))
            cursor = max(cursor, b)
        if cursor < hi:
            good.append((cursor, hi))
        return good

    def to_dict(self):
        return {'eps': self.eps, 'intervals': [list(i) for i in self.intervals],
                'total_length': self.total_length, 'threshold': self.threshold}


@dataclass
class ConditionReport:
    C_GR1m: float
    C_GRLevi: float
    witness_GR1m: tuple
    witness_GRLevi: tuple
    grid: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def to_dict(self):
        return {
            'C_GR1m': self.C_GR1m,
            'C_GRLevi': self.C_GRLevi,
            'witness_GR1m': list(self.witness_GR1m),
            'witness_GRLevi': list(self.witness_GRLevi),
            'grid': self.grid,
            'violations': list(self.violations),
        }


def _real(p):
    return TimePoly(np.real(p.coeffs))


def _zero_limit(delta, t0, low):
    """
    limit of Delta + (Delta')^2 / Delta at a zero of Delta, from its Taylor coefficients
    """
    a = np.real(delta.taylor(t0, max(delta.degree, 0)))
    scale = np.max(np.abs(a))
    nu = next((k for k in range(1, len(a)) if abs(a[k]) > 1e-10 * scale), None)
    if nu is None:
        return float(a[0])
    if nu == 1:
        # simple zero, the quotient is unbounded; keep the floored value
        return float(a[0] + a[1] ** 2 / max(a[0], low))
    if nu == 2:
        return float(a[0] + 4.0 * a[2])
    return float(a[0])


def _cleaned(delta, tol=COEFF_NOISE):
    """
    drops coefficients that are rounding residue of the symmetriser construction
    """
    c = np.array(delta.coeffs, dtype=float)
    if c.size:
        c[np.abs(c) <= tol * np.max(np.abs(c))] = 0.0
    return TimePoly(c)


def _rounding_bound(delta, ts):
    """
    error bound of evaluating delta at ts in floating point
    """
    a = np.abs(delta.coeffs)
    return 4.0 * (len(a) + 1) * np.finfo(float).eps * P.polyval(np.abs(ts), a)


def delta_tilde(delta, t, floor=DELTA_FLOOR, interval=(0.0, 1.0)):
    """
    Delta + (dDelta/dt)^2 / Delta; points where Delta is zero up to rounding take the analytic limit
    """
    delta = _real(delta)
    if delta.is_zero():
        raise IdenticallyZeroDelta()
    delta = _cleaned(delta)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    low = floor * delta.sup_norm(interval)
    d = delta(ts)
    dd = delta.deriv()(ts)
    at_zero = d <= _rounding_bound(delta, ts)
    out = d + dd ** 2 / np.where(at_zero, 1.0, d)
    for idx in np.nonzero(at_zero)[0]:
        out[idx] = _zero_limit(delta, ts[idx], low)
    return out if np.ndim(t) else float(out[0])


def _sup_ratio(ratio, grid):
    values = ratio(grid)
    k = int(np.argmax(values))
    return float(values[k]), float(grid[k])


def _estimate(ratio, grid):
    coarse, _ = _sup_ratio(ratio, grid)
    fine = refine_grid(grid)
    refined, witness = _sup_ratio(ratio, fine)
    value = refined
    if not np.isfinite(refined) or refined > RATIO_CAP:
        value = np.inf
    elif coarse > 0 and refined > REFINE_GROWTH * coarse:
        logger.warning('ratio grew from %.3e to %.3e under refinement, flagging as unbounded', coarse, refined)
        value = np.inf
    return ConstantEstimate(value=float(value), witness=witness, coarse=coarse, refined=refined,
                            n_points=int(fine.size))


def _grid(t_grid, interval, n_points):
    if t_grid is None:
        return chebyshev_grid(n_points, interval)
    return np.asarray(t_grid, dtype=float)


def check_GR1m(sp, t_grid=None, interval=(0.0, 1.0), n_points=T_POINTS, floor=DELTA_FLOOR):
    """
    sup |psi| / Delta~ over the grid and its refinement
    """
    if sp.delta_vanishes:
        raise IdenticallyZeroDelta(sp.xi)
    delta, psi = sp.delta, _real(sp.psi)

    def ratio(ts):
        dt = delta_tilde(delta, ts, floor=floor, interval=interval)
        num = np.abs(psi(ts))
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(dt > 0, num / np.where(dt > 0, dt, 1.0), np.where(num > 0, np.inf, 0.0))

    return _estimate(ratio, _grid(t_grid, interval, n_points))


def check_GRLevi(A, sp, t_grid=None, interval=(0.0, 1.0), k_max=None, n_points=T_POINTS):
    """
    sup of max_k ||d^k A_0 / dt^k|| / (Delta + |dDelta/dt|) over the grid and its refinement
    """
    if sp.delta_vanishes:
        raise IdenticallyZeroDelta(sp.xi)
    k_max = A.m - 1 if k_max is None else k_max
    grid = _grid(t_grid, interval, n_points)
    if k_max < 1:
        return ConstantEstimate(0.0, float(grid[0]), 0.0, 0.0, int(grid.size))
    A0 = A.normalized(sp.xi)
    derivs = [A0.deriv(k) for k in range(1, k_max + 1)]
    delta = _real(sp.delta)
    ddelta = delta.deriv()

    def ratio(ts):
        num = np.zeros(ts.shape)
        for D in derivs:
            if D.degree >= 0:
                num = np.maximum(num, np.linalg.norm(D.evaluate_many(ts), ord=2, axis=(1, 2)))
        den = np.abs(delta(ts)) + np.abs(ddelta(ts))
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(den > 0, num / np.where(den > 0, den, 1.0), np.where(num > 0, np.inf, 0.0))

    return _estimate(ratio, grid)


def condition_report(A, sps, t_grid=None, interval=(0.0, 1.0), n_points=T_POINTS):
    """
    GR1m and GRLevi constants over a family of symmetriser paths (one per frequency)
    """
    c1m, clevi = 0.0, 0.0
    w1m, wlevi = (), ()
    violations = []
    for sp in sps:
        try:
            est1 = check_GR1m(sp, t_grid, interval, n_points)
            est2 = check_GRLevi(A, sp, t_grid, interval, n_points=n_points)
        except IdenticallyZeroDelta as e:
            violations.append(str(e))
            c1m, clevi = np.inf, np.inf
            w1m = wlevi = (None, list(sp.xi))
            continue
        if est1.value >= c1m:
            c1m, w1m = est1.value, (est1.witness, list(sp.xi))
        if est2.value >= clevi:
            clevi, wlevi = est2.value, (est2.witness, list(sp.xi))
    grid = {'t_points': n_points if t_grid is None else len(t_grid), 'refinement': 2,
            'interval': list(interval), 'xi_points': len(sps)}
    return ConditionReport(float(c1m), float(clevi), w1m, wlevi, grid, violations)


def bad_set_detect(delta, eps, c1=1.0, q=1, interval=(0.0, 1.0), xi=None):
    """
    {t in interval : Delta(t) < c1 eps^(2q) ||Delta||_inf} from the real roots of Delta - threshold
    """
    delta = _real(delta)
    if delta.is_zero():
        raise IdenticallyZeroDelta(xi)
    assert eps > 0, 'eps must be positive'
    lo, hi = interval
    threshold = c1 * eps ** (2 * q) * delta.sup_norm(interval)
    roots = (delta - threshold).real_roots(interval)
    points = np.unique(np.concatenate([[lo], roots, [hi]]))
    intervals = []
    for a, b in zip(points[:-1], points[1:]):
        if delta(0.5 * (a + b)) >= threshold:
            continue
        if intervals and abs(intervals[-1][1] - a) <= 1e-14:
            intervals[-1] = (intervals[-1][0], float(b))
        else:
            intervals.append((float(a), float(b)))
    total = float(sum(b - a for a, b in intervals))
    return BadSet(xi=None if xi is None else tuple(np.atleast_1d(xi).astype(float)), eps=float(eps),
                  intervals=intervals, total_length=total, threshold=float(threshold), interval=tuple(interval))


def log_derivative_integral(delta, bad_set):
    """
    integral of |dDelta/dt| / Delta over the complement of the bad set, as the total variation of log Delta
    """
    delta = _real(delta)
    critical = delta.deriv().real_roots(bad_set.interval)
    total = 0.0
    for a, b in bad_set.good_intervals():
        pts = np.concatenate([[a], critical[(critical > a) & (critical < b)], [b]])
        logs = np.log(delta(pts))
        total += float(np.sum(np.abs(np.diff(logs))))
    return total


def fit_log_constant(delta, eps_list, c1=1.0, q=1, interval=(0.0, 1.0)):
    """
    c_2 estimates, one per eps, from integral <= c_2 log(1/eps)
    """
    out = []
    for eps in eps_list:
        bad = bad_set_detect(delta, eps, c1=c1, q=q, interval=interval)
        out.append(log_derivative_integral(delta, bad) / np.log(1.0 / eps))
    return out


def quotient_bound(sp, t_grid, interval=(0.0, 1.0), floor=1e-8):
    """
    sup over the grid of max <dQ V, V> / <Q V, V> divided by sqrt(Delta~ / Delta),
    skipping points where Delta < floor * ||Delta||_inf
    """
    delta = _real(sp.delta)
    if delta.is_zero():
        raise IdenticallyZeroDelta(sp.xi)
    low = floor * delta.sup_norm(interval)
    dQ = sp.Q.deriv()
    worst = 0.0
    for t in np.asarray(t_grid, dtype=float):
        d = delta(t)
        if d < low:
            continue
        try:
            taus = scipy.linalg.eigvalsh(np.real(dQ(t)), np.real(sp.Q(t)))
        except np.linalg.LinAlgError:
            continue
        worst = max(worst, float(np.max(np.abs(taus))) / np.sqrt(delta_tilde(delta, t, interval=interval) / d))
    return worst
