import logging
from dataclasses import dataclass, field

import numpy as np

from .symmetriser import build_symmetriser, char_poly_path, minor_rank
from .utils.globals import TOL_CLUSTER, TOL_HYP

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps


class NonRealSpectrum(ValueError):
    def __init__(self, t, xi, max_imag):
        self.t = float(t)
        self.xi = tuple(np.atleast_1d(xi).astype(float))
        self.max_imag = float(max_imag)
        super(NonRealSpectrum, self).__init__(
            'non-real eigenvalue at t={:.6g}, xi={}: |Im| = {:.3e}'.format(self.t, self.xi, self.max_imag))


@dataclass
class HyperbolicityReport:
    verdict: str
    r: int
    max_imag: float
    witness: tuple
    minor_mismatch: int = 0
    grid: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'verdict': self.verdict,
            'r': self.r,
            'max_imag': self.max_imag,
            'witness': list(self.witness),
            'minor_mismatch': self.minor_mismatch,
            'grid': self.grid,
        }


def _clusters(values, gap):
    """
    single-linkage groups of sorted values, consecutive values closer than gap are merged
    """
    groups = [[0]]
    for k in range(1, len(values)):
        if abs(values[k] - values[k - 1]) > gap:
            groups.append([])
        groups[-1].append(k)
    return groups


def _excess_imag(lam, M, tol_hyp):
    """
    |Im lambda| in excess of what rounding explains; a cluster of k coalescing eigenvalues
    is perturbed by up to eps^(1/k) ||M||
    """
    norm = np.linalg.norm(M, 2)
    m = len(lam)
    order = np.lexsort((lam.imag, lam.real))
    lam = lam[order]
    groups = [[0]]
    gap = 10.0 * EPS ** (1.0 / m) * (1.0 + norm)
    for k in range(1, m):
        if abs(lam[k] - lam[k - 1]) > gap:
            groups.append([])
        groups[-1].append(k)
    worst = 0.0
    for g in groups:
        k = len(g)
        for idx in g:
            allowed = tol_hyp * (1.0 + abs(lam[idx]))
            if k > 1:
                allowed = max(allowed, 10.0 * EPS ** (1.0 / k) * (1.0 + norm))
            worst = max(worst, abs(lam[idx].imag) - allowed)
    return worst


def eigenvalues_at(A, t, xi, tol_hyp=TOL_HYP):
    """
    eigenvalues of A(t, xi), checked real and sorted ascending
    """
    M = A.at(t, xi)
    lam = np.linalg.eigvals(M)
    if _excess_imag(lam, M, tol_hyp) > 0:
        raise NonRealSpectrum(t, xi, np.max(np.abs(lam.imag)))
    return np.sort(lam.real)


def _distinct_count(lam, M, tol_cluster):
    scale = max(float(np.max(np.abs(lam))) if len(lam) else 0.0, np.linalg.norm(M, 2))
    return len(_clusters(lam, tol_cluster * scale))


def hyperbolicity_scan(A, t_grid, xi_grid, tol_cluster=TOL_CLUSTER, tol_hyp=TOL_HYP, strict_errors=True):
    """
    Classifies A over the (t, xi) grid: strict when every point has m distinct eigenvalues,
    weak(r) with r the largest distinct count otherwise.
    With strict_errors=False a non-real spectrum yields a non-hyperbolic report instead of raising.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    xi_grid = [np.atleast_1d(np.asarray(xi, dtype=float)) for xi in xi_grid]
    assert t_grid.size > 0 and len(xi_grid) > 0, 'grids must be nonempty'

    max_imag, witness = 0.0, (float(t_grid[0]), tuple(xi_grid[0]))
    violation = None
    counts_min, counts_max = A.m, 0
    mismatch = 0

    for xi in xi_grid:
        sp = build_symmetriser(char_poly_path(A, xi))
        for t in t_grid:
            M = A.at(t, xi)
            lam = np.linalg.eigvals(M)
            imag = float(np.max(np.abs(lam.imag)))
            if imag > max_imag:
                max_imag, witness = imag, (float(t), tuple(xi))
            if _excess_imag(lam, M, tol_hyp) > 0:
                if violation is None:
                    violation = NonRealSpectrum(t, xi, imag)
                continue
            count = _distinct_count(np.sort(lam.real), M, tol_cluster)
            counts_min = min(counts_min, count)
            counts_max = max(counts_max, count)
            if minor_rank(sp, t) != count:
                mismatch += 1

    grid = {'t_points': int(t_grid.size), 'xi_points': len(xi_grid),
            'tol_cluster': tol_cluster, 'tol_hyp': tol_hyp}
    if violation is not None:
        if strict_errors:
            raise violation
        logger.warning(str(violation))
        return HyperbolicityReport('non-hyperbolic', counts_max, max_imag, witness, mismatch, grid)

    if mismatch:
        logger.info('trailing minors disagree with eigenvalue clustering at %d grid points', mismatch)
    if counts_min == A.m:
        return HyperbolicityReport('strict', A.m, max_imag, witness, mismatch, grid)
    return HyperbolicityReport('weak({})'.format(counts_max), counts_max, max_imag, witness, mismatch, grid)
