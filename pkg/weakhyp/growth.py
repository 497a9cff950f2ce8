import logging
from abc import abstractmethod
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import linregress

from .utils.globals import FLAT_SPREAD, R2_MARGIN, STATUS_OK, THETA_GRID

logger = logging.getLogger(__name__)

MIN_ROWS = 6
MIN_DECADES = 2.0
MIN_FIT_POINTS = 3


class InsufficientRange(ValueError):
    pass


@dataclass
class GrowthFit:
    model: str
    kappa: float
    theta: float
    c: float
    r2_polynomial: float
    r2_gevrey: float
    residuals: dict = field(default_factory=dict)
    xi_range: tuple = ()
    n_points: int = 0

    @property
    def gevrey_index(self):
        return np.inf if self.theta <= 0 else 1.0 / self.theta

    def to_dict(self):
        return {
            'model': self.model,
            'kappa': self.kappa,
            'theta': self.theta,
            'c': self.c,
            'gevrey_index': self.gevrey_index,
            'r2_polynomial': self.r2_polynomial,
            'r2_gevrey': self.r2_gevrey,
            'residuals': self.residuals,
            'xi_range': list(self.xi_range),
            'n_points': self.n_points,
        }


class BaseFit:
    """
    Least squares fit of log(amplification) against a transform of <xi>.
    Subclasses choose the transform through abscissa().
    """

    def __init__(self, name):
        self.name = name
        self.slope = 0.0
        self.intercept = 0.0
        self.r2 = 0.0
        self.residual = 0.0

    @abstractmethod
    def abscissa(self, b):
        pass

    def _regress(self, x, y, flat):
        res = linregress(x, y)
        slope, intercept = float(res.slope), float(res.intercept)
        residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
        r2 = 1.0 if flat else float(res.rvalue ** 2)
        return slope, intercept, r2, residual

    def fit(self, b, log_amp, flat=False):
        self.slope, self.intercept, self.r2, self.residual = self._regress(self.abscissa(b), log_amp, flat)
        return self


class PolynomialFit(BaseFit):
    """
    amp = C <xi>^kappa
    """

    def __init__(self):
        super(PolynomialFit, self).__init__('polynomial')

    def abscissa(self, b):
        return np.log(b)


class GevreyFit(BaseFit):
    """
    amp = C exp(c <xi>^theta), theta scanned over a grid
    """

    def __init__(self, theta_grid=THETA_GRID):
        super(GevreyFit, self).__init__('gevrey')
        self.theta_grid = np.asarray(theta_grid, dtype=float)
        self.theta = float(self.theta_grid[0])

    def abscissa(self, b):
        return b ** self.theta

    def fit(self, b, log_amp, flat=False):
        best = None
        for theta in self.theta_grid:
            self.theta = float(theta)
            result = self._regress(self.abscissa(b), log_amp, flat)
            # first theta wins ties
            if best is None or result[2] > best[1][2] + 1e-12:
                best = (float(theta), result)
        self.theta = best[0]
        self.slope, self.intercept, self.r2, self.residual = best[1]
        return self


FIT_MODELS = {
    'polynomial': PolynomialFit,
    'gevrey': GevreyFit,
}


def _field(row, name):
    return row[name] if isinstance(row, dict) else getattr(row, name)


def _worst_per_magnitude(table):
    """
    (|xi|, max amplification over directions) sorted by |xi|, finite ok rows only
    """
    worst = {}
    for row in table:
        status = _field(row, 'status')
        amp = _field(row, 'amplification')
        if status != STATUS_OK or amp is None or not np.isfinite(float(amp)) or float(amp) <= 0:
            logger.warning('skipping row at |xi|=%s with status %s', _field(row, 'xi_mag'), status)
            continue
        key = round(float(_field(row, 'xi_mag')), 12)
        worst[key] = max(worst.get(key, 0.0), float(amp))
    mags = np.array(sorted(worst))
    return mags, np.array([worst[k] for k in sorted(worst)])


def fit_growth(table, theta_grid=THETA_GRID, margin=R2_MARGIN):
    """
    Fits the polynomial and Gevrey growth laws to the per-magnitude worst amplification,
    using the upper half (in log scale) of the frequency range.
    """
    mags, amps = _worst_per_magnitude(table)
    if len(mags) < MIN_ROWS:
        raise InsufficientRange('need at least {} finite frequencies, got {}'.format(MIN_ROWS, len(mags)))
    b = np.sqrt(1.0 + mags ** 2)
    decades = float(np.log10(b[-1] / b[0]))
    if decades < MIN_DECADES:
        raise InsufficientRange('frequencies span {:.2f} decades of <xi>, need {}'.format(decades, MIN_DECADES))

    log_b = np.log(b)
    keep = log_b >= 0.5 * (log_b[0] + log_b[-1])
    if np.sum(keep) < MIN_FIT_POINTS:
        keep = np.arange(len(b)) >= len(b) - MIN_FIT_POINTS
    b, log_amp = b[keep], np.log(amps[keep])
    flat = float(np.ptp(log_amp)) < FLAT_SPREAD

    poly = FIT_MODELS['polynomial']().fit(b, log_amp, flat)
    gev = FIT_MODELS['gevrey'](theta_grid).fit(b, log_amp, flat)
    model = 'polynomial' if poly.r2 >= gev.r2 - margin else 'gevrey'
    logger.info('growth fit: kappa=%.3f (R2 %.4f), theta=%.2f (R2 %.4f) -> %s',
                poly.slope, poly.r2, gev.theta, gev.r2, model)

    return GrowthFit(model=model, kappa=poly.slope, theta=gev.theta, c=gev.slope, r2_polynomial=poly.r2,
                     r2_gevrey=gev.r2, residuals={'polynomial': poly.residual, 'gevrey': gev.residual},
                     xi_range=(float(np.sqrt(b[0] ** 2 - 1.0)), float(np.sqrt(b[-1] ** 2 - 1.0))),
                     n_points=int(b.size))
