import numpy as np


class AttrDict(dict):
    def __init__(self, *args, **kwargs):
        super(AttrDict, self).__init__(*args, **kwargs)
        self.__dict__ = self


def bracket(xi):
    """
    <xi> = (1 + |xi|^2)^(1/2)
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    return float(np.sqrt(1.0 + np.dot(xi, xi)))


def chebyshev_grid(n, interval=(0.0, 1.0)):
    """
    n Chebyshev-Lobatto points on interval, endpoints included, ascending
    """
    a, b = interval
    if n == 1:
        return np.array([0.5 * (a + b)])
    nodes = np.cos(np.pi * np.arange(n) / (n - 1))[::-1]
    grid = 0.5 * (a + b) + 0.5 * (b - a) * nodes
    grid[0], grid[-1] = a, b
    return grid


def refine_grid(grid):
    """
    inserts midpoints between consecutive points; the original points are kept
    """
    grid = np.asarray(grid, dtype=float)
    mids = 0.5 * (grid[1:] + grid[:-1])
    return np.sort(np.concatenate([grid, mids]))


def to_builtin(value):
    """
    converts numpy scalars and arrays nested in dicts/lists into plain python values
    """
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value
