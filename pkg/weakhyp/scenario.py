import json
import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .energy import V0_POLICIES, frequency_grid
from .register import resolve
from .symbol import SymbolMatrix
from .utils.globals import INTEGRATOR_TOL, TOL_CLUSTER, TOL_HYP
from .utils.load import load_json
from .utils.utils import AttrDict

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {'name', 'system', 'T', 'grids', 'tolerances', 'q', 'c1', 'seed', 'v0_policy', 'output'}
REQUIRED_KEYS = ('name', 'system', 'T', 'grids')
DEFAULT_TOLERANCES = {'integrator': INTEGRATOR_TOL, 'hyp': TOL_HYP, 'cluster': TOL_CLUSTER}
OUTPUT_FORMATS = ('csv', 'json')


class ScenarioError(ValueError):
    def __init__(self, message, field=None, lineno=None):
        self.field = field
        self.lineno = lineno
        where = []
        if field is not None:
            where.append('field {}'.format(field))
        if lineno is not None:
            where.append('line {}'.format(lineno))
        prefix = '{}: '.format(', '.join(where)) if where else ''
        super(ScenarioError, self).__init__(prefix + message)


@dataclass
class Scenario:
    name: str
    m: int
    n: int
    table: dict
    T: float
    t_points: int
    xi_magnitudes: list
    directions: int = 1
    tolerances: AttrDict = field(default_factory=lambda: AttrDict(DEFAULT_TOLERANCES))
    q: int = 1
    c1: float = 1.0
    seed: int = 0
    v0_policy: str = 'flat'
    output: AttrDict = field(default_factory=AttrDict)
    path: str = None

    @property
    def interval(self):
        return (0.0, float(self.T))

    @property
    def t_grid(self):
        return np.linspace(0.0, self.T, self.t_points)

    def symbol(self):
        return SymbolMatrix.from_table(self.m, self.n, self.table)

    def frequencies(self):
        """
        (direction_index, xi) pairs for the sweep
        """
        return frequency_grid(self.n, self.xi_magnitudes, self.directions, self.seed)

    def xi_grid(self):
        return [xi for _, xi in self.frequencies()]


def _number(value, path, cast=float):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError('expected a number, got {!r}'.format(value), path)
    if not np.isfinite(value):
        raise ScenarioError('expected a finite number, got {!r}'.format(value), path)
    if cast is int and int(value) != value:
        raise ScenarioError('expected an integer, got {!r}'.format(value), path)
    return cast(value)


def _coefficient(value, path):
    if isinstance(value, str):
        try:
            c = complex(value.replace(' ', ''))
        except ValueError:
            raise ScenarioError('cannot parse coefficient {!r}'.format(value), path)
        if not np.isfinite(c):
            raise ScenarioError('coefficient {!r} is not finite'.format(value), path)
        return c
    return _number(value, path)


def _section(doc, key, path=None):
    path = key if path is None else path
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ScenarioError('expected an object', path)
    return value


def _parse_system(system):
    for key in system:
        if key not in ('m', 'n', 'entry'):
            raise ScenarioError('unknown key', 'system.{}'.format(key))
    for key in ('m', 'n', 'entry'):
        if key not in system:
            raise ScenarioError('missing required key', 'system.{}'.format(key))
    m = _number(system['m'], 'system.m', int)
    n = _number(system['n'], 'system.n', int)
    if m < 1:
        raise ScenarioError('size must be at least 1', 'system.m')
    if n < 1:
        raise ScenarioError('spatial dimension must be at least 1', 'system.n')
    entry = _section(system, 'entry', 'system.entry')

    table = {}
    for key, components in entry.items():
        path = 'system.entry.{}'.format(key)
        parts = key.split('.')
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ScenarioError('entry keys are "row.col"', path)
        i, j = int(parts[0]), int(parts[1])
        if not (1 <= i <= m and 1 <= j <= m):
            raise ScenarioError('entry outside a {}x{} matrix'.format(m, m), path)
        if not isinstance(components, dict):
            raise ScenarioError('expected an object of xi components', path)
        for comp, coeffs in components.items():
            cpath = '{}.{}'.format(path, comp)
            if not comp.startswith('xi') or not comp[2:].isdigit():
                raise ScenarioError('components are named xi1..xi{}'.format(n), cpath)
            k = int(comp[2:])
            if not 1 <= k <= n:
                raise ScenarioError('component outside 1..{}'.format(n), cpath)
            if not isinstance(coeffs, list) or not coeffs:
                raise ScenarioError('expected a nonempty list of t-coefficients', cpath)
            values = [_coefficient(c, '{}[{}]'.format(cpath, idx)) for idx, c in enumerate(coeffs)]
            if all(not isinstance(v, complex) or v.imag == 0 for v in values):
                values = [float(np.real(v)) for v in values]
            table[(i - 1, j - 1, k - 1)] = values
    return m, n, table


def _parse_grids(grids, n):
    for key in grids:
        if key not in ('t_points', 'xi_magnitudes', 'directions'):
            raise ScenarioError('unknown key', 'grids.{}'.format(key))
    if 'xi_magnitudes' not in grids:
        raise ScenarioError('missing required key', 'grids.xi_magnitudes')
    t_points = _number(grids.get('t_points', 257), 'grids.t_points', int)
    if t_points < 2:
        raise ScenarioError('need at least 2 time points', 'grids.t_points')
    mags = grids['xi_magnitudes']
    if not isinstance(mags, list) or not mags:
        raise ScenarioError('expected a nonempty list', 'grids.xi_magnitudes')
    mags = [_number(v, 'grids.xi_magnitudes[{}]'.format(idx)) for idx, v in enumerate(mags)]
    for idx, v in enumerate(mags):
        if v < 1:
            raise ScenarioError('frequency magnitudes must be >= 1', 'grids.xi_magnitudes[{}]'.format(idx))
    directions = _number(grids.get('directions', 1), 'grids.directions', int)
    if directions < 1 or (n == 1 and directions > 2):
        raise ScenarioError('directions must be in 1..{}'.format(2 if n == 1 else 'any'), 'grids.directions')
    return t_points, mags, directions


def _parse_tolerances(tolerances):
    out = AttrDict(DEFAULT_TOLERANCES)
    for key, value in tolerances.items():
        path = 'tolerances.{}'.format(key)
        if key not in DEFAULT_TOLERANCES:
            raise ScenarioError('unknown key', path)
        value = _number(value, path)
        if value <= 0:
            raise ScenarioError('tolerances must be positive', path)
        out[key] = value
    return out


def _parse_output(output, name):
    out = AttrDict(dir=os.path.join('results', name), formats=list(OUTPUT_FORMATS), traces=False)
    for key, value in output.items():
        path = 'output.{}'.format(key)
        if key == 'dir':
            if not isinstance(value, str) or not value:
                raise ScenarioError('expected a path', path)
        elif key == 'formats':
            if not isinstance(value, list) or any(f not in OUTPUT_FORMATS for f in value):
                raise ScenarioError('formats are a list drawn from {}'.format(list(OUTPUT_FORMATS)), path)
        elif key == 'traces':
            if not isinstance(value, bool):
                raise ScenarioError('expected true or false', path)
        else:
            raise ScenarioError('unknown key', path)
        out[key] = value
    return out


def parse_scenario(doc, path=None):
    """
    Validates a decoded scenario document; every rejection names the offending field.
    """
    if not isinstance(doc, dict):
        raise ScenarioError('a scenario is a JSON object')
    for key in doc:
        if key not in TOP_LEVEL_KEYS:
            raise ScenarioError('unknown key', key)
    for key in REQUIRED_KEYS:
        if key not in doc:
            raise ScenarioError('missing required key', key)

    name = doc['name']
    if not isinstance(name, str) or not name:
        raise ScenarioError('expected a nonempty string', 'name')
    m, n, table = _parse_system(_section(doc, 'system'))
    T = _number(doc['T'], 'T')
    if T <= 0:
        raise ScenarioError('final time must be positive', 'T')
    t_points, mags, directions = _parse_grids(_section(doc, 'grids'), n)
    tolerances = _parse_tolerances(_section(doc, 'tolerances'))
    q = _number(doc.get('q', 1), 'q', int)
    if q < 1:
        raise ScenarioError('bad set exponent must be at least 1', 'q')
    c1 = _number(doc.get('c1', 1.0), 'c1')
    if c1 <= 0:
        raise ScenarioError('must be positive', 'c1')
    seed = _number(doc.get('seed', 0), 'seed', int)
    v0_policy = doc.get('v0_policy', 'flat')
    if v0_policy not in V0_POLICIES:
        raise ScenarioError('expected one of {}'.format(sorted(V0_POLICIES)), 'v0_policy')
    output = _parse_output(_section(doc, 'output'), name)

    return Scenario(name=name, m=m, n=n, table=table, T=T, t_points=t_points, xi_magnitudes=mags,
                    directions=directions, tolerances=tolerances, q=q, c1=c1, seed=seed, v0_policy=v0_policy,
                    output=output, path=path)


def load_scenario(name_or_path):
    """
    Loads a scenario file, or a bundled scenario by id.
    """
    path = resolve(name_or_path)
    if not os.path.isfile(path):
        raise ScenarioError('no scenario file or bundled scenario named {!r}'.format(name_or_path))
    try:
        doc = load_json(path)
    except json.JSONDecodeError as e:
        raise ScenarioError(e.msg, lineno=e.lineno)
    scenario = parse_scenario(doc, path)
    logger.info('loaded scenario %s from %s', scenario.name, path)
    return scenario
