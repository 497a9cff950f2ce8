import logging
import os
from dataclasses import dataclass, field, fields
from functools import partial

import numpy as np

from .energy import SweepRow, certificate_growth, sweep
from .growth import InsufficientRange, fit_growth
from .levi import IdenticallyZeroDelta, condition_report, quotient_bound
from .operators import OperatorPoly, op_compose, op_residual
from .reduction import block_sylvester_assemble, lower_order_bound_check
from .scenario import Scenario, load_scenario
from .spectral import hyperbolicity_scan
from .symmetriser import build_symmetriser, char_poly_path, gr_bounds, symmetriser_residual
from .utils.globals import EXIT_NUMERICAL, EXIT_OK, EXIT_VIOLATION, STATUS_OK
from .utils.save import save_csv, save_json, save_traces
from .utils.utils import to_builtin

logger = logging.getLogger(__name__)

STAGES = ['analyze', 'reduce', 'sweep', 'fit']


@dataclass
class Report:
    scenario: str
    settings: dict = field(default_factory=dict)
    hyperbolicity: dict = None
    conditions: dict = None
    reduction: dict = None
    sweep: list = field(default_factory=list)
    fit: dict = None
    certificates: dict = None
    warnings: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    exit_code: int = EXIT_OK

    def to_dict(self):
        return to_builtin({f.name: getattr(self, f.name) for f in fields(self)})

    @classmethod
    def from_dict(cls, d):
        return cls(**{f.name: d[f.name] for f in fields(cls) if f.name in d})

    def rows(self):
        return [SweepRow.from_dict(r) for r in self.sweep]

    def warn(self, message):
        logger.warning(message)
        self.warnings.append(message)

    def violate(self, message):
        logger.warning('hypothesis violation: %s', message)
        if message not in self.violations:
            self.violations.append(message)


def _settings(sc):
    return {
        'T': sc.T,
        't_points': sc.t_points,
        'xi_magnitudes': list(sc.xi_magnitudes),
        'directions': sc.directions,
        'tolerances': dict(sc.tolerances),
        'q': sc.q,
        'c1': sc.c1,
        'seed': sc.seed,
        'v0_policy': sc.v0_policy,
    }


def override(sc, tol=None, q=None, xi_max=None, directions=None, seed=None):
    """
    applies command line overrides to a loaded scenario
    """
    if tol is not None:
        sc.tolerances.integrator = tol
    if q is not None:
        sc.q = q
    if xi_max is not None:
        sc.xi_magnitudes = [r for r in sc.xi_magnitudes if r <= xi_max]
        assert sc.xi_magnitudes, 'no frequency magnitude at or below {}'.format(xi_max)
    if directions is not None:
        sc.directions = directions
    if seed is not None:
        sc.seed = seed
    return sc


def analyze(sc, report):
    """
    hyperbolicity scan, symmetriser checks and the GR1m / GRLevi constants; False when the
    spectrum is not real and nothing downstream applies
    """
    A = sc.symbol()
    xi_grid = sc.xi_grid()
    hyp = hyperbolicity_scan(A, sc.t_grid, xi_grid, tol_cluster=sc.tolerances.cluster, tol_hyp=sc.tolerances.hyp,
                             strict_errors=False)
    report.hyperbolicity = hyp.to_dict()
    if hyp.verdict == 'non-hyperbolic':
        report.violate('non-real spectrum, max |Im| = {:.3e} at t={}, xi={}'.format(
            hyp.max_imag, hyp.witness[0], list(hyp.witness[1])))
        return False
    if hyp.minor_mismatch:
        report.warn('trailing minors disagree with eigenvalue clustering at {} grid points'.format(hyp.minor_mismatch))

    cps = [char_poly_path(A, xi) for xi in xi_grid]
    sps = [build_symmetriser(cp) for cp in cps]
    cond = condition_report(A, sps, interval=sc.interval)
    for message in cond.violations:
        report.violate(message)
    for name, value in (('GR1m', cond.C_GR1m), ('GRLevi', cond.C_GRLevi)):
        if not np.isfinite(value) and not cond.violations:
            report.warn('{} constant estimate is unbounded on the grid'.format(name))

    residual = max(symmetriser_residual(sp, cp, sc.t_grid) for sp, cp in zip(sps, cps))
    bounds = [gr_bounds(sp, sc.t_grid) for sp in sps]
    quotients = []
    for sp in sps:
        try:
            quotients.append(quotient_bound(sp, sc.t_grid, interval=sc.interval))
        except IdenticallyZeroDelta:
            quotients.append(np.inf)
    out = cond.to_dict()
    out.update({
        'symmetriser_residual': residual,
        'c1': min(b[0] for b in bounds),
        'c2': max(b[1] for b in bounds),
        'quotient_bound': max(quotients),
        'delta_vanishes': [bool(sp.delta_vanishes) for sp in sps],
    })
    report.conditions = out
    return True


def reduce(sc, report):
    """
    block Sylvester reduction at every grid frequency with the defining identity residual
    """
    A = sc.symbol()
    xi_grid = sc.xi_grid()
    systems = [block_sylvester_assemble(A, xi) for xi in xi_grid]
    samples = np.linspace(0.0, sc.T, 33)
    residual, order = 0.0, -1
    for bs in systems:
        m = bs.m
        lhs = op_compose(bs.L, OperatorPoly.dt(m) - OperatorPoly.multiplication(A.poly_matrix(bs.xi)))
        scale = max(1.0, bs.bracket ** m)
        residual = max(residual, op_residual(lhs, bs.mu - bs.C, samples) / scale)
        order = max(order, bs.C.order)
    bound = lower_order_bound_check(A, sc.t_grid, xi_grid, systems)
    if not np.isfinite(bound):
        report.warn('lower order part is not controlled by the time derivatives of A_0')
    report.reduction = {
        'residual': residual,
        'lower_order_bound': bound,
        'max_order_C': order,
        'size': systems[0].size,
        't_samples': samples.size,
    }
    return systems


def run_sweep(sc, report, n_jobs=None, certify=True, keep_traces=False):
    """
    sweep rows into the report plus the certificate growth check; with keep_traces returns (rows, traces)
    """
    A = sc.symbol()
    result = sweep(partial(block_sylvester_assemble, A), sc.frequencies(), v0_policy=sc.v0_policy,
                    tol=sc.tolerances.integrator, interval=sc.interval, q=sc.q, c1=sc.c1, seed=sc.seed,
                    n_jobs=n_jobs, certify=certify, keep_traces=keep_traces)
    rows = result[0] if keep_traces else result
    report.sweep = [row.to_dict() for row in rows]
    for row in rows:
        if row.status != STATUS_OK:
            report.warn('numerical failure at |xi|={} direction {}: {} at t={}'.format(
                row.xi_mag, row.direction_index, row.status, row.t_fail))
    if certify:
        certified = [row for row in rows if row.certificate]
        growth = {name: certificate_growth([(row.bracket, row.certificate[name]) for row in certified])
                  for name in ('c_prime', 'c_lower')}
        growth['bounded'] = growth['c_prime']['bounded'] and growth['c_lower']['bounded']
        growth['kov_ok'] = all(row.certificate['kov_ok'] for row in certified)
        growth['gr_ok'] = all(row.certificate['gr_ok'] for row in certified)
        report.certificates = growth
        if not growth['c_prime']['bounded']:
            report.warn('hyperbolic Gronwall constant grows like <xi>^{:.2f}'.format(growth['c_prime']['slope']))
        if not growth['c_lower']['bounded']:
            report.warn('lower order contribution to the hyperbolic energy grows like <xi>^{:.2f}'.format(
                growth['c_lower']['slope']))
        if not growth['kov_ok']:
            report.warn('Kovalevskian energy inequality failed on the bad set')
    return result


def fit(report):
    try:
        report.fit = fit_growth(report.rows()).to_dict()
    except InsufficientRange as e:
        report.warn('growth fit skipped: {}'.format(e))
    return report.fit


def exit_code(report):
    if report.violations:
        return EXIT_VIOLATION
    if any(row['status'] != STATUS_OK for row in report.sweep):
        return EXIT_NUMERICAL
    return EXIT_OK


def run_scenario(scenario, stages=STAGES, n_jobs=None, out=None, formats=None, **overrides):
    """
    Runs the requested stages in order: analyze, reduce, sweep, fit. A non-real spectrum stops the run;
    an identically vanishing Delta is recorded as a violation and the run continues.
    Writes the report files when out is given, and the energy traces of the sweep as
    <scenario>_traces.h5 when the scenario sets output.traces.
    """
    sc = scenario if isinstance(scenario, Scenario) else load_scenario(scenario)
    sc = override(sc, **overrides)
    report = Report(scenario=sc.name, settings=_settings(sc))

    traces = []
    proceed = True
    if 'analyze' in stages:
        logger.info('analyze %s', sc.name)
        proceed = analyze(sc, report)
    if proceed and 'reduce' in stages:
        logger.info('reduce %s', sc.name)
        reduce(sc, report)
    if proceed and 'sweep' in stages:
        logger.info('sweep %s', sc.name)
        if out is not None and sc.output.traces:
            _, traces = run_sweep(sc, report, n_jobs=n_jobs, keep_traces=True)
        else:
            run_sweep(sc, report, n_jobs=n_jobs)
    if proceed and 'fit' in stages and report.sweep:
        fit(report)

    report.exit_code = exit_code(report)
    if out is not None:
        emit_report(report, formats or sc.output.formats, out)
        if traces:
            save_traces(traces, os.path.join(out, '{}_traces.h5'.format(sc.name)))
    return report


def emit_report(report, formats=('csv', 'json'), out='.'):
    """
    <scenario>_sweep.csv and <scenario>_report.json under out; returns the written paths
    """
    paths = []
    for fmt in formats:
        if fmt == 'csv':
            path = os.path.join(out, '{}_sweep.csv'.format(report.scenario))
            save_csv(report.rows(), path)
        elif fmt == 'json':
            path = os.path.join(out, '{}_report.json'.format(report.scenario))
            save_json(report.to_dict(), path)
        else:
            raise ValueError('unknown report format {}'.format(fmt))
        paths.append(path)
    return paths
