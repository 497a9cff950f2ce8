import argparse
import logging
import sys

import numpy as np

from .energy import V0_POLICIES, NonFiniteState, StiffnessFailure, evolve_frequency, gronwall_certificate
from .growth import InsufficientRange, fit_growth
from .pipeline import STAGES, Report, emit_report, run_scenario
from .reduction import block_sylvester_assemble
from .register import scenario_list
from .scenario import ScenarioError, load_scenario
from .utils.globals import EXIT_NUMERICAL, EXIT_OK, EXIT_SCHEMA
from .utils.load import load_json
from .utils.save import load_csv, save_traces

SUBCOMMAND_STAGES = {
    'analyze': ['analyze'],
    'reduce': ['reduce'],
    'sweep': ['sweep'],
    'pipeline': STAGES,
}


def _common(parser, scenario_required=True):
    parser.add_argument("--scenario", required=scenario_required,
                        help="scenario file or bundled scenario id ({})".format(', '.join(scenario_list)))
    parser.add_argument("--out", default=None, help="directory for report files, the scenario's output.dir by default")
    parser.add_argument("--format", action="append", choices=['csv', 'json'], default=None,
                        help="report format, repeat for several")
    parser.add_argument("--verbose", action="store_true")


def _overrides(parser):
    parser.add_argument("--tol", type=float, default=None, help="integrator tolerance")
    parser.add_argument("--q", type=int, default=None, help="bad set exponent")
    parser.add_argument("--xi-max", type=float, default=None, help="largest frequency magnitude to sweep")
    parser.add_argument("--directions", type=int, default=None, help="number of frequency directions")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--jobs", type=int, default=None, help="worker processes, WEAKHYP_THREADS by default")


def build_parser():
    parser = argparse.ArgumentParser(prog='weakhyp', description='weakly hyperbolic system analyzer')
    sub = parser.add_subparsers(dest='command', required=True)

    for name in SUBCOMMAND_STAGES:
        p = sub.add_parser(name)
        _common(p)
        _overrides(p)

    p = sub.add_parser('evolve', help='integrate a single frequency')
    _common(p)
    _overrides(p)
    p.add_argument("--xi", type=float, nargs='+', required=True, help="frequency vector")
    p.add_argument("--v0", choices=sorted(V0_POLICIES), default=None, help="initial data policy")
    p.add_argument("--save-traces", default=None, help="HDF5 file for the energy trace")

    p = sub.add_parser('fit', help='fit growth laws to a saved sweep table or a fresh sweep')
    _common(p, scenario_required=False)
    _overrides(p)
    p.add_argument("--table", default=None, help="sweep table CSV")

    p = sub.add_parser('report', help='re-emit a saved JSON report')
    _common(p, scenario_required=False)
    p.add_argument("--report", required=True, help="JSON report file")
    return parser


def _print_report(report):
    if report.hyperbolicity:
        print('verdict: {}'.format(report.hyperbolicity['verdict']))
    if report.conditions:
        print('GR1m constant: {}'.format(report.conditions['C_GR1m']))
        print('GRLevi constant: {}'.format(report.conditions['C_GRLevi']))
    if report.reduction:
        print('reduction residual: {:.3e}'.format(report.reduction['residual']))
    if report.sweep:
        print('sweep rows: {}'.format(len(report.sweep)))
    if report.fit:
        print('growth model: {} (kappa={:.3f}, theta={:.2f})'.format(
            report.fit['model'], report.fit['kappa'], report.fit['theta']))
    for message in report.warnings:
        print('warning: {}'.format(message))
    for message in report.violations:
        print('violation: {}'.format(message))


def _overrides_of(args):
    return {key: getattr(args, key, None) for key in ('tol', 'q', 'xi_max', 'directions', 'seed')}


def _evolve(args):
    sc = load_scenario(args.scenario)
    A = sc.symbol()
    xi = np.asarray(args.xi, dtype=float)
    bs = block_sylvester_assemble(A, xi)
    rng = np.random.default_rng([sc.seed if args.seed is None else args.seed, 0])
    V0 = bs.initial_data(V0_POLICIES[args.v0 or sc.v0_policy](xi, bs.m, rng))
    tol = sc.tolerances.integrator if args.tol is None else args.tol
    try:
        trace = evolve_frequency(bs, V0, interval=sc.interval, tol=tol, q=sc.q if args.q is None else args.q,
                                 c1=sc.c1)
    except (StiffnessFailure, NonFiniteState) as e:
        print('numerical failure: {}'.format(e))
        return EXIT_NUMERICAL
    cert = gronwall_certificate(trace, bs)
    print('amplification: {:.6g}'.format(trace.amplification))
    print('bad set measure: {:.6g}'.format(trace.bad_set.total_length))
    print("hyperbolic Gronwall constant c': {:.6g}".format(cert.c_prime))
    print('lower order constant: {:.6g}'.format(cert.c_lower))
    if args.save_traces:
        save_traces([trace], args.save_traces)
    return EXIT_OK


def _fit(args):
    if args.table:
        rows = load_csv(args.table)
    elif args.scenario:
        report = run_scenario(args.scenario, stages=['sweep'], n_jobs=args.jobs, **_overrides_of(args))
        rows = report.sweep
    else:
        print('fit needs --table or --scenario')
        return EXIT_SCHEMA
    try:
        result = fit_growth(rows)
    except InsufficientRange as e:
        print('insufficient range: {}'.format(e))
        return EXIT_NUMERICAL
    print('growth model: {}'.format(result.model))
    print('kappa: {:.4f} (R2 {:.4f})'.format(result.kappa, result.r2_polynomial))
    print('theta: {:.2f} (R2 {:.4f}), Gevrey index {:.3f}'.format(result.theta, result.r2_gevrey,
                                                                   result.gevrey_index))
    return EXIT_OK


def _report(args):
    report = Report.from_dict(load_json(args.report))
    _print_report(report)
    if args.out:
        emit_report(report, args.format or ['csv', 'json'], args.out)
    return report.exit_code


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.basicConfig(level=logging.INFO, format='%(asctime)s %(name)s %(levelname)s %(message)s')

    try:
        if args.command == 'evolve':
            return _evolve(args)
        if args.command == 'fit':
            return _fit(args)
        if args.command == 'report':
            return _report(args)
        sc = load_scenario(args.scenario)
        report = run_scenario(sc, stages=SUBCOMMAND_STAGES[args.command], n_jobs=args.jobs,
                              out=args.out or sc.output.dir, formats=args.format, **_overrides_of(args))
    except ScenarioError as e:
        print('scenario error: {}'.format(e))
        return EXIT_SCHEMA
    except FileNotFoundError as e:
        print('missing file: {}'.format(e))
        return EXIT_SCHEMA

    _print_report(report)
    return report.exit_code


if __name__ == '__main__':
    sys.exit(main())
