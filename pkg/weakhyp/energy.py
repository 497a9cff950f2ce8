import logging
import os
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.stats import linregress

from .levi import BadSet, bad_set_detect
from .symmetriser import build_symmetriser
from .utils.globals import (CERT_NOISE, CERT_SLOPE, INTEGRATOR_TOL, MAX_NORM, N_SAMPLES, STATUS_NON_FINITE, STATUS_OK,
                            STATUS_STIFF, SWEEP_COLUMNS, THREADS_ENV)

logger = logging.getLogger(__name__)

GAUSSIAN_WIDTH = 256.0


class StiffnessFailure(RuntimeError):
    def __init__(self, t, message=''):
        self.t = float(t)
        super(StiffnessFailure, self).__init__('integrator step collapsed at t={:.6g}: {}'.format(self.t, message))


class NonFiniteState(FloatingPointError):
    def __init__(self, t):
        self.t = float(t)
        super(NonFiniteState, self).__init__('state left the finite range at t={:.6g}'.format(self.t))


@dataclass
class EnergyTrace:
    xi: tuple
    t: np.ndarray
    V: np.ndarray
    e_kov: np.ndarray
    e_hyp: np.ndarray
    energy: np.ndarray
    bad_set: BadSet
    amplification: float
    status: str = STATUS_OK


@dataclass
class GronwallCertificate:
    c_A: float
    c_L: float
    kov_ratio: float
    kov_bound: float
    kov_ok: bool
    c_prime: float
    c_lower: float
    gr_ok: bool
    n_bad: int
    n_good: int

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class SweepRow:
    xi_mag: float
    direction_index: int
    amplification: Optional[float]
    e_kov_final: Optional[float]
    e_hyp_final: Optional[float]
    bad_set_measure: Optional[float]
    status: str
    xi: tuple = ()
    t_fail: Optional[float] = None
    certificate: Optional[dict] = None

    @property
    def bracket(self):
        return float(np.sqrt(1.0 + self.xi_mag ** 2))

    def csv_row(self):
        return [getattr(self, name) for name in SWEEP_COLUMNS]

    def to_dict(self):
        out = {name: getattr(self, name) for name in SWEEP_COLUMNS}
        out.update({'xi': list(self.xi), 't_fail': self.t_fail, 'certificate': self.certificate})
        return out

    @classmethod
    def from_dict(cls, d):
        kwargs = {name: d[name] for name in SWEEP_COLUMNS}
        kwargs['direction_index'] = int(kwargs['direction_index'])
        return cls(xi=tuple(d.get('xi', ())), t_fail=d.get('t_fail'), certificate=d.get('certificate'), **kwargs)


def flat_profile(xi, m, rng):
    return np.ones(m, dtype=complex)


def gaussian_profile(xi, m, rng):
    xi = np.atleast_1d(xi)
    return np.exp(-np.dot(xi, xi) / (2.0 * GAUSSIAN_WIDTH ** 2)) * np.ones(m, dtype=complex)


def random_profile(xi, m, rng):
    g = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return g / np.linalg.norm(g)


V0_POLICIES = {
    'flat': flat_profile,
    'gaussian': gaussian_profile,
    'random': random_profile,
}


def frequency_grid(n, magnitudes, n_directions=1, seed=0):
    """
    (direction_index, xi) pairs ordered by direction, then magnitude;
    direction 0 is e_1, in one dimension direction 1 is -e_1, otherwise seeded random unit vectors
    """
    if n == 1:
        assert n_directions <= 2, 'a single spatial dimension has only two directions'
        dirs = [np.array([1.0]), np.array([-1.0])][:n_directions]
    else:
        rng = np.random.default_rng(seed)
        dirs = [np.eye(n)[0]]
        while len(dirs) < n_directions:
            v = rng.standard_normal(n)
            dirs.append(v / np.linalg.norm(v))
    return [(d, tuple(float(r) * direction)) for d, direction in enumerate(dirs) for r in magnitudes]


def _block_quadratic(Qs, Vb, Wb):
    """
    sum over blocks i of conj(V_i) . Q W_i, sample by sample
    """
    return np.einsum('nia,nab,nib->n', Vb.conj(), Qs, Wb)


def evolve_frequency(bs, V0, interval=(0.0, 1.0), tol=INTEGRATOR_TOL, n_samples=N_SAMPLES, q=1, c1=1.0,
                     eps=None, sp=None, method='DOP853'):
    """
    Integrates dV/dt = i (principal - lower) V over interval and evaluates both energies on the output samples.
    """
    V0 = np.asarray(V0, dtype=complex)
    assert V0.shape == (bs.size,), 'initial state must have {} components'.format(bs.size)
    assert np.all(np.isfinite(V0)), 'initial state must be finite'
    t0, t1 = interval
    samples = np.linspace(t0, t1, n_samples)

    coarse = np.linspace(t0, t1, 65)
    sup_principal = float(np.max(np.linalg.norm(bs.principal.evaluate_many(coarse), ord=2, axis=(1, 2))))
    v0_norm = float(np.linalg.norm(V0))

    def blowup(t, V):
        return np.linalg.norm(V) - MAX_NORM * max(v0_norm, 1.0)
    blowup.terminal = True

    sol = solve_ivp(bs.rhs, (t0, t1), V0, method=method, t_eval=samples, rtol=tol,
                    atol=tol * 1e-3 * max(v0_norm, np.finfo(float).tiny),
                    max_step=0.5 / (1.0 + sup_principal), events=blowup)
    if sol.status == 1:
        raise NonFiniteState(sol.t_events[0][0])
    if sol.status == -1:
        raise StiffnessFailure(sol.t[-1] if sol.t.size else t0, sol.message)
    V = sol.y.T
    finite = np.all(np.isfinite(V), axis=1)
    if not np.all(finite):
        raise NonFiniteState(samples[int(np.argmin(finite))])

    sp = build_symmetriser(bs.char_poly) if sp is None else sp
    m = bs.m
    Vb = V.reshape(len(samples), m, m)
    e_kov = np.sum(np.abs(V) ** 2, axis=1)
    e_hyp = np.real(_block_quadratic(np.real(sp.Q.evaluate_many(samples)), Vb, Vb))

    if sp.delta_vanishes:
        # no hyperbolic region, the whole interval is treated as bad
        bad = BadSet(xi=bs.xi, eps=1.0, intervals=[(float(t0), float(t1))], total_length=float(t1 - t0),
                     threshold=np.inf, interval=(float(t0), float(t1)))
    else:
        eps = np.exp(-1.0) / bs.bracket if eps is None else eps
        bad = bad_set_detect(sp.delta, eps, c1=c1, q=q, interval=interval, xi=bs.xi)
    energy = np.where(bad.contains(samples), e_kov, e_hyp)
    amplification = float(np.linalg.norm(V[-1]) / v0_norm) if v0_norm > 0 else 1.0

    return EnergyTrace(xi=bs.xi, t=samples, V=V, e_kov=e_kov, e_hyp=e_hyp, energy=energy, bad_set=bad,
                       amplification=amplification)


def gronwall_certificate(trace, bs, sp=None):
    """
    Checks the two Gronwall inequalities along a trace:
    dE_kov/dt <= 2 (c_A <xi> + c_L) E_kov on the bad set and
    dE_hyp/dt <= c' (1 + |dDelta/dt| / Delta) E_hyp outside, reporting the smallest c' seen.
    c_lower is the share of dE_hyp/dt coming from the lower order part alone, sup 2|Re<Q(-i lower)V, V>| / E_hyp
    outside the bad set.
    Both constants below the rounding level of the generator are reported as 0.
    """
    sp = build_symmetriser(bs.char_poly) if sp is None else sp
    ts, V = trace.t, trace.V
    m = bs.m
    G = bs.generator.evaluate_many(ts)
    GV = np.einsum('nab,nb->na', G, V)
    LV = np.einsum('nab,nb->na', bs.lower.evaluate_many(ts) * -1j, V)

    c_A = float(np.max(np.linalg.norm(bs.principal.evaluate_many(ts), ord=2, axis=(1, 2)))) / bs.bracket
    c_L = float(np.max(np.linalg.norm(bs.lower.evaluate_many(ts), ord=2, axis=(1, 2))))
    kov_bound = 2.0 * (c_A * bs.bracket + c_L)
    noise = CERT_NOISE * (c_A * bs.bracket + c_L + 1.0)

    in_bad = trace.bad_set.contains(ts)
    e_kov = trace.e_kov
    d_kov = 2.0 * np.real(np.sum(V.conj() * GV, axis=1))
    kov = d_kov[in_bad & (e_kov > 0)] / e_kov[in_bad & (e_kov > 0)]
    kov_ratio = float(np.max(kov)) if kov.size else 0.0

    Vb = V.reshape(len(ts), m, m)
    GVb = GV.reshape(len(ts), m, m)
    LVb = LV.reshape(len(ts), m, m)
    Qs = np.real(sp.Q.evaluate_many(ts))
    dQs = np.real(sp.Q.deriv().evaluate_many(ts))
    e_hyp = trace.e_hyp
    d_hyp = np.real(_block_quadratic(dQs, Vb, Vb)) + 2.0 * np.real(_block_quadratic(Qs, Vb, GVb))
    d_low = 2.0 * np.abs(np.real(_block_quadratic(Qs, Vb, LVb)))

    c_prime, c_lower, gr_ok, n_good = 0.0, 0.0, True, 0
    if not sp.delta_vanishes:
        delta = np.real(sp.delta(ts))
        ddelta = np.real(sp.delta.deriv()(ts))
        good = ~in_bad & (delta > 0) & (e_hyp > 1e-14 * e_kov)
        n_good = int(np.sum(good))
        if n_good:
            weight = 1.0 + np.abs(ddelta[good]) / delta[good]
            c_prime = float(np.max(np.maximum(d_hyp[good], 0.0) / (weight * e_hyp[good])))
            c_lower = float(np.max(d_low[good] / e_hyp[good]))
            c2 = float(np.max(np.real(sp.Q.trace()(ts))))
            c1 = c2 ** -(m - 1)
            slack = 1e-9 * e_kov[good] * c2
            gr_ok = bool(np.all(c1 * delta[good] * e_kov[good] <= e_hyp[good] + slack)
                         and np.all(e_hyp[good] <= c2 * e_kov[good] + slack))
    c_prime = c_prime if c_prime > noise else 0.0
    c_lower = c_lower if c_lower > noise else 0.0

    return GronwallCertificate(c_A=c_A, c_L=c_L, kov_ratio=kov_ratio, kov_bound=kov_bound,
                               kov_ok=bool(kov_ratio <= kov_bound * (1.0 + 1e-8)), c_prime=c_prime,
                               c_lower=c_lower, gr_ok=gr_ok, n_bad=int(np.sum(in_bad)), n_good=n_good)


def certificate_growth(pairs):
    """
    slope of log c against log <xi> over (<xi>, c) pairs; bounded when the slope stays below CERT_SLOPE.
    Vanishing constants carry no growth and are left out.
    """
    pairs = [(b, c) for b, c in pairs if c is not None and np.isfinite(c) and c > 0]
    if len(pairs) < 2:
        return {'slope': 0.0, 'bounded': True, 'n_points': len(pairs)}
    x = np.log([b for b, _ in pairs])
    y = np.log([c for _, c in pairs])
    slope = float(linregress(x, y).slope)
    return {'slope': slope, 'bounded': slope <= CERT_SLOPE, 'n_points': len(pairs)}


def _sweep_job(job):
    factory, index, direction_index, xi, policy, tol, interval, n_samples, q, c1, seed, certify, keep_trace = job
    xi = np.asarray(xi, dtype=float)
    xi_mag = float(np.linalg.norm(xi))
    bs = factory(xi)
    rng = np.random.default_rng([seed, index])
    V0 = bs.initial_data(V0_POLICIES[policy](xi, bs.m, rng))
    try:
        trace = evolve_frequency(bs, V0, interval=interval, tol=tol, n_samples=n_samples, q=q, c1=c1)
    except StiffnessFailure as e:
        logger.warning('row %d: %s', index, e)
        return SweepRow(xi_mag, direction_index, None, None, None, None, STATUS_STIFF, tuple(xi), e.t), None
    except NonFiniteState as e:
        logger.warning('row %d: %s', index, e)
        return SweepRow(xi_mag, direction_index, np.inf, None, None, None, STATUS_NON_FINITE, tuple(xi), e.t), None
    certificate = gronwall_certificate(trace, bs).to_dict() if certify else None
    row = SweepRow(xi_mag=xi_mag, direction_index=direction_index, amplification=trace.amplification,
                   e_kov_final=float(trace.e_kov[-1]), e_hyp_final=float(trace.e_hyp[-1]),
                   bad_set_measure=trace.bad_set.total_length, status=STATUS_OK, xi=tuple(xi),
                   certificate=certificate)
    return row, trace if keep_trace else None


def _n_jobs(n_jobs):
    if n_jobs is not None:
        return n_jobs
    return int(os.environ.get(THREADS_ENV, 1))


def sweep(factory, xi_list, v0_policy='flat', tol=INTEGRATOR_TOL, interval=(0.0, 1.0), n_samples=N_SAMPLES,
          q=1, c1=1.0, seed=0, n_jobs=None, certify=False, keep_traces=False):
    """
    One summary row per frequency, in the order of xi_list whatever the completion order of the workers.
    With keep_traces the energy traces of the successful rows are returned alongside the rows.
    xi_list holds (direction_index, xi) pairs or bare frequencies; factory maps xi to a BlockSylvesterSystem.
    """
    assert v0_policy in V0_POLICIES, 'unknown initial data policy {}'.format(v0_policy)
    jobs = []
    for index, item in enumerate(xi_list):
        direction_index, xi = item if isinstance(item, tuple) and len(item) == 2 and np.ndim(item[1]) else (0, item)
        jobs.append((factory, index, direction_index, np.atleast_1d(np.asarray(xi, dtype=float)), v0_policy, tol,
                     tuple(interval), n_samples, q, c1, seed, certify, keep_traces))

    workers = _n_jobs(n_jobs)
    logger.info('sweeping %d frequencies on %d worker(s)', len(jobs), workers)
    if workers > 1 and len(jobs) > 1:
        with Pool(workers) as pool:
            results = pool.map(_sweep_job, jobs)
    else:
        results = [_sweep_job(job) for job in jobs]
    rows = [row for row, _ in results]
    if keep_traces:
        return rows, [trace for _, trace in results if trace is not None]
    return rows
