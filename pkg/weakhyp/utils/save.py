import csv
import json
import os

import h5py
import numpy as np

from .globals import SWEEP_COLUMNS
from .utils import to_builtin


def _ensure_dir(path):
    folder = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(folder):
        os.makedirs(folder)


def _csv_value(value):
    if value is None:
        return ''
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def save_csv(rows, path, columns=SWEEP_COLUMNS):
    """
    rows are SweepRows (or anything with csv_row()); header only for an empty sweep
    """
    _ensure_dir(path)
    print('saving sweep table to: {}'.format(path))
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_value(v) for v in row.csv_row()])


def load_csv(path):
    """
    rows of a saved sweep table as dicts with numeric fields converted back
    """
    out = []
    with open(path, 'r', newline='') as f:
        for record in csv.DictReader(f):
            row = {}
            for key, value in record.items():
                if key == 'status':
                    row[key] = value
                elif key == 'direction_index':
                    row[key] = int(value)
                else:
                    row[key] = None if value == '' else float(value)
            out.append(row)
    return out


def dump_json(obj):
    return json.dumps(to_builtin(obj), sort_keys=True, indent=2) + '\n'


def save_json(obj, path):
    _ensure_dir(path)
    print('saving report to: {}'.format(path))
    with open(path, 'w') as f:
        f.write(dump_json(obj))


def save_traces(traces, path):
    """
    one HDF5 group per EnergyTrace, in order
    """
    _ensure_dir(path)
    print('saving {} traces to: {}'.format(len(traces), path))
    with h5py.File(path, 'w') as hf:
        for k, trace in enumerate(traces):
            group = hf.create_group('trace_{}'.format(k))
            for name in ('t', 'V', 'e_kov', 'e_hyp', 'energy'):
                group.create_dataset(name, data=getattr(trace, name))
            group.create_dataset('bad_intervals', data=np.array(trace.bad_set.intervals, dtype=float).reshape(-1, 2))
            group.attrs['xi'] = np.asarray(trace.xi, dtype=float)
            group.attrs['amplification'] = trace.amplification
            group.attrs['status'] = trace.status
            group.attrs['eps'] = trace.bad_set.eps
            group.attrs['threshold'] = trace.bad_set.threshold
            group.attrs['interval'] = np.asarray(trace.bad_set.interval, dtype=float)
    print('saved')


def open_traces(path):
    from ..energy import EnergyTrace
    from ..levi import BadSet

    traces = []
    with h5py.File(path, 'r') as hf:
        names = sorted(hf.keys(), key=lambda s: int(s.split('_')[-1]))
        for name in names:
            group = hf[name]
            xi = tuple(float(x) for x in group.attrs['xi'])
            intervals = [tuple(float(v) for v in row) for row in group['bad_intervals'][()]]
            bad = BadSet(xi=xi, eps=float(group.attrs['eps']), intervals=intervals,
                         total_length=float(sum(b - a for a, b in intervals)),
                         threshold=float(group.attrs['threshold']),
                         interval=tuple(float(v) for v in group.attrs['interval']))
            status = group.attrs['status']
            traces.append(EnergyTrace(xi=xi, t=group['t'][()], V=group['V'][()], e_kov=group['e_kov'][()],
                                      e_hyp=group['e_hyp'][()], energy=group['energy'][()], bad_set=bad,
                                      amplification=float(group.attrs['amplification']),
                                      status=status.decode() if isinstance(status, bytes) else str(status)))
    return traces
