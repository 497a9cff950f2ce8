import argparse

import numpy as np

from weakhyp.utils.save import open_traces


def summarize(trace):
    bad = trace.bad_set
    return {
        'xi': trace.xi,
        'amplification': trace.amplification,
        'samples': len(trace.t),
        'bad_intervals': len(bad.intervals),
        'bad_set_measure': bad.total_length,
        'max_energy': float(np.max(trace.energy)),
    }


parser = argparse.ArgumentParser()
parser.add_argument("--traces", required=True, help='HDF5 file written by weakhyp evolve --save-traces')
args = parser.parse_args()

for k, trace in enumerate(open_traces(args.traces)):
    print('trace {}: {}'.format(k, summarize(trace)))
