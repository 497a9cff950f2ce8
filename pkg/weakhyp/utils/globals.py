import numpy as np

# Polynomial bookkeeping
TRIM_TOL = 1e-13
ZERO_TOL = 1e-9

# Spectral checks
TOL_HYP = 1e-8
TOL_CLUSTER = 1e-6

# Condition estimates
DELTA_FLOOR = 1e-14
COEFF_NOISE = 1e-11
T_POINTS = 2048
RATIO_CAP = 1e12
REFINE_GROWTH = 1.5

# Integrator
INTEGRATOR_TOL = 1e-8
N_SAMPLES = 129
MAX_NORM = 1e150

# Growth fitting
R2_MARGIN = 0.02
FLAT_SPREAD = 1e-3
THETA_GRID = np.round(np.linspace(0.01, 1.5, 150), 2)

# Certificates
CERT_SLOPE = 0.5
CERT_NOISE = 1e-10

# Columns of the sweep table, in output order
SWEEP_COLUMNS = [
    'xi_mag',
    'direction_index',
    'amplification',
    'e_kov_final',
    'e_hyp_final',
    'bad_set_measure',
    'status',
]

STATUS_OK = 'ok'
STATUS_STIFF = 'stiff'
STATUS_NON_FINITE = 'non-finite'

# Exit codes of the pipeline
EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_VIOLATION = 2
EXIT_NUMERICAL = 3

THREADS_ENV = 'WEAKHYP_THREADS'
