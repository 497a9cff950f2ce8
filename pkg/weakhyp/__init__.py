from weakhyp.timepoly import DimensionMismatch, PolyMatrix, TimePoly, eval_deriv
from weakhyp.symbol import SymbolMatrix
from weakhyp.operators import OperatorPoly, op_compose, op_residual
from weakhyp.spectral import NonRealSpectrum, eigenvalues_at, hyperbolicity_scan
from weakhyp.symmetriser import build_symmetriser, char_poly_path, check_function, hamilton_cayley
from weakhyp.levi import IdenticallyZeroDelta, bad_set_detect, check_GR1m, check_GRLevi, delta_tilde
from weakhyp.reduction import block_sylvester_assemble, cofactor_operator, lower_order_bound_check, principal_and_lower
from weakhyp.energy import NonFiniteState, StiffnessFailure, evolve_frequency, gronwall_certificate, sweep
from weakhyp.growth import InsufficientRange, fit_growth
from weakhyp.scenario import ScenarioError, load_scenario
from weakhyp.pipeline import Report, emit_report, run_scenario

# bundled scenarios
import weakhyp.scenarios
