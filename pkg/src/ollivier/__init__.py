"""Ollivier-Ricci curvature of weighted graphs with exact linear programming."""

from .curvature import (CurvatureProfile, OperatorMatrix, OperatorReport, check_operator, curvature_map,
                        ric_ct, ric_eps, ric_operator, ric_profile, scal)
from .errors import ERROR_CODES, OllivierError
from .flow import FlowLaw, FlowState, Trajectory, flow_run, flow_step
from .graph import (UNREACHABLE, Metric, WeightedGraph, apply_laplacian, grad, graph_from_json, graph_to_json,
                    load_graph, metric_ball, shortest_path_distance)
from .lp import (LinearProgram, LPSolution, PiecewiseFunction, solve_lp, solve_parametric_affine,
                 trace_parametric_polynomial)
from .polytope import BoundBreakdown, crude_bound, f_cyc, lambda_bound, pieces_bound
from .transport import kantorovich_potential, lipschitz_extend, w1
from .walks import (CustomWalk, FiniteMeasure, HeatKernelWalk, PolynomialWalk, WalkFamily, beta_walk,
                    constant_walk, evaluate_walk, make_walk, one_jet, support_hull, theta_walk, xi_walk,
                    zeta_walk)

__version__ = "0.1.0"
