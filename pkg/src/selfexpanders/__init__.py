"""Rotationally symmetric self-expanders of inverse curvature flows.

Symmetric curvature functions, profile geometry, a bottle-profile ODE
solver and a verification layer for the computed profiles.
"""

from .exceptions import (ConeError, DomainError, DomainExit, InvalidConfiguration,
                         InvariantViolation, RangeError, SingularityError)
from .geometry import (ExpanderParams, expander_residual, mu_cylinder, mu_sphere,
                       principal_curvatures, support_function)
from .invariants import CheckId, CheckVerdict, compare_reports, lower_bound_constant, run_all_checks
from .profile_ode import (InitialConditions, ProfileState, SolveOptions, SolveReport,
                          Termination, TerminationKind, Trajectory, detect_inflection,
                          inflection_candidates, integrate, q_value, rhs,
                          validate_initial_conditions)
from .symfun import (Composite, CurvatureFunction, HypothesisReport, MeanCurvature, PNorm,
                     SigmaRatioAdjacent, SigmaRatioGeneral, SigmaRoot, SurfaceExample,
                     check_theorem_hypotheses, cone_contains, elementary_symmetric, eval_rho,
                     parse_family, ray, ray_interval, rho_hat, rho_hat_derivative,
                     rho_hat_inverse, rho_hat_secant, sigma_k)
from .estimator import BottleProfile

__version__ = "0.1.0"
