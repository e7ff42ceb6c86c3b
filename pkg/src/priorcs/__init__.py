"""Weighted l1 sparse recovery with partial support information.

Exact small-scale restricted isometry and orthogonality constants, the
weighted recovery-guarantee constants and error bounds, solvers for the
three weighted programs, the sharpness counterexample and an experiment
harness.
"""

from .bounds import (GuaranteeInputs, GuaranteeReport, NoGuaranteeError, compute_C_standard,
                     compute_C_weighted, compute_d, compute_s, error_bound_rhs,
                     evaluate_guarantee, proposition1_compare)
from .harness import (ExperimentConfig, TrialRecord, gaussian_radius_ds, gaussian_radius_l2,
                      run_sweep, run_trial)
from .model import (EstimateProfile, NoiseKind, NoiseSpec, SupportEstimate, WeightVector,
                    make_estimate, make_weights, profile_of)
from .rip import (EnumerationBudgetError, check_lemma1, check_lemma3, compute_delta,
                  compute_theta, randomized_lower_bound_delta, randomized_lower_bound_theta)
from .sharpness import CounterexampleInstance, build_counterexample, verify_counterexample
from .solvers import (ConstraintKind, SolveConfig, SolverResult, Status, cone_check,
                      oracle_weighted_min, solve, solve_weighted_bp, solve_weighted_bpdn,
                      solve_weighted_ds)

__version__ = "0.1.0"
