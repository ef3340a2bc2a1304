"""Adaptive pointwise kernel regression for weakly dependent data.

The estimator reweights responses by a known design density and selects a
local bandwidth by comparing estimates across a geometric bandwidth family
(the Goldenshluger-Lepski rule), with the penalty constant calibrated on a
time-gapped holdout block.  A Monte Carlo harness and numeric checks of
the supporting error bounds round out the package.
"""

from .calibration import (CalibrationResult, CalibrationSplit, HoldoutPairs,
                          build_gamma_grid, calibrate, calibration_error,
                          holdout_grid, holdout_weights, split_sample)
from .estimators import (DegenerateDensityError, DensityModel, aux_estimate,
                         exact_bias_sup, known_design_density, nadaraya_watson,
                         nw_known_density, smoothed_value)
from .kernels import (EPANECHNIKOV, GAUSSIAN, UNIFORM, KernelFamily, KernelNorms,
                      KernelSpec, eval_convolved, eval_scaled, kernel_norms,
                      kernel_order)
from .processes import (ProcessSpec, RegressionSample, TruncatedNormal, bump_line,
                        generate_sample, sample_autocorrelation, simulate_ar1,
                        transform_to_x)
from .regression import GoldenshlugerLepskiRegressor
from .selection import (BandwidthGrid, EmptyGridError, GLContext,
                        InsufficientDataError, NoLocalDataError, SelectionResult,
                        bias_proxy, build_simulation_grid, build_theory_grid,
                        estimate_noise_variance, local_empirical_constants,
                        make_context, penalty, penalty_split, pilot_bandwidth,
                        point_estimates, select_bandwidth, select_from_estimates)
from .study import ReplicaResult, StudyConfig, StudyReport, export_report, replica_seed, run_replica, run_study
from .checks import (CheckReport, TheoryParams, check_bernstein_tail,
                     check_bias_bound, check_constants_identities,
                     check_lemma_a2, check_oracle_ratio, check_rate,
                     check_variance_bound, constants_table, holder_floor,
                     joint_density_bound, theory_window, true_theory_params)

__version__ = "0.1.0"

__all__ = [
    "BandwidthGrid", "CalibrationResult", "CalibrationSplit", "CheckReport",
    "DegenerateDensityError", "DensityModel", "EPANECHNIKOV", "EmptyGridError",
    "GAUSSIAN", "GLContext", "GoldenshlugerLepskiRegressor", "HoldoutPairs",
    "InsufficientDataError", "KernelFamily", "KernelNorms", "KernelSpec",
    "NoLocalDataError", "ProcessSpec", "RegressionSample", "ReplicaResult",
    "SelectionResult", "StudyConfig", "StudyReport", "TheoryParams",
    "TruncatedNormal", "UNIFORM", "aux_estimate", "bias_proxy", "bump_line",
    "build_gamma_grid", "build_simulation_grid", "build_theory_grid",
    "calibrate", "calibration_error", "check_bernstein_tail",
    "check_bias_bound", "check_constants_identities", "check_lemma_a2",
    "check_oracle_ratio", "check_rate", "check_variance_bound",
    "constants_table", "estimate_noise_variance", "eval_convolved",
    "eval_scaled", "exact_bias_sup", "export_report", "generate_sample",
    "holder_floor", "holdout_grid", "holdout_weights", "joint_density_bound",
    "kernel_norms", "kernel_order", "known_design_density",
    "local_empirical_constants", "make_context", "nadaraya_watson",
    "nw_known_density", "penalty", "penalty_split", "pilot_bandwidth",
    "point_estimates", "replica_seed", "run_replica", "run_study",
    "sample_autocorrelation", "select_bandwidth", "select_from_estimates",
    "simulate_ar1", "smoothed_value", "split_sample", "theory_window",
    "transform_to_x", "true_theory_params",
]
