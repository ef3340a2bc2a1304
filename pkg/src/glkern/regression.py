"""Scikit-learn style estimator wrapping the adaptive kernel regression.

The estimator follows the fit/predict/get_params contract so it composes
with pipelines, cross-validation and cloning.  The sample order is part of
the data (the design is a time series), so fit never reorders it.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .estimators import DensityModel, known_design_density, nw_known_density
from .kernels import KernelSpec, kernel_norms
from .processes import RegressionSample
from .selection import (DELTA_EXPONENT_THEORY, GLContext, build_simulation_grid,
                        estimate_noise_variance, local_empirical_constants,
                        pilot_bandwidth, point_estimates, select_from_estimates)


def _as_series(X) -> np.ndarray:
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single feature, got shape {X.shape}")
        X = X[:, 0]
    return X


class GoldenshlugerLepskiRegressor(BaseEstimator, RegressorMixin):
    """Pointwise kernel regression with data-driven local bandwidths.

    Parameters
    ----------
    density : DensityModel or callable, optional
        The known design density.  Defaults to the truncated standard
        normal on [-2, 2].
    kernel : str
        Kernel family name: "gaussian", "epanechnikov" or "uniform".
    bandwidth : "adaptive" or float
        A fixed bandwidth, or "adaptive" to select one per prediction
        point by the comparison rule.
    gamma : float
        Penalty constant; calibrate externally (see the calibration
        module) or keep the default, which is of the order the holdout
        calibration typically lands on.
    delta_exponent : float
        Exponent of log(n) in the penalty slack term.
    grid_step : float
        Log-step of the candidate bandwidth family.
    half_width : float
        Half-width of the window used for the local plug-in constants.

    Attributes
    ----------
    sigma2_ : float
        Residual noise-variance estimate at the pilot bandwidth.
    pilot_bandwidth_ : float
        Pilot bandwidth from leave-one-out cross-validation.
    grid_ : BandwidthGrid
        Candidate bandwidth family at the fitted sample size.
    """

    def __init__(self, density=None, kernel: str = "gaussian",
                 bandwidth="adaptive", gamma: float = 0.005,
                 delta_exponent: float = DELTA_EXPONENT_THEORY,
                 grid_step: float = 0.1, half_width: float = 0.5):
        self.density = density
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.gamma = gamma
        self.delta_exponent = delta_exponent
        self.grid_step = grid_step
        self.half_width = half_width

    def _density_model(self) -> DensityModel:
        if self.density is None:
            return known_design_density()
        if isinstance(self.density, DensityModel):
            return self.density
        if callable(self.density):
            return DensityModel(pdf=self.density)
        raise ValueError("density must be None, a DensityModel or a callable pdf")

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_2d=False, y_numeric=True, dtype=float)
        x = _as_series(X)
        self.sample_ = RegressionSample(x=x, y=np.asarray(y, dtype=float))
        self.kernel_ = KernelSpec(self.kernel)
        self.density_ = self._density_model()
        self.n_features_in_ = 1
        if self.bandwidth == "adaptive":
            self.grid_ = build_simulation_grid(len(self.sample_), self.grid_step)
            self.pilot_bandwidth_ = pilot_bandwidth(self.sample_, self.kernel_,
                                                    self.grid_)
            self.sigma2_ = estimate_noise_variance(self.sample_,
                                                   self.pilot_bandwidth_,
                                                   self.kernel_)
        else:
            h = float(self.bandwidth)
            if h <= 0:
                raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")
        return self

    def select_at(self, x: float):
        """Full selection diagnostics (bandwidth, estimate, per-candidate
        proxy/penalty table) at one point."""
        check_is_fitted(self, "sigma2_")
        norms = kernel_norms(self.kernel_)
        local = local_empirical_constants(self.sample_, self.density_, x,
                                          self.half_width)
        a1_hat = (local.r_sup_hat**2 + self.sigma2_) * norms.l2**2 / local.g_inf_hat
        ctx = GLContext(gamma=self.gamma,
                        delta_n=math.log(len(self.sample_)) ** self.delta_exponent,
                        a1_hat=a1_hat, norms=norms, n=len(self.sample_))
        cache = point_estimates(self.sample_, self.density_, self.kernel_,
                                self.grid_, x)
        return select_from_estimates(cache, ctx)

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "sample_")
        xs = np.atleast_1d(_as_series(X))
        if self.bandwidth == "adaptive":
            return np.array([self.select_at(float(x)).estimate for x in xs])
        h = float(self.bandwidth)
        return np.array([nw_known_density(self.sample_, self.density_,
                                          self.kernel_, h, float(x))
                         for x in xs])

    def select_bandwidths(self, X) -> np.ndarray:
        """Per-point selected bandwidths (adaptive mode only)."""
        check_is_fitted(self, "sample_")
        if self.bandwidth != "adaptive":
            raise ValueError("select_bandwidths requires bandwidth='adaptive'")
        xs = np.atleast_1d(_as_series(X))
        return np.array([self.select_at(float(x)).h_hat for x in xs])
