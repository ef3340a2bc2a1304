"""Pointwise kernel regression with known design density.

The core estimator reweights each response by the inverse of the (known)
design density, so it is a plain average rather than a ratio and its
expectation is exactly the kernel-smoothed regression function.  The
auxiliary estimator replaces the kernel by the convolution of two scaled
kernels; it is the ingredient the bandwidth comparison rule is built on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .kernels import KernelSpec, eval_convolved, eval_scaled, kernel_value, support_radius
from .processes import RegressionSample, TruncatedNormal


class DegenerateDensityError(ValueError):
    """The design density vanishes at a sample point that carries kernel weight."""


@dataclass
class DensityModel:
    """Known design density g, with optional bounds used as diagnostics.

    Parameters
    ----------
    pdf : callable
        Vectorized density function; must be nonnegative wherever evaluated.
    g_inf, g_sup : float, optional
        Known lower/upper bounds on g near the estimation point.
    support : tuple, optional
        Interval outside which the density is zero.
    """

    pdf: Callable
    g_inf: Optional[float] = None
    g_sup: Optional[float] = None
    support: Optional[tuple] = None


def known_design_density(c: float = 2.0) -> DensityModel:
    """The truncated standard normal design density on [-c, c]."""
    tn = TruncatedNormal(c)
    return DensityModel(pdf=tn.pdf, g_inf=tn.pdf(c), g_sup=tn.pdf(0.0), support=(-c, c))


def _weighted_average(weights: np.ndarray, sample: RegressionSample,
                      g: DensityModel) -> float:
    """Compensated mean of y_k * weight_k / g(x_k), skipping zero weights."""
    n = len(sample)
    mask = weights != 0.0
    if not np.any(mask):
        return 0.0
    dens = np.asarray(g.pdf(sample.x[mask]), dtype=float)
    if np.any(dens <= 0.0):
        bad = int(np.flatnonzero(mask)[np.argmax(dens <= 0.0)])
        raise DegenerateDensityError(
            f"design density is not positive at sample index {bad} (x={sample.x[bad]})")
    terms = sample.y[mask] * weights[mask] / dens
    return math.fsum(terms.tolist()) / n


def nw_known_density(sample: RegressionSample, g: DensityModel, k: KernelSpec,
                     h: float, x: float) -> float:
    """Known-density kernel estimate (1/n) sum y_k K_h(x - x_k) / g(x_k).

    Terms whose kernel weight is zero are skipped without evaluating the
    density; if every weight vanishes the estimate is 0 by convention.
    Summation is compensated, so the result does not depend on the sample
    ordering.
    """
    weights = np.asarray(eval_scaled(k, h, x - sample.x), dtype=float)
    return _weighted_average(weights, sample, g)


def aux_estimate(sample: RegressionSample, g: DensityModel, k: KernelSpec,
                 h: float, h2: float, x: float) -> float:
    """Auxiliary estimate using the convolved kernel (K_h * K_h2)(x_k - x)."""
    weights = np.asarray(eval_convolved(k, h, h2, sample.x - x), dtype=float)
    return _weighted_average(weights, sample, g)


def nadaraya_watson(sample: RegressionSample, k: KernelSpec, h: float, x) -> np.ndarray:
    """Classical ratio-form Nadaraya-Watson fit at the point(s) x.

    Used by the pilot/noise-variance plumbing; the evaluation point weights
    include every sample term (no leave-one-out).  Where the local weight
    mass vanishes the fit falls back to the overall response mean.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(len(x))
    fallback = float(sample.y.mean())
    for i, xi in enumerate(x):
        w = np.asarray(eval_scaled(k, h, xi - sample.x), dtype=float)
        denom = float(np.sum(w))
        out[i] = float(np.sum(w * sample.y)) / denom if denom > 0.0 else fallback
    return out if out.size > 1 else float(out[0])


def smoothed_value(r: Callable, k: KernelSpec, h: float, u: float,
                   quad_tol: float = 1e-9) -> float:
    """The kernel smoothing (K_h * r)(u), by adaptive quadrature.

    Uses the substitution t = u - h v, which turns the integral into
    the v-integral of K(v) r(u - h v) over the kernel support.
    """
    if h <= 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    radius = support_radius(k)
    lo, hi = (-radius, radius) if math.isfinite(radius) else (-np.inf, np.inf)
    value, _ = integrate.quad(lambda v: kernel_value(k, v) * r(u - h * v),
                              lo, hi, epsabs=quad_tol, limit=200)
    return value


def exact_bias_sup(r: Callable, k: KernelSpec, h: float, window: tuple,
                   grid_size: int = 201) -> float:
    """Largest smoothing error max_u |(K_h * r)(u) - r(u)| over a window.

    The maximum over the continuum is discretized on a uniform grid of
    ``grid_size`` points; the inner integral uses adaptive quadrature with
    absolute tolerance 1e-9.
    """
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError(f"window must be a nonempty interval, got {window}")
    grid = np.linspace(lo, hi, grid_size)
    return max(abs(smoothed_value(r, k, h, float(u)) - float(r(u))) for u in grid)
