"""Data-generating processes for the simulation study.

The design variables follow a stationary AR(1) latent chain pushed through
a quantile transform so that their marginal law is a standard normal
truncated to [-c, c].  The chain is exponentially mixing, which is the
dependence regime the bandwidth-selection penalties are built for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.signal import lfilter
from scipy.special import ndtr, ndtri


@dataclass(frozen=True)
class ProcessSpec:
    """Latent AR(1) chain plus truncated-normal marginal transform.

    Parameters
    ----------
    phi : float
        AR coefficient, ``|phi| < 1`` (stationarity).
    rho : float
        Innovation standard deviation, positive.
    c : float
        Truncation half-width of the marginal law, positive.
    """

    phi: float = 0.75
    rho: float = 1.0
    c: float = 2.0

    def __post_init__(self):
        if not abs(self.phi) < 1:
            raise ValueError(f"|phi| must be < 1 for stationarity, got {self.phi}")
        if self.rho <= 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.c <= 0:
            raise ValueError(f"c must be positive, got {self.c}")

    @property
    def latent_variance(self) -> float:
        """Stationary variance of the latent chain, rho^2 / (1 - phi^2)."""
        return self.rho**2 / (1.0 - self.phi**2)


@dataclass
class RegressionSample:
    """Time-ordered paired series (x_t, y_t), the unit under estimation."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.x.ndim != 1 or self.y.ndim != 1:
            raise ValueError("x and y must be one-dimensional series")
        if len(self.x) != len(self.y):
            raise ValueError(f"length mismatch: {len(self.x)} vs {len(self.y)}")
        if len(self.x) == 0:
            raise ValueError("sample must contain at least one observation")

    def __len__(self) -> int:
        return len(self.x)


class TruncatedNormal:
    """Standard normal truncated to [-c, c]: pdf, cdf and quantile.

    The quantile inverts the cdf exactly through the normal quantile:
    ``quantile(u) = ndtri(p * u + Phi(-c))`` with ``p = Phi(c) - Phi(-c)``.
    """

    def __init__(self, c: float):
        if c <= 0:
            raise ValueError(f"c must be positive, got {c}")
        self.c = float(c)
        self.mass = float(ndtr(self.c) - ndtr(-self.c))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(np.abs(x) <= self.c,
                       np.exp(-0.5 * x * x) / (math.sqrt(2.0 * math.pi) * self.mass),
                       0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        inner = (ndtr(np.clip(x, -self.c, self.c)) - ndtr(-self.c)) / self.mass
        out = np.where(x < -self.c, 0.0, np.where(x > self.c, 1.0, inner))
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(u < 0.0) or np.any(u > 1.0):
            raise ValueError("quantile input must lie in [0, 1]")
        out = ndtri(self.mass * u + ndtr(-self.c))
        return float(out) if out.ndim == 0 else out


def simulate_ar1(spec: ProcessSpec, length: int, seed) -> np.ndarray:
    """Simulate the latent AR(1) chain started from its stationary law.

    The first value is drawn from N(0, rho^2/(1-phi^2)), so no burn-in is
    needed; thereafter z_t = phi z_{t-1} + rho xi_t with standard normal
    innovations.  The path is fully determined by ``seed``.
    """
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    rng = np.random.default_rng(seed)
    shocks = rng.standard_normal(length)
    driving = np.empty(length)
    driving[0] = math.sqrt(spec.latent_variance) * shocks[0]
    driving[1:] = spec.rho * shocks[1:]
    # z_t = driving_t + phi z_{t-1}: a first-order recursive filter
    return lfilter([1.0], [1.0, -spec.phi], driving)


def transform_to_x(z: np.ndarray, spec: ProcessSpec) -> np.ndarray:
    """Map the latent chain to the truncated-normal marginal.

    Applies elementwise x_t = G^{-1}(Phi_{0,v}(z_t)) with v the stationary
    latent variance and G the truncated-normal cdf; the output lies in
    [-c, c] and is increasing in z.
    """
    z = np.asarray(z, dtype=float)
    if z.size == 0:
        raise ValueError("latent series must be nonempty")
    u = ndtr(z / math.sqrt(spec.latent_variance))
    return TruncatedNormal(spec.c).quantile(u)


def generate_sample(spec: ProcessSpec, r: Callable, sigma: float, n_total: int,
                    seed) -> RegressionSample:
    """Draw a regression sample y_t = r(x_t) + sigma eta_t of length n_total.

    The noise stream eta is standard normal, independent of the design
    chain: both streams are derived from disjoint children of the master
    seed, so the draw is reproducible and the independence is structural.
    """
    if n_total < 1:
        raise ValueError(f"n_total must be >= 1, got {n_total}")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    x_seed, noise_seed = np.random.SeedSequence(seed).spawn(2)
    x = transform_to_x(simulate_ar1(spec, n_total, x_seed), spec)
    noise = np.random.default_rng(noise_seed).standard_normal(n_total)
    y = np.asarray(r(x), dtype=float) + sigma * noise
    return RegressionSample(x=x, y=y)


def sample_autocorrelation(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Sample autocorrelation at lags 1..max_lag (biased normalization)."""
    x = np.asarray(x, dtype=float)
    if max_lag < 1:
        raise ValueError(f"max_lag must be >= 1, got {max_lag}")
    if len(x) <= max_lag:
        raise ValueError(f"series of length {len(x)} too short for max_lag {max_lag}")
    if np.ptp(x) == 0.0:
        raise ValueError("series has zero variance; autocorrelation undefined")
    centered = x - x.mean()
    denom = float(np.sum(centered * centered))
    return np.array([float(np.sum(centered[lag:] * centered[:-lag])) / denom
                     for lag in range(1, max_lag + 1)])


def bump_line(x):
    """Regression function of the simulation study, 0.7 x + 2 exp(-10 x^2)."""
    x = np.asarray(x, dtype=float)
    out = 0.7 * x + 2.0 * np.exp(-10.0 * x * x)
    return float(out) if out.ndim == 0 else out
