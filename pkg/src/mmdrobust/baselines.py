"""Comparator estimators and evaluation metrics."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .kernels import as_points

_LOG_2PI = math.log(2.0 * math.pi)


def mean_estimator(data):
    return as_points(data).mean(axis=0)


def coordinatewise_median(data):
    """Per-coordinate median; even sample sizes average the two central values."""
    return np.median(as_points(data), axis=0)


def geometric_median(data, tol=1e-9, max_iter=10_000):
    """Weiszfeld iteration for ``argmin_m sum_i ||x_i - m||``.

    Starts at the coordinatewise median. When the iterate lands on data
    points, the Vardi-Zhang modification is used: the pull of the
    coinciding mass ``eta`` is compared with the resultant ``r`` of the
    other points, and the iterate stays put when ``r <= eta``.
    Stops when the iterate moves less than ``tol``; on hitting
    ``max_iter`` a warning is issued and the last iterate returned.
    """
    x = as_points(data)
    y = np.median(x, axis=0)
    for _ in range(max_iter):
        diff = x - y
        dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        at = dist <= 1e-12
        inv = np.zeros_like(dist)
        inv[~at] = 1.0 / dist[~at]
        if not np.any(~at):
            return y
        t_point = (inv[:, None] * x).sum(axis=0) / inv.sum()
        eta = at.sum()
        if eta == 0:
            y_new = t_point
        else:
            r = np.linalg.norm((inv[:, None] * diff).sum(axis=0))
            if r <= eta:
                return y
            y_new = (1.0 - eta / r) * t_point + (eta / r) * y
        if np.linalg.norm(y_new - y) < tol:
            return y_new
        y = y_new
    warnings.warn("geometric median did not converge; returning the last iterate",
                  RuntimeWarning, stacklevel=2)
    return y


def median_of_means(data, n_blocks=None, rng=None):
    """Coordinatewise median of block means over a random split.

    Blocks have equal size up to one point (``numpy.array_split``).
    ``n_blocks`` defaults to ``ceil(sqrt(n))``.
    """
    x = as_points(data)
    n = len(x)
    if n_blocks is None:
        n_blocks = int(math.ceil(math.sqrt(n)))
    if not 1 <= n_blocks <= n:
        raise ValueError(f"need 1 <= n_blocks <= n, got {n_blocks} for n={n}")
    rng = np.random.default_rng(rng)
    blocks = np.array_split(rng.permutation(n), n_blocks)
    means = np.stack([x[b].mean(axis=0) for b in blocks])
    return np.median(means, axis=0)


@dataclass
class MixtureFit:
    """Univariate Gaussian mixture with a common, fixed variance."""

    weights: np.ndarray
    means: np.ndarray
    variance: float
    loglik: float
    history: list = field(default_factory=list)

    def log_density(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        comp = (-0.5 * (x[:, None] - self.means[None, :]) ** 2 / self.variance
                - 0.5 * (_LOG_2PI + math.log(self.variance)))
        with np.errstate(divide="ignore"):
            return logsumexp(comp + np.log(self.weights), axis=1)

    def density(self, x):
        return np.exp(self.log_density(x))


def _em_once(x, means, variance, tol, max_iter, rng):
    K = len(means)
    weights = np.full(K, 1.0 / K)
    const = -0.5 * (_LOG_2PI + math.log(variance))
    history = []
    for _ in range(max_iter):
        log_r = (-0.5 * (x[:, None] - means[None, :]) ** 2 / variance + const
                 + np.log(weights))
        log_norm = logsumexp(log_r, axis=1)
        loglik = float(log_norm.sum())
        history.append(loglik)
        if len(history) > 1 and history[-1] - history[-2] < tol:
            break
        resp = np.exp(log_r - log_norm[:, None])
        nk = resp.sum(axis=0)
        empty = nk < 1e-10
        if np.any(empty):
            # collapsed component: restart it on a random data point
            means = means.copy()
            means[empty] = rng.choice(x, size=int(empty.sum()), replace=False)
            nk = np.where(empty, len(x) / K, nk)
            weights = nk / nk.sum()
            history = []
            continue
        weights = nk / len(x)
        means = (resp * x[:, None]).sum(axis=0) / nk
    return weights, means, history


def em_mixture(data, k_components=3, restarts=10, rng=None, variance=1.0,
               tol=1e-8, max_iter=500):
    """EM for a univariate Gaussian mixture with known common variance.

    Each restart initialises the means at distinct random data points and
    the weights uniformly; the fit with the largest log-likelihood wins.
    Components are returned sorted by mean.
    """
    x = np.asarray(data, dtype=float).reshape(-1)
    if len(x) < k_components:
        raise ValueError("need at least as many points as components")
    rng = np.random.default_rng(rng)
    best = None
    for _ in range(restarts):
        init = rng.choice(x, size=k_components, replace=False)
        weights, means, history = _em_once(x, init.astype(float), variance, tol, max_iter, rng)
        if best is None or history[-1] > best[2][-1]:
            best = (weights, means, history)
    weights, means, history = best
    order = np.argsort(means)
    return MixtureFit(weights[order], means[order], float(variance), history[-1], history)


def mae_density(p_true, p_hat, sample_true, N=10_000, rng=None):
    """``(1/N) sum_l |p_true(z_l) - p_hat(z_l)|`` over ``z_l`` drawn by ``sample_true(N, rng)``."""
    rng = np.random.default_rng(rng)
    z = sample_true(N, rng)
    return float(np.mean(np.abs(np.asarray(p_true(z)) - np.asarray(p_hat(z)))))


def sqrt_mse(estimates, truth, per_coordinate=False):
    """Root mean squared error ``sqrt(mean_r ||theta_r - theta0||^2)``.

    With ``per_coordinate=True`` the squared norm is divided by the
    dimension, i.e. the root of the mean squared coordinate error.
    """
    est = np.asarray(estimates, dtype=float)
    if est.size == 0:
        raise ValueError("no estimates")
    truth = np.asarray(truth, dtype=float).reshape(-1)
    est = est.reshape(-1, truth.size)
    sq = ((est - truth) ** 2).sum(axis=1)
    if per_coordinate:
        sq = sq / truth.size
    return float(math.sqrt(sq.mean()))
