"""Empirical and closed-form MMD computations.

Samples are arrays of shape ``(n, d)``; 1-d arrays are read as ``n``
scalar observations. All Gram sums go through the compiled row-sum
kernels, which accumulate each row in index order, so results are
reproducible for a fixed input order.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .kernels import as_points


class MmdValue(NamedTuple):
    """A squared MMD estimate and its clamped square root."""

    squared: float
    value: float

    @classmethod
    def from_squared(cls, squared):
        squared = float(squared)
        return cls(squared, math.sqrt(max(squared, 0.0)))


def _pair(x, y):
    x = as_points(x)
    y = as_points(y, x.shape[1])
    return x, y


def mmd2_vstat(k, x, y):
    """V-statistic estimate of ``D_k^2`` between two samples (diagonals kept).

    This is exactly the squared RKHS distance between the two empirical
    mean embeddings, hence nonnegative up to rounding.
    """
    x, y = _pair(x, y)
    n, m = len(x), len(y)
    xx = k.self_rowsums(x).sum() / (n * n)
    yy = k.self_rowsums(y).sum() / (m * m)
    xy = k.rowsums(x, y).sum() / (n * m)
    return MmdValue.from_squared(xx - 2.0 * xy + yy)


def mmd2_ustat_model_term(k, y):
    """Unbiased estimate of ``E k(Y, Y')`` from ``M >= 2`` model draws."""
    y = as_points(y)
    m = len(y)
    if m < 2:
        raise ValueError("need at least two model draws")
    # k(y, y) = 1 for both kernel families
    return float((k.self_rowsums(y).sum() - m) / (m * (m - 1)))


def crit(k, model_sample, data):
    """Monte-Carlo value of the criterion minimised by the MMD estimator.

    ``E_{Y,Y'} k(Y, Y') - (2/n) sum_i E_Y k(X_i, Y)``, i.e. ``D_k^2`` to the
    empirical measure without the data-only constant.
    """
    y, x = _pair(model_sample, data)
    model_term = mmd2_ustat_model_term(k, y)
    mixed = k.rowsums(x, y).sum() / (len(x) * len(y))
    return model_term - 2.0 * mixed


def gauss_embedding_inner(gamma, sigma, d, theta, theta_prime):
    """``<mu_P, mu_Q>`` for ``P = N(theta, s^2 I)``, ``Q = N(theta', s^2 I)``.

    Gaussian kernel with bandwidth ``gamma``:
    ``(g^2/(4s^2+g^2))^{d/2} exp(-||theta-theta'||^2/(4s^2+g^2))``.
    """
    denom = 4.0 * sigma**2 + gamma**2
    diff = np.asarray(theta, dtype=float) - np.asarray(theta_prime, dtype=float)
    return (gamma**2 / denom) ** (d / 2.0) * math.exp(-float(diff @ diff if diff.ndim else diff * diff) / denom)


def gauss_point_embedding(gamma, sigma, d, x, theta):
    """``E_{Y ~ N(theta, s^2 I)} k(x, Y)`` for each row of ``x`` (Gaussian kernel)."""
    x = as_points(x, d)
    denom = 2.0 * sigma**2 + gamma**2
    sq = ((x - np.asarray(theta, dtype=float).reshape(1, d)) ** 2).sum(axis=1)
    return (gamma**2 / denom) ** (d / 2.0) * np.exp(-sq / denom)


def closed_form_gauss_mmd2(gamma, sigma, d, theta, theta_prime):
    """Exact ``D_k^2(N(theta, s^2 I), N(theta', s^2 I))`` for the Gaussian kernel."""
    same = gauss_embedding_inner(gamma, sigma, d, theta, theta)
    cross = gauss_embedding_inner(gamma, sigma, d, theta, theta_prime)
    return 2.0 * (same - cross)


def mmd_to_truth(k, data, truth_sample, truth_self_term=None):
    """``D_k(P_n, P0)`` with ``P0`` represented by a hold-out sample.

    By default this is the exact distance between ``P_n`` and the hold-out
    empirical measure ``P_N``, which is never negative and exceeds
    ``D_k(P_n, P0)`` by at most ``D_k(P_N, P0)`` (triangle inequality),
    itself of order ``1/sqrt(N)``. Passing ``truth_self_term`` (the exact
    ``E k(X, X')`` under ``P0``) swaps the hold-out's own term for it.
    """
    x, t = _pair(data, truth_sample)
    n = len(x)
    if truth_self_term is None:
        truth_self_term = k.self_rowsums(t).sum() / (len(t) * len(t))
    xx = k.self_rowsums(x).sum() / (n * n)
    xt = k.rowsums(t, x).sum() / (n * len(t))
    return MmdValue.from_squared(xx - 2.0 * xt + truth_self_term)


def empirical_mmd_to_truth(k, sampler, n, reps, rng, truth_sampler=None,
                           proxy_factor=20):
    """Average of ``D_k(P_n, P0)`` over ``reps`` independent datasets.

    Parameters
    ----------
    k : Kernel
    sampler : callable ``(count, rng) -> array``
        Draws a dataset of size ``n`` (may be a dependent trajectory).
    n, reps : int
    rng : numpy.random.Generator
    truth_sampler : callable, optional
        Independent draws from ``P0`` for the hold-out proxy; defaults to
        ``sampler``.
    proxy_factor : int
        Hold-out size is ``N = proxy_factor * n`` (at least ``20 n``).

    Returns
    -------
    mean, stderr, values
        Distances to the hold-out measure ``P_N``, drawn once and shared by
        all repetitions. Each overstates ``D_k(P_n, P0)`` by at most
        ``D_k(P_N, P0)``, whose expectation is at most ``1/sqrt(N)``.
    """
    truth_sampler = truth_sampler or sampler
    size = max(proxy_factor, 20) * n
    proxy = as_points(truth_sampler(size, rng))
    self_term = k.self_rowsums(proxy).sum() / (size * size)
    values = np.empty(reps)
    for r in range(reps):
        values[r] = mmd_to_truth(k, sampler(n, rng), proxy, self_term).value
    stderr = values.std(ddof=1) / math.sqrt(reps) if reps > 1 else 0.0
    return float(values.mean()), float(stderr), values


def vstat_stderr(k, x, y):
    """First-order (Hoeffding projection) standard error of :func:`mmd2_vstat`."""
    x, y = _pair(x, y)
    n, m = len(x), len(y)
    hx = k.self_rowsums(x) / n - k.rowsums(y, x) / m
    hy = k.self_rowsums(y) / m - k.rowsums(x, y) / n
    var = 4.0 * hx.var(ddof=1) / n + 4.0 * hy.var(ddof=1) / m
    return math.sqrt(var)
