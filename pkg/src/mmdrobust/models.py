"""Parametric generative families {P_theta} and their parameter spaces.

Every model exposes the same small interface used by the estimator:
``sample``, ``density``, ``log_density``, ``grad_log_density`` (score in
theta, one row per point), ``init`` and a :class:`ParamSpace` whose
``project`` realises the orthogonal projection onto Theta.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .errors import DegenerateDensity, UnsupportedOperation
from .kernels import as_points

_LOG_2PI = math.log(2.0 * math.pi)


def project_simplex(v):
    """Euclidean projection of ``v`` onto the probability simplex.

    Sort-based algorithm: find the largest ``rho`` with
    ``u_rho - (sum_{j<=rho} u_j - 1)/rho > 0`` for ``u`` sorted decreasingly,
    then threshold.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError("expected a nonempty vector")
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / ind > 0)[0][-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(v - tau, 0.0)


class ParamSpace:
    """Closed convex parameter set: ``euclidean``, ``simplex`` or ``box``."""

    def __init__(self, kind, dim, lo=None, hi=None):
        if kind not in ("euclidean", "simplex", "box"):
            raise ValueError(f"unknown parameter space {kind!r}")
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        self.kind = kind
        self.dim = int(dim)
        if kind == "box":
            self.lo = np.broadcast_to(np.asarray(lo, dtype=float), (dim,)).copy()
            self.hi = np.broadcast_to(np.asarray(hi, dtype=float), (dim,)).copy()
            if np.any(self.lo > self.hi):
                raise ValueError("box needs lo <= hi")

    def __repr__(self):
        return f"ParamSpace({self.kind!r}, {self.dim})"

    def project(self, v):
        v = np.asarray(v, dtype=float).reshape(self.dim)
        if self.kind == "euclidean":
            return v.copy()
        if self.kind == "box":
            return np.clip(v, self.lo, self.hi)
        return project_simplex(v)

    def contains(self, v, tol=1e-9):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,) or not np.all(np.isfinite(v)):
            return False
        if self.kind == "simplex":
            return bool(np.all(v >= -tol) and abs(v.sum() - 1.0) <= tol)
        if self.kind == "box":
            return bool(np.all(v >= self.lo - tol) and np.all(v <= self.hi + tol))
        return True

    def check(self, v):
        """Return ``v`` as a float vector, raising if it lies outside the set."""
        arr = np.asarray(v, dtype=float).reshape(-1)
        if not self.contains(arr):
            raise ValueError(f"parameter {arr} is outside {self!r}")
        return arr


class GenerativeModel:
    """Shared plumbing; subclasses set ``dim`` (data) and ``space`` (Theta)."""

    dim: int
    space: ParamSpace

    def sample(self, theta, count, rng):
        raise NotImplementedError

    def log_density(self, theta, x):
        raise NotImplementedError

    def density(self, theta, x):
        return np.exp(self.log_density(theta, x))

    def grad_log_density(self, theta, x):
        raise UnsupportedOperation(f"{type(self).__name__} has no score function")

    def init(self, data):
        """Starting point: coordinatewise median of the data."""
        data = as_points(data, self.dim)
        return self.space.project(np.median(data, axis=0))

    def _points(self, x):
        return as_points(x, self.dim)


class GaussianLocation(GenerativeModel):
    """``N(theta, sigma^2 I_d)`` with ``theta`` free in R^d."""

    def __init__(self, sigma=1.0, d=1):
        if not sigma > 0:
            raise ValueError("sigma must be positive")
        self.sigma = float(sigma)
        self.dim = int(d)
        self.space = ParamSpace("euclidean", self.dim)

    def __repr__(self):
        return f"GaussianLocation(sigma={self.sigma}, d={self.dim})"

    def sample(self, theta, count, rng):
        theta = self.space.check(theta)
        return theta + self.sigma * rng.standard_normal((count, self.dim))

    def log_density(self, theta, x):
        theta = self.space.check(theta)
        z = (self._points(x) - theta) / self.sigma
        return (-0.5 * np.einsum("ij,ij->i", z, z)
                - self.dim * (math.log(self.sigma) + 0.5 * _LOG_2PI))

    def grad_log_density(self, theta, x):
        theta = self.space.check(theta)
        return (self._points(x) - theta) / self.sigma**2


class CauchyLocation(GenerativeModel):
    """Univariate Cauchy ``C(theta, s)`` with density ``1/(pi s (1 + (x-theta)^2/s^2))``."""

    def __init__(self, scale=1.0):
        if not scale > 0:
            raise ValueError("scale must be positive")
        self.scale = float(scale)
        self.dim = 1
        self.space = ParamSpace("euclidean", 1)

    def __repr__(self):
        return f"CauchyLocation(scale={self.scale})"

    def sample(self, theta, count, rng):
        theta = self.space.check(theta)
        u = rng.random((count, 1))
        return theta + self.scale * np.tan(math.pi * (u - 0.5))

    def log_density(self, theta, x):
        theta = self.space.check(theta)
        r = (self._points(x)[:, 0] - theta[0]) / self.scale
        return -np.log1p(r * r) - math.log(math.pi * self.scale)

    def grad_log_density(self, theta, x):
        theta = self.space.check(theta)
        r = self._points(x) - theta
        return 2.0 * r / (self.scale**2 + r * r)


class UniformTranslation(GenerativeModel):
    """``U[theta - w/2, theta + w/2]``; no score, see :func:`exact_uniform_gradient`."""

    def __init__(self, width=1.0):
        if not width > 0:
            raise ValueError("width must be positive")
        self.width = float(width)
        self.dim = 1
        self.space = ParamSpace("euclidean", 1)

    def __repr__(self):
        return f"UniformTranslation(width={self.width})"

    def sample(self, theta, count, rng):
        theta = self.space.check(theta)
        return theta + self.width * (rng.random((count, 1)) - 0.5)

    def density(self, theta, x):
        theta = self.space.check(theta)
        inside = np.abs(self._points(x)[:, 0] - theta[0]) <= 0.5 * self.width
        return np.where(inside, 1.0 / self.width, 0.0)

    def log_density(self, theta, x):
        with np.errstate(divide="ignore"):
            return np.log(self.density(theta, x))


class DictionaryMixture(GenerativeModel):
    """``sum_l theta_l Phi_l`` over fixed isotropic Gaussian components.

    ``theta`` lives on the simplex. Component log-densities are combined
    with log-sum-exp so far-out points do not underflow the score.
    """

    def __init__(self, means, variance=1.0):
        means = np.asarray(means, dtype=float)
        if means.ndim == 1:
            means = means[:, None]
        if means.ndim != 2 or len(means) == 0:
            raise ValueError("means must be (D,) or (D, d) and nonempty")
        if not variance > 0:
            raise ValueError("variance must be positive")
        self.means = np.ascontiguousarray(means)
        self.variance = float(variance)
        self.n_components = len(means)
        self.dim = means.shape[1]
        self.space = ParamSpace("simplex", self.n_components)

    @classmethod
    def gaussian_grid(cls, lo=-5.0, hi=5.0, step=0.02, variance=1.0):
        """Dictionary of unit-spaced 1-d Gaussians with means ``lo, lo+step, ..., hi``."""
        if step <= 0 or hi < lo:
            raise ValueError("need step > 0 and hi >= lo")
        count = int(round((hi - lo) / step)) + 1
        return cls(lo + step * np.arange(count), variance)

    def __repr__(self):
        return f"DictionaryMixture(D={self.n_components}, d={self.dim}, variance={self.variance})"

    def component_log_densities(self, x):
        """``(m, D)`` array of ``log Phi_l(x_i)``."""
        x = self._points(x)
        sq = (np.einsum("ij,ij->i", x, x)[:, None]
              - 2.0 * x @ self.means.T
              + np.einsum("ij,ij->i", self.means, self.means)[None, :])
        sq = np.maximum(sq, 0.0)
        return -0.5 * sq / self.variance - 0.5 * self.dim * (_LOG_2PI + math.log(self.variance))

    def sample(self, theta, count, rng):
        theta = self.space.check(theta)
        # the check allows 1e-9 slack; renormalise for the categorical draw
        p = np.maximum(theta, 0.0)
        idx = rng.choice(self.n_components, size=count, p=p / p.sum())
        noise = rng.standard_normal((count, self.dim))
        return self.means[idx] + math.sqrt(self.variance) * noise

    def log_density(self, theta, x):
        theta = self.space.check(theta)
        with np.errstate(divide="ignore"):
            log_w = np.log(np.maximum(theta, 0.0))
        return logsumexp(self.component_log_densities(x) + log_w, axis=1)

    def grad_log_density(self, theta, x):
        """Entries ``Phi_l(x) / sum_j theta_j Phi_j(x)``, shape ``(m, D)``."""
        theta = self.space.check(theta)
        log_phi = self.component_log_densities(x)
        with np.errstate(divide="ignore"):
            log_w = np.log(np.maximum(theta, 0.0))
        log_mix = logsumexp(log_phi + log_w, axis=1)
        if not np.all(np.isfinite(log_mix)):
            raise DegenerateDensity("mixture density is zero at a sampled point")
        return np.exp(log_phi - log_mix[:, None])

    def init(self, data):
        return np.full(self.n_components, 1.0 / self.n_components)

    def embedding_gram(self, gamma):
        """``G_{jl} = <mu_{Phi_j}, mu_{Phi_l}>`` for the Gaussian kernel of bandwidth ``gamma``."""
        denom = 4.0 * self.variance + gamma**2
        diff = self.means[:, None, :] - self.means[None, :, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        return (gamma**2 / denom) ** (self.dim / 2.0) * np.exp(-sq / denom)

    def data_embedding(self, gamma, data):
        """``b_l = (1/n) sum_i E_{Y ~ Phi_l} k(X_i, Y)`` for the Gaussian kernel."""
        x = self._points(data)
        denom = 2.0 * self.variance + gamma**2
        diff = x[:, None, :] - self.means[None, :, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        return (gamma**2 / denom) ** (self.dim / 2.0) * np.exp(-sq / denom).mean(axis=0)


def exact_uniform_gradient(k, theta, data, width=1.0):
    """Exact criterion gradient for the uniform translation model.

    With ``k(x, y) = K(x - y)``, the model term does not depend on theta
    and the gradient is ``-(2/n) sum_i [K(theta + w/2 - X_i) - K(theta - w/2 - X_i)]``
    (written for general width ``w``, divided by ``w`` for the density height).
    """
    data = np.asarray(data, dtype=float)
    if data.ndim == 2:
        if data.shape[1] != 1:
            raise ValueError("uniform translation model is one-dimensional")
        data = data[:, 0]
    elif data.ndim != 1:
        raise ValueError("uniform translation model is one-dimensional")
    theta = float(np.asarray(theta, dtype=float).reshape(-1)[0])
    half = 0.5 * width
    terms = k.profile(theta + half - data) - k.profile(theta - half - data)
    return -2.0 * terms.mean() / width
