"""Stationary data processes and the RKHS lag covariance rho_t.

``rho_t = |E <k(X_t, .) - mu, k(X_0, .) - mu>|`` expands to
``E k(X_0, X_t) - E k(X, X')`` with ``X, X'`` independent copies of the
marginal, which is what :func:`rho_hat` estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import ConfigError
from .kernels import as_points

DEFAULT_BURN_IN = 1000


@dataclass(frozen=True)
class IID:
    """Independent draws from ``sampler(count, rng) -> (count, d)``."""

    sampler: Callable
    dim: int = 1

    @classmethod
    def gaussian(cls, d=1, mean=0.0, sigma=1.0):
        mean = np.broadcast_to(np.asarray(mean, dtype=float), (d,)).copy()
        return cls(lambda count, rng: mean + sigma * rng.standard_normal((count, d)), d)


@dataclass(frozen=True)
class VectorAR:
    """``X_{t+1} = A X_t + eps_{t+1}`` with i.i.d. noise.

    ``noise`` is ``"gaussian"`` (``N(0, s^2 I)``), ``"uniform"``
    (``U[-s, s]^d``, bounded by ``c = s sqrt(d)``) or a callable
    ``(count, rng) -> (count, d)``.
    """

    A: np.ndarray
    noise: object = "gaussian"
    noise_scale: float = 1.0
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        if A.shape[0] != A.shape[1]:
            raise ConfigError("A must be square")
        if np.linalg.norm(A, 2) >= 1.0:
            raise ConfigError(f"operator norm of A is {np.linalg.norm(A, 2):.4g} >= 1")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be >= 0")
        object.__setattr__(self, "A", A)

    @property
    def dim(self):
        return self.A.shape[0]

    @property
    def a_norm(self):
        return float(np.linalg.norm(self.A, 2))

    def draw_noise(self, shape, rng):
        if callable(self.noise):
            return np.asarray(self.noise(int(np.prod(shape[:-1])), rng)).reshape(shape)
        if self.noise == "gaussian":
            return self.noise_scale * rng.standard_normal(shape)
        if self.noise == "uniform":
            return self.noise_scale * (2.0 * rng.random(shape) - 1.0)
        raise ConfigError(f"unknown noise {self.noise!r}")

    def noise_mean_norm(self):
        """``E ||eps||`` for the named noise laws."""
        d = self.dim
        if self.noise == "gaussian":
            # chi distribution mean
            return self.noise_scale * math.sqrt(2.0) * math.exp(gammaln((d + 1) / 2) - gammaln(d / 2))
        if self.noise == "uniform" and d == 1:
            return self.noise_scale / 2.0
        raise ConfigError("E||eps|| is only tabulated for gaussian noise and 1-d uniform noise")

    def noise_bound(self):
        """Almost-sure bound ``c`` on ``||eps||``, or None if unbounded."""
        if self.noise == "uniform":
            return self.noise_scale * math.sqrt(self.dim)
        return None


@dataclass(frozen=True)
class BinaryHalfAR:
    """``X_{t+1} = (X_t + eta_{t+1}) / 2`` with ``eta ~ Bernoulli(1/2)``, ``X_0 ~ U[0, 1]``.

    Uniform on [0, 1] is stationary, so the start is exact; the burn-in is
    kept for symmetry with :class:`VectorAR` and does not change the law.
    """

    burn_in: int = DEFAULT_BURN_IN
    dim: int = 1


@dataclass(frozen=True)
class HiddenMarkov:
    """Markov chain on ``{0..K-1}`` with Gaussian emissions ``N(means[j], variance)``.

    Started from the stationary law, so the trajectory is stationary.
    """

    P: np.ndarray
    means: np.ndarray
    variance: float = 1.0
    dim = 1

    def __post_init__(self):
        P = np.atleast_2d(np.asarray(self.P, dtype=float))
        means = np.asarray(self.means, dtype=float).reshape(-1)
        if P.shape[0] != P.shape[1] or P.shape[0] != len(means):
            raise ConfigError("P must be K x K with K emission means")
        if np.any(P < 0) or not np.allclose(P.sum(axis=1), 1.0, atol=1e-12):
            raise ConfigError("rows of P must be probability vectors")
        if not self.variance > 0:
            raise ConfigError("variance must be positive")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "means", means)

    @classmethod
    def sticky(cls, weights, c, means, variance=1.0):
        """``P = c 1 w^T + (1 - c) I``: minorised by ``c w`` in one step, stationary law ``w``."""
        w = np.asarray(weights, dtype=float)
        if not 0 < c <= 1:
            raise ConfigError("need 0 < c <= 1")
        P = c * np.outer(np.ones(len(w)), w) + (1.0 - c) * np.eye(len(w))
        return cls(P, means, variance)

    def stationary(self):
        return hmm_stationary(self.P)


@dataclass(frozen=True)
class RhoEstimate:
    t: int
    value: float
    stderr: float
    n_pairs: int
    signed: float


def hmm_stationary(P):
    """Stationary law ``pi`` of a transition matrix (left eigenvector for 1)."""
    P = np.asarray(P, dtype=float)
    K = len(P)
    # pi (P - I) = 0 together with sum(pi) = 1, solved in least squares
    lhs = np.vstack([(P - np.eye(K)).T, np.ones((1, K))])
    rhs = np.zeros(K + 1)
    rhs[-1] = 1.0
    pi = np.linalg.lstsq(lhs, rhs, rcond=None)[0]
    return np.maximum(pi, 0.0) / np.maximum(pi, 0.0).sum()


def generate_batch(proc, n_traj, n, rng):
    """``n_traj`` independent trajectories of length ``n``, shape ``(n_traj, n, d)``."""
    if n < 1 or n_traj < 1:
        raise ValueError("need n >= 1 and n_traj >= 1")
    if isinstance(proc, IID):
        return as_points(proc.sampler(n_traj * n, rng), proc.dim).reshape(n_traj, n, proc.dim)
    if isinstance(proc, VectorAR):
        return _generate_ar(proc, n_traj, n, rng)
    if isinstance(proc, BinaryHalfAR):
        x = rng.random(n_traj)
        steps = proc.burn_in + n
        eta = rng.integers(0, 2, size=(steps, n_traj)).astype(float)
        out = np.empty((n_traj, n, 1))
        for s in range(steps):
            x = 0.5 * (x + eta[s])
            if s >= proc.burn_in:
                out[:, s - proc.burn_in, 0] = x
        return out
    if isinstance(proc, HiddenMarkov):
        return _generate_hmm(proc, n_traj, n, rng)
    raise ConfigError(f"unknown process {proc!r}")


def _generate_ar(proc, n_traj, n, rng):
    d = proc.dim
    steps = proc.burn_in + n
    noise = proc.draw_noise((steps, n_traj, d), rng)
    x = np.zeros((n_traj, d))
    out = np.empty((n_traj, n, d))
    At = proc.A.T
    for s in range(steps):
        x = x @ At + noise[s]
        if s >= proc.burn_in:
            out[:, s - proc.burn_in] = x
    return out


def _generate_hmm(proc, n_traj, n, rng):
    K = len(proc.P)
    cum = np.cumsum(proc.P, axis=1)
    cum[:, -1] = 1.0
    pi = proc.stationary()
    state = np.searchsorted(np.cumsum(pi), rng.random(n_traj), side="right")
    state = np.minimum(state, K - 1)
    u = rng.random((n, n_traj))
    states = np.empty((n_traj, n), dtype=np.int64)
    for s in range(n):
        if s > 0:
            state = (u[s][:, None] >= cum[state]).sum(axis=1)
            state = np.minimum(state, K - 1)
        states[:, s] = state
    noise = rng.standard_normal((n_traj, n))
    return (proc.means[states] + math.sqrt(proc.variance) * noise)[:, :, None]


def generate(proc, n, rng):
    """A single time-ordered trajectory of length ``n``, shape ``(n, d)``.

    ``rng`` may be a Generator or an integer seed.
    """
    rng = np.random.default_rng(rng)
    return generate_batch(proc, 1, n, rng)[0]


def rho_hat(proc, k, t, n_traj, traj_len, seed):
    """Monte-Carlo estimate of ``rho_t``.

    For each trajectory, the lag term averages ``k(X_s, X_{s+t})`` over all
    ``s`` (pooled, valid under stationarity); the product term averages
    ``k`` over all pairs between this trajectory and an independent one.
    The standard error is over the ``n_traj`` independent replicates.
    """
    if t < 1:
        raise ValueError("lag must be >= 1")
    if traj_len <= t:
        raise ValueError("trajectory must be longer than the lag")
    if n_traj < 2:
        raise ValueError("need at least two trajectories for a standard error")
    rng = np.random.default_rng(seed)
    xs = generate_batch(proc, n_traj, traj_len, rng)
    ys = generate_batch(proc, n_traj, traj_len, rng)
    diffs = np.empty(n_traj)
    for r in range(n_traj):
        x = xs[r]
        lag = _lag_mean(k, x, t)
        prod = k.rowsums(ys[r], x).sum() / (traj_len * traj_len)
        diffs[r] = lag - prod
    mean = float(diffs.mean())
    stderr = float(diffs.std(ddof=1) / math.sqrt(n_traj))
    return RhoEstimate(t, abs(mean), stderr, n_traj * (traj_len - t), mean)


def _lag_mean(k, x, t):
    diff = x[t:] - x[:-t]
    return float(k.profile(np.sqrt(np.einsum("ij,ij->i", diff, diff))).mean())


def ar_rho_bound(a_norm, L, e_eps, t):
    """Envelope ``||A||^t 2 L E||eps|| / (1 - ||A||)`` on ``rho_t`` for a linear AR process."""
    _check_a(a_norm)
    return a_norm**t * 2.0 * L * e_eps / (1.0 - a_norm)


def ar_sigma_gamma(a_norm, L, e_eps, c=None):
    """Dependence constants of a linear AR process with ``L``-Lipschitz kernel profile.

    ``Sigma = 2 ||A|| L E||eps|| / (1 - ||A||)^2`` and, for noise bounded
    by ``c``, ``Gamma = 2 c sqrt(L ||A||) / ((1 - ||A||)(1 - sqrt(||A||)))``.
    ``Gamma`` is None when ``c`` is None.
    """
    _check_a(a_norm)
    sigma = 2.0 * a_norm * L * e_eps / (1.0 - a_norm) ** 2
    if c is None:
        return sigma, None
    gamma = 2.0 * c * math.sqrt(L * a_norm) / ((1.0 - a_norm) * (1.0 - math.sqrt(a_norm)))
    return sigma, gamma


def binary_half_constants(L):
    """Constants for :class:`BinaryHalfAR` (``A = 1/2``, ``eps in {0, 1/2}``).

    ``sigma_general`` applies the linear-AR formula (``E|eps| = 1/4``) and
    equals ``sum_{t>=1} L / 2^t = L``; ``sigma_stated`` is the looser
    ``2L`` quoted for this example. ``gamma = 2 sqrt(L) / (sqrt(2) - 1)``.
    """
    sigma_general, gamma = ar_sigma_gamma(0.5, L, 0.25, c=0.5)
    return {"sigma_general": sigma_general, "sigma_stated": 2.0 * L, "gamma": gamma}


def binary_half_rho_bound(L, t):
    """Envelope ``L / 2^t`` on ``rho_t`` for :class:`BinaryHalfAR`."""
    return L / 2.0**t


def markov_beta_bound(c, r, t):
    """``beta_t <= 2 (1 - c)^{t/r - 1}`` under an ``r``-step minorisation with constant ``c``.

    ``c = 1`` couples in one block, giving 0 for every lag.
    """
    if not 0 < c <= 1 or r < 1 or t < 1:
        raise ValueError("need 0 < c <= 1, r >= 1, t >= 1")
    if c == 1:
        return 0.0
    return 2.0 * (1.0 - c) ** (t / r - 1.0)


def _check_a(a_norm):
    if not 0 <= a_norm < 1:
        raise ConfigError(f"need 0 <= ||A|| < 1, got {a_norm}")


def process_from_config(cfg):
    """Build a process from a config table (``kind`` = iid | ar | binary_half | hmm)."""
    kind = cfg.get("kind", "iid")
    if kind == "iid":
        d = int(cfg.get("d", 1))
        return IID.gaussian(d, cfg.get("mean", 0.0), float(cfg.get("sigma", 1.0)))
    if kind == "ar":
        A = cfg.get("A")
        if A is None:
            A = float(cfg.get("a", 0.5)) * np.eye(int(cfg.get("d", 1)))
        return VectorAR(np.asarray(A, dtype=float), cfg.get("noise", "gaussian"),
                        float(cfg.get("noise_scale", 1.0)),
                        int(cfg.get("burn_in", DEFAULT_BURN_IN)))
    if kind == "binary_half":
        return BinaryHalfAR(int(cfg.get("burn_in", DEFAULT_BURN_IN)))
    if kind == "hmm":
        if "P" in cfg:
            return HiddenMarkov(cfg["P"], cfg["means"], float(cfg.get("variance", 1.0)))
        return HiddenMarkov.sticky(cfg["weights"], float(cfg["c"]), cfg["means"],
                                   float(cfg.get("variance", 1.0)))
    raise ConfigError(f"unknown process kind {kind!r}")
