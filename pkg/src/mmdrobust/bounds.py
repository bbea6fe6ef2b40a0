"""Closed-form finite-sample guarantees for the minimum-MMD estimator.

Unless stated otherwise a bound controls ``D_k(P_{theta_hat}, P0)`` minus
the best achievable model distance. Parameter bounds control squared
errors ``||theta_hat - theta0||^2``. Whenever a formula leaves its domain
(log of a nonpositive number, singular Gram matrix) the value is
``+inf`` and the report is flagged vacuous.

Symbols: ``n`` sample size, ``Sigma`` summed lag covariances, ``Gamma``
the concentration constant for dependent data, ``delta`` the failure
probability, ``eps`` the contamination rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .models import DictionaryMixture

MMD_DIAMETER = 2.0
CAUCHY_CONSTANT = 96.0
CAUCHY_CONSTANT_ALT = 128.0


@dataclass
class BoundReport:
    bound: str
    inputs: dict
    value: float
    vacuous: bool = False
    note: str = ""
    uninformative: bool = field(init=False)

    def __post_init__(self):
        if self.vacuous:
            self.value = math.inf
        # D_k <= 2 when |k| <= 1, so larger values say nothing
        self.uninformative = self.value > MMD_DIAMETER


def _root_n(n):
    return math.sqrt(n)


def _dev(n, sigma):
    return math.sqrt((1.0 + 2.0 * sigma) / n)


def _log_term(delta):
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    return math.sqrt(2.0 * math.log(1.0 / delta))


def bound_expectation(n, sigma=0.0):
    """``2 sqrt((1 + 2 Sigma) / n)`` on the expected excess distance."""
    return 2.0 * _dev(n, sigma)


def bound_highprob(n, sigma=0.0, gamma=0.0, delta=0.05):
    """``2 (sqrt(1 + 2 Sigma) + (1 + Gamma) sqrt(2 log(1/delta))) / sqrt(n)``, w.p. ``1 - delta``."""
    return 2.0 * (math.sqrt(1.0 + 2.0 * sigma) + (1.0 + gamma) * _log_term(delta)) / _root_n(n)


def bound_huber(n, sigma, eps):
    """``4 eps + 2 sqrt((1 + 2 Sigma) / n)`` under Huber contamination, in expectation."""
    return 4.0 * eps + 2.0 * _dev(n, sigma)


def bound_huber_hp(n, sigma, gamma, eps, delta):
    """High-probability Huber version ``2 (2 eps + (sqrt(1+2 Sigma) + (1+Gamma) sqrt(2 log 1/delta)) / sqrt(n))``."""
    return 2.0 * (2.0 * eps + (math.sqrt(1.0 + 2.0 * sigma) + (1.0 + gamma) * _log_term(delta))
                  / _root_n(n))


def bound_adversarial(n, sigma, eps):
    """``4 eps + 4 sqrt((1 + 2 Sigma) / n)`` when up to ``eps n`` points are arbitrary."""
    return 4.0 * eps + 4.0 * _dev(n, sigma)


def gauss_param_log_argument(sigma, d, gamma, eps, n, delta):
    r = eps + (1.0 + _log_term(delta)) / _root_n(n)
    return 1.0 - 8.0 * math.exp(2.0 * sigma**2 * d / gamma**2) * r * r


def bound_gauss_param(sigma, d, gamma, eps, n, delta):
    """Squared-error bound for the Gaussian mean, adversarial contamination.

    ``-(4 s^2 + g^2) log(1 - 8 e^{2 s^2 d / g^2} (eps + (1 + sqrt(2 log 1/delta)) / sqrt(n))^2)``;
    ``g = s sqrt(2d)`` gives ``-2 s^2 (d + 2) log(1 - 8e (...)^2)``.
    Returns ``inf`` when the log argument is not positive.
    """
    arg = gauss_param_log_argument(sigma, d, gamma, eps, n, delta)
    if arg <= 0.0:
        return math.inf
    return -(4.0 * sigma**2 + gamma**2) * math.log(arg)


def bound_cauchy_param(eps, n, delta, constant=CAUCHY_CONSTANT):
    """Squared-error bound for the Cauchy location with ``gamma = 2``.

    ``4 (1 / (1 - C pi q) - 1)`` with ``q = eps^2 + (2 + 4 log(1/delta)) / n``,
    which is ``~ 4 C pi q`` for small ``q``. The default ``C = 96``; the
    alternative constant 128 gives the small-``q`` form ``512 pi q``.
    Returns ``inf`` once ``C pi q >= 1``.
    """
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    q = eps**2 + (2.0 + 4.0 * math.log(1.0 / delta)) / n
    x = constant * math.pi * q
    if x >= 1.0:
        return math.inf
    return 4.0 * (1.0 / (1.0 - x) - 1.0)


def bound_hmm(n, c, r):
    """``2 sqrt((1 + (1-c)^{1/r - 1} (3 + c)) / (n [1 - (1-c)^{1/r}]))`` for hidden Markov data.

    ``c = 1`` (independent blocks) gives ``2 / sqrt(n)``.
    """
    if not 0 < c <= 1 or r < 1:
        raise ValueError("need 0 < c <= 1 and r >= 1")
    if c == 1:
        return 2.0 / _root_n(n)
    rho = 1.0 - c
    return 2.0 * math.sqrt((1.0 + rho ** (1.0 / r - 1.0) * (3.0 + c))
                           / (n * (1.0 - rho ** (1.0 / r))))


def bound_dictionary_param(n, delta, lambda_min):
    """``2 (1 + sqrt(2 log 1/delta)) / (lambda_min sqrt(n))`` on ``||theta_hat - theta0||^2``."""
    if lambda_min <= 1e-14:
        return math.inf
    return 2.0 * (1.0 + _log_term(delta)) / (lambda_min * _root_n(n))


def bound_sgd(D, grad_bound, T):
    """Optimisation error ``D M / sqrt(T)`` of averaged projected SGD with ``eta = D/(M sqrt T)``."""
    return D * grad_bound / math.sqrt(T)


def bound_sgd_full(D, grad_bound, T, n, sigma, inf_term=0.0):
    """``inf_theta D_k(P_theta, P0) + 3 sqrt((1 + 2 Sigma)/n) + sqrt(D M / sqrt(T))``."""
    return inf_term + 3.0 * _dev(n, sigma) + math.sqrt(bound_sgd(D, grad_bound, T))


def dictionary_sgd_bound(n_components, T, diameter=1.0):
    """SGD term for the dictionary model, ``diameter * 2 sqrt(D) / sqrt(T)``.

    The gradient estimate satisfies ``E||g||^2 <= 4D``. With diameter 1
    this is ``2 sqrt(D / T)``; the simplex's Euclidean diameter is
    ``sqrt(2)``, which adds that factor.
    """
    return bound_sgd(diameter, 2.0 * math.sqrt(n_components), T)


def gram_matrix_gaussian(means, variance, gamma):
    """Closed-form Gram matrix of kernel mean embeddings of ``N(m_j, variance I)``."""
    return DictionaryMixture(means, variance).embedding_gram(gamma)


def gram_matrix_mc(samplers, k, count, rng):
    """Monte-Carlo Gram matrix ``E k(X, Y)``, ``X ~ Phi_i``, ``Y ~ Phi_j``.

    ``samplers`` are callables ``(count, rng) -> array``; off-diagonal
    entries average ``k`` over all cross pairs, diagonal ones over the
    distinct pairs of a single sample.
    """
    draws = [np.asarray(s(count, rng), dtype=float) for s in samplers]
    D = len(draws)
    G = np.empty((D, D))
    for i in range(D):
        G[i, i] = (k.self_rowsums(draws[i]).sum() - count) / (count * (count - 1))
        for j in range(i + 1, D):
            G[i, j] = G[j, i] = k.rowsums(draws[i], draws[j]).sum() / count**2
    return G


def lambda_min(G):
    return float(np.linalg.eigvalsh(np.asarray(G, dtype=float))[0])


BOUNDS = {
    "expectation": (bound_expectation, ("n", "sigma")),
    "highprob": (bound_highprob, ("n", "sigma", "gamma", "delta")),
    "huber": (bound_huber, ("n", "sigma", "eps")),
    "huber_hp": (bound_huber_hp, ("n", "sigma", "gamma", "eps", "delta")),
    "adversarial": (bound_adversarial, ("n", "sigma", "eps")),
    "gauss_param": (bound_gauss_param, ("sigma", "d", "gamma", "eps", "n", "delta")),
    "cauchy_param": (bound_cauchy_param, ("eps", "n", "delta")),
    "hmm": (bound_hmm, ("n", "c", "r")),
    "dictionary_param": (bound_dictionary_param, ("n", "delta", "lambda_min")),
    "sgd": (bound_sgd, ("D", "grad_bound", "T")),
}

_NOTES = {
    "cauchy_param": ("constant 96 by default; the alternative 128 matches the "
                     "small-q form 512 pi q"),
}


def report(name, **inputs):
    """Evaluate bound ``name`` into a :class:`BoundReport`."""
    if name not in BOUNDS:
        raise ValueError(f"unknown bound {name!r}")
    fn, args = BOUNDS[name]
    missing = [a for a in args if a not in inputs]
    if missing:
        raise ValueError(f"bound {name!r} needs {missing}")
    extra = {k: v for k, v in inputs.items() if k not in args}
    value = fn(*(inputs[a] for a in args), **extra)
    return BoundReport(name, dict(inputs), value, vacuous=math.isinf(value),
                       note=_NOTES.get(name, ""))
