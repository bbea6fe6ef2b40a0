"""Huber-mixture and adversarial-replacement contamination."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .kernels import as_points


@dataclass(frozen=True)
class GaussianShift:
    """``N(a 1, s^2 I_d)``."""

    a: float
    sigma: float = 1.0

    def sample(self, count, d, rng):
        return self.a + self.sigma * rng.standard_normal((count, d))

    def label(self):
        return f"N({self.a:g})"


@dataclass(frozen=True)
class CauchyCoordinatewise:
    """Independent ``C(loc, scale)`` coordinates."""

    loc: float = 0.5
    scale: float = 1.0

    def sample(self, count, d, rng):
        return self.loc + self.scale * np.tan(math.pi * (rng.random((count, d)) - 0.5))

    def label(self):
        return f"C({self.loc:g})"


@dataclass(frozen=True)
class Dirac:
    """Point mass at ``value * 1`` (scalar) or at an explicit vector."""

    value: object = 1.0

    def point(self, d):
        v = np.asarray(self.value, dtype=float)
        return np.broadcast_to(v, (d,)) if v.ndim == 0 else v.reshape(d)

    def sample(self, count, d, rng):
        return np.tile(self.point(d), (count, 1))

    def label(self):
        v = np.asarray(self.value)
        return f"delta({self.value:g})" if v.ndim == 0 else "delta(vector)"


def worst_case_sphere(theta0):
    """Dirac at ``theta0 + 1``, at distance ``sqrt(d)`` from the true mean."""
    return Dirac(np.asarray(theta0, dtype=float) + 1.0)


@dataclass(frozen=True)
class ContaminationSpec:
    """``kind`` is ``none``, ``huber`` or ``adversarial``; ``q`` supplies outliers."""

    kind: str = "none"
    epsilon: float = 0.0
    q: Optional[object] = None

    def __post_init__(self):
        if self.kind not in ("none", "huber", "adversarial"):
            raise ConfigError(f"unknown contamination kind {self.kind!r}")
        if not 0.0 <= self.epsilon < 0.5:
            raise ConfigError(f"epsilon must lie in [0, 1/2), got {self.epsilon}")
        if self.kind != "none" and self.epsilon > 0 and self.q is None:
            raise ConfigError("contamination needs an outlier distribution q")


def adversarial_count(n, epsilon):
    """``floor(epsilon n)``, robust to representation error such as ``0.1 * 10``."""
    return int(math.floor(epsilon * n + 1e-9))


def contaminate(clean, spec, rng):
    """Apply ``spec`` to ``clean``; returns ``(data, outlier_indices)``.

    Huber replaces each point independently with probability epsilon. The
    uniforms and the candidate outliers are drawn for every point whatever
    epsilon is, so with the same generator state the outlier sets are
    nested in epsilon (common random numbers across an epsilon sweep).
    Adversarial replaces a uniformly random subset of exactly
    ``floor(epsilon n)`` points. Points not in the returned index set are
    copied bit for bit.
    """
    clean = as_points(clean)
    n, d = clean.shape
    data = clean.copy()
    if spec.kind == "none" or spec.epsilon == 0.0:
        return data, np.empty(0, dtype=np.int64)
    if spec.kind == "huber":
        u = rng.random(n)
        candidates = spec.q.sample(n, d, rng)
        idx = np.nonzero(u < spec.epsilon)[0]
        data[idx] = candidates[idx]
        return data, idx
    count = adversarial_count(n, spec.epsilon)
    idx = np.sort(rng.permutation(n)[:count])
    data[idx] = spec.q.sample(count, d, rng)
    return data, idx


def q_from_config(cfg):
    """``{"kind": "gaussian"|"cauchy"|"dirac", ...}`` to an outlier distribution."""
    kind = cfg.get("kind")
    if kind == "gaussian":
        return GaussianShift(float(cfg["a"]), float(cfg.get("sigma", 1.0)))
    if kind == "cauchy":
        return CauchyCoordinatewise(float(cfg.get("loc", 0.5)), float(cfg.get("scale", 1.0)))
    if kind == "dirac":
        return Dirac(cfg.get("value", 1.0))
    raise ConfigError(f"unknown outlier distribution {kind!r}")


def spec_from_config(cfg):
    if not cfg:
        return ContaminationSpec()
    q = q_from_config(cfg["q"]) if "q" in cfg else None
    return ContaminationSpec(cfg.get("kind", "none"), float(cfg.get("epsilon", 0.0)), q)
