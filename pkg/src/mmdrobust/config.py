"""TOML configuration loading and model construction."""

from __future__ import annotations

import sys

import numpy as np

from .errors import ConfigError
from .models import CauchyLocation, DictionaryMixture, GaussianLocation, UniformTranslation

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def load_config(path):
    with open(path, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc


def model_from_config(cfg):
    """``[model]`` table: ``family`` = gaussian | cauchy | uniform | dictionary."""
    if not cfg or "family" not in cfg:
        raise ConfigError("model table needs a 'family'")
    family = cfg["family"]
    if family == "gaussian":
        return GaussianLocation(float(cfg.get("sigma", 1.0)), int(cfg.get("d", 1)))
    if family == "cauchy":
        return CauchyLocation(float(cfg.get("scale", 1.0)))
    if family == "uniform":
        return UniformTranslation(float(cfg.get("width", 1.0)))
    if family == "dictionary":
        if "means" in cfg:
            return DictionaryMixture(np.asarray(cfg["means"], dtype=float),
                                     float(cfg.get("variance", 1.0)))
        return DictionaryMixture.gaussian_grid(float(cfg.get("mean_lo", -5.0)),
                                               float(cfg.get("mean_hi", 5.0)),
                                               float(cfg.get("step", 0.02)),
                                               float(cfg.get("variance", 1.0)))
    raise ConfigError(f"unknown model family {family!r}")
