import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmdrobust.contamination import (CauchyCoordinatewise, ContaminationSpec, Dirac,
                                     GaussianShift, adversarial_count, contaminate,
                                     spec_from_config, worst_case_sphere)
from mmdrobust.errors import ConfigError


def test_epsilon_zero_is_identity(rng):
    clean = rng.normal(size=(20, 3))
    data, idx = contaminate(clean, ContaminationSpec("huber", 0.0, Dirac(5.0)), rng)
    assert np.array_equal(data, clean) and idx.size == 0
    assert data is not clean


def test_adversarial_single_outlier(rng):
    clean = rng.normal(size=(10, 1))
    data, idx = contaminate(clean, ContaminationSpec("adversarial", 0.1, Dirac(100.0)), rng)
    assert np.sum(data == 100.0) == 1 and list(idx) == list(np.nonzero(data[:, 0] == 100.0)[0])


def test_huber_rate():
    rng = np.random.default_rng(0)
    clean = np.zeros((10**4, 1))
    _, idx = contaminate(clean, ContaminationSpec("huber", 0.2, GaussianShift(5.0)), rng)
    assert abs(len(idx) / 1e4 - 0.2) <= 4 * math.sqrt(0.2 * 0.8 / 1e4)


def test_huber_nested_in_epsilon():
    clean = np.random.default_rng(1).normal(size=(500, 2))
    sets = []
    for eps in (0.05, 0.1, 0.2):
        data, idx = contaminate(clean, ContaminationSpec("huber", eps, GaussianShift(5.0)),
                                np.random.default_rng(2))
        sets.append((set(idx), data))
    assert sets[0][0] <= sets[1][0] <= sets[2][0]
    common = sorted(sets[0][0])
    assert np.array_equal(sets[0][1][common], sets[2][1][common])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 300), st.floats(0, 0.49), st.integers(0, 2**32 - 1),
       st.sampled_from(["huber", "adversarial"]))
def test_untouched_points_bit_identical(n, eps, seed, kind):
    rng = np.random.default_rng(seed)
    clean = rng.normal(size=(n, 2))
    data, idx = contaminate(clean, ContaminationSpec(kind, eps, Dirac(7.0)), rng)
    keep = np.setdiff1d(np.arange(n), idx)
    assert np.array_equal(data[keep], clean[keep])
    if kind == "adversarial":
        assert len(idx) == math.floor(eps * n + 1e-9)


def test_adversarial_count_float_representation():
    assert adversarial_count(10, 0.1) == 1
    assert adversarial_count(500, 0.002) == 1
    assert adversarial_count(9, 0.1) == 0


def test_outlier_laws(rng):
    x = CauchyCoordinatewise().sample(10**4, 2, rng)
    assert abs(np.median(x) - 0.5) < 0.05
    assert np.all(Dirac(3.0).sample(4, 3, rng) == 3.0)
    assert abs(GaussianShift(5.0).sample(10**4, 1, rng).mean() - 5.0) < 0.05
    wc = worst_case_sphere([1.0, 2.0]).sample(1, 2, rng)[0]
    assert np.linalg.norm(wc - [1.0, 2.0]) == pytest.approx(math.sqrt(2))


def test_spec_validation():
    with pytest.raises(ConfigError):
        ContaminationSpec("huber", 0.5, Dirac())
    with pytest.raises(ConfigError):
        ContaminationSpec("huber", 0.1)
    with pytest.raises(ConfigError):
        ContaminationSpec("swap", 0.1, Dirac())
    spec = spec_from_config({"kind": "huber", "epsilon": 0.2, "q": {"kind": "gaussian", "a": 5}})
    assert spec.q == GaussianShift(5.0)
