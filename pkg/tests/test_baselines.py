import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmdrobust.baselines import (coordinatewise_median, em_mixture, geometric_median,
                                 mae_density, mean_estimator, median_of_means, sqrt_mse)


def test_mean_and_median_examples():
    assert mean_estimator([[-2.0], [2.0]])[0] == 0.0
    np.testing.assert_array_equal(mean_estimator([[1.0, 2.0]]), [1.0, 2.0])
    assert coordinatewise_median([[1.0], [2.0], [3.0]])[0] == 2.0
    assert coordinatewise_median([[1.0], [2.0], [3.0], [4.0]])[0] == 2.5


def test_geometric_median_examples():
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    np.testing.assert_allclose(geometric_median(tri), tri.mean(axis=0), atol=1e-7)
    assert geometric_median(np.array([[0.0]] * 5 + [[10.0]]))[0] == pytest.approx(0.0, abs=1e-9)


def test_geometric_median_one_dimensional_brute_force(rng):
    x = rng.normal(size=(51, 1))
    grid = np.sort(x[:, 0])
    obj = [np.abs(x[:, 0] - g).sum() for g in grid]
    assert geometric_median(x)[0] == pytest.approx(grid[int(np.argmin(obj))], abs=1e-6)


def test_geometric_median_beats_coordinatewise(rng):
    x = rng.standard_cauchy(size=(200, 3))
    obj = lambda m: np.linalg.norm(x - m, axis=1).sum()
    assert obj(geometric_median(x)) <= obj(coordinatewise_median(x)) + 1e-9


def test_median_of_means_limits(rng):
    x = rng.normal(size=(30, 2))
    np.testing.assert_allclose(median_of_means(x, 1, rng), x.mean(axis=0), rtol=1e-14)
    np.testing.assert_allclose(median_of_means(x, 30, rng), np.median(x, axis=0), rtol=1e-14)
    with pytest.raises(ValueError):
        median_of_means(x, 31, rng)


def test_median_of_means_deviation():
    rng = np.random.default_rng(0)
    errs = [abs(median_of_means(rng.normal(size=(10**4, 1)), 20, rng)[0]) for _ in range(100)]
    assert max(errs) <= 5 / math.sqrt(1e4)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-100, 100))
def test_translation_equivariance(seed, c):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(int(rng.integers(1, 40)), 2))
    for est in (mean_estimator, coordinatewise_median):
        np.testing.assert_allclose(est(x + c), est(x) + c, atol=1e-9)
    np.testing.assert_allclose(median_of_means(x + c, None, np.random.default_rng(1)),
                               median_of_means(x, None, np.random.default_rng(1)) + c, atol=1e-9)
    np.testing.assert_allclose(geometric_median(x + c), geometric_median(x) + c, atol=1e-6)


def test_em_single_component(rng):
    x = rng.normal(1.3, 1.0, 500)
    fit = em_mixture(x, k_components=1, restarts=2, rng=rng)
    assert fit.means[0] == pytest.approx(x.mean(), abs=1e-10)
    assert fit.weights[0] == 1.0


def test_em_recovers_separated_means():
    rng = np.random.default_rng(3)
    truth = np.array([-6.0, 0.0, 6.0])
    x = truth[rng.choice(3, size=10**4, p=[0.3, 0.3, 0.4])] + rng.normal(size=10**4)
    fit = em_mixture(x, rng=rng)
    np.testing.assert_allclose(fit.means, truth, atol=0.1)
    np.testing.assert_allclose(fit.weights, [0.3, 0.3, 0.4], atol=0.02)
    assert np.all(np.diff(fit.history) >= -1e-9)


def test_mae_density_examples(rng):
    pdf = lambda z: np.exp(-z**2 / 2) / math.sqrt(2 * math.pi)
    assert mae_density(pdf, pdf, lambda N, r: r.normal(size=N), 100, rng) == 0.0
    u1 = lambda z: ((z >= 0) & (z <= 1)).astype(float)
    u2 = lambda z: ((z >= 2) & (z <= 3)).astype(float)
    assert mae_density(u1, u2, lambda N, r: r.random(N), 100, rng) == 1.0


def test_sqrt_mse_examples():
    assert sqrt_mse([[1.0, 1.0]], [1.0, 1.0]) == 0.0
    assert sqrt_mse([[2.0, 0.0]], [0.0, 0.0]) == 2.0
    assert sqrt_mse([[0.0], [2.0]], [0.0]) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert sqrt_mse([[2.0, 0.0]], [0.0, 0.0], per_coordinate=True) == pytest.approx(math.sqrt(2))
    with pytest.raises(ValueError):
        sqrt_mse([], [0.0])
