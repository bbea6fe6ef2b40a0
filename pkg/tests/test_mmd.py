import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmdrobust import dependence
from mmdrobust.kernels import Kernel
from mmdrobust.mmd import (MmdValue, closed_form_gauss_mmd2, crit, empirical_mmd_to_truth,
                           gauss_embedding_inner, gauss_point_embedding, mmd2_ustat_model_term, mmd2_vstat,
                           mmd_to_truth, vstat_stderr)


def naive_vstat(k, x, y):
    # written independently of the library's row-sum machinery
    def mean_k(a, b):
        total = 0.0
        for p in a:
            for q in b:
                total += math.exp(-float(np.sum((p - q) ** 2)) / k.gamma**2)
        return total / (len(a) * len(b))
    return mean_k(x, x) - 2.0 * mean_k(x, y) + mean_k(y, y)


def test_identical_samples_zero(rng):
    x = rng.normal(size=(30, 3))
    assert mmd2_vstat(Kernel(), x, x).squared == pytest.approx(0.0, abs=1e-13)


def test_two_singletons():
    v = mmd2_vstat(Kernel("gaussian", 1.0), [[0.0]], [[1.0]])
    assert v.squared == pytest.approx(2 - 2 * math.exp(-1), abs=1e-15)


def test_matches_naive_double_loop(rng):
    x, y = rng.normal(size=(50, 2)), rng.normal(1, 1, size=(50, 2))
    k = Kernel("gaussian", 1.3)
    assert mmd2_vstat(k, x, y).squared == pytest.approx(naive_vstat(k, x, y), abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        mmd2_vstat(Kernel(), np.zeros((3, 2)), np.zeros((3, 3)))


def test_mmd_value_clamps():
    v = MmdValue.from_squared(-1e-15)
    assert v.squared < 0 and v.value == 0.0


def test_ustat_examples():
    k = Kernel("gaussian", 1.0)
    assert mmd2_ustat_model_term(k, [0.0, 0.0]) == 1.0
    assert mmd2_ustat_model_term(k, [0.0, 1.0]) == pytest.approx(math.exp(-1), abs=1e-15)
    with pytest.raises(ValueError):
        mmd2_ustat_model_term(k, [0.0])


def test_ustat_model_term_monte_carlo():
    k = Kernel("gaussian", math.sqrt(2.0))
    rng = np.random.default_rng(7)
    vals = np.array([mmd2_ustat_model_term(k, rng.normal(size=100)) for _ in range(200)])
    target = gauss_embedding_inner(math.sqrt(2.0), 1.0, 1, 0.0, 0.0)
    assert target == pytest.approx(math.sqrt(2 / 6), rel=1e-14)
    assert abs(vals.mean() - target) <= 3 * vals.std(ddof=1) / math.sqrt(len(vals))


def test_crit_examples(rng):
    k = Kernel("gaussian", 1.0)
    assert crit(k, [[0.4], [0.4]], [[0.4]]) == pytest.approx(-1.0, abs=1e-15)
    x = rng.normal(size=(20, 2))
    # same points for model and data: U-term minus twice the V mixed term
    K = k.gram(x, x)
    expected = (K.sum() - 20) / (20 * 19) - 2 * K.mean()
    assert crit(k, x, x) == pytest.approx(expected, abs=1e-13)


def test_crit_equal_distributions():
    k = Kernel("gaussian", 1.0)
    rng = np.random.default_rng(3)
    vals = []
    for _ in range(100):
        x, y = rng.normal(size=200), rng.normal(size=200)
        vals.append(crit(k, y, x) + k.self_rowsums(x).sum() / 200**2)
    vals = np.array(vals)
    assert abs(vals.mean()) <= 3 * vals.std(ddof=1) / math.sqrt(len(vals)) + 1.0 / 200


def test_closed_form_examples():
    assert closed_form_gauss_mmd2(1.3, 0.7, 3, [1, 2, 3], [1, 2, 3]) == 0.0
    v = closed_form_gauss_mmd2(2.0, 1.0, 1, 1.0, 0.0)
    assert v == pytest.approx(2 * math.sqrt(0.5) * (1 - math.exp(-1 / 8)), abs=1e-15)
    assert v == pytest.approx(0.1661745, abs=1e-6)


def test_closed_form_vs_monte_carlo():
    rng = np.random.default_rng(11)
    gamma, d = math.sqrt(2.0), 2
    t0, t1 = np.zeros(d), np.array([0.6, 0.8])
    x = t0 + rng.normal(size=(5000, d))
    y = t1 + rng.normal(size=(5000, d))
    k = Kernel("gaussian", gamma)
    est = mmd2_vstat(k, x, y).squared
    # V-statistic bias: the diagonals add (1 - E k)/n per sample
    bias = 2 * (1 - gauss_embedding_inner(gamma, 1.0, d, t0, t0)) / 5000
    se = vstat_stderr(k, x, y)
    assert abs(est - bias - closed_form_gauss_mmd2(gamma, 1.0, d, t0, t1)) <= 3 * se


def test_ustat_unbiased_for_gaussian_pairs():
    rng = np.random.default_rng(5)
    k = Kernel("gaussian", 1.0)
    target = closed_form_gauss_mmd2(1.0, 1.0, 1, 0.0, 0.5)
    vals = []
    for _ in range(500):
        x, y = rng.normal(size=60), 0.5 + rng.normal(size=60)
        vals.append(mmd2_ustat_model_term(k, x) + mmd2_ustat_model_term(k, y)
                    - 2 * k.rowsums(x, y).sum() / 3600)
    vals = np.array(vals)
    assert abs(vals.mean() - target) <= 4 * vals.std(ddof=1) / math.sqrt(500)


def test_single_point_against_itself():
    k = Kernel("gaussian", 1.0)
    assert mmd_to_truth(k, [[2.0]], [[2.0]], 1.0).value == 0.0


def test_mmd_to_truth_matches_exact_embedding():
    # P0 = N(0, 1), Gaussian kernel: every term involving P0 has a closed form
    rng = np.random.default_rng(6)
    gamma = 1.0
    k = Kernel("gaussian", gamma)
    x = rng.normal(size=50)
    exact = (k.gram(x, x).mean() - 2 * gauss_point_embedding(gamma, 1.0, 1, x, 0.0).mean()
             + gauss_embedding_inner(gamma, 1.0, 1, 0.0, 0.0))
    proxy = rng.normal(size=200000)
    self_term = gauss_embedding_inner(gamma, 1.0, 1, 0.0, 0.0)
    assert mmd_to_truth(k, x, proxy, self_term).squared == pytest.approx(exact, abs=2e-3)
    assert exact > 0.005


def test_mmd_to_truth_default_is_distance_to_holdout(rng):
    k = Kernel("laplace", 0.7)
    x, t = rng.normal(size=(30, 2)), rng.normal(size=(600, 2))
    assert mmd_to_truth(k, x, t).squared == pytest.approx(mmd2_vstat(k, x, t).squared, abs=1e-12)


def test_empirical_rate_iid():
    k = Kernel("gaussian", 1.0)
    rng = np.random.default_rng(2)
    mean, se, _ = empirical_mmd_to_truth(k, lambda c, r: r.normal(size=c), 100, 50, rng)
    # E D^2 = (1 - <mu, mu>) / n, so the mean sits just below its square root
    rms = math.sqrt((1 - gauss_embedding_inner(1.0, 1.0, 1, 0.0, 0.0)) / 100)
    # the hold-out proxy (N = 20n) can add at most about 1/sqrt(N)
    assert 0.6 * rms <= mean <= rms + 1 / math.sqrt(2000) + 3 * se


def test_empirical_rate_ar():
    k = Kernel("gaussian", 1.0)
    proc = dependence.VectorAR(np.array([[0.5]]))
    sd = 1 / math.sqrt(1 - 0.25)
    sigma, _ = dependence.ar_sigma_gamma(0.5, k.lipschitz, proc.noise_mean_norm())
    rng = np.random.default_rng(4)
    mean, se, _ = empirical_mmd_to_truth(
        k, lambda c, r: dependence.generate(proc, c, r), 100, 40, rng,
        truth_sampler=lambda c, r: sd * r.normal(size=c))
    assert mean <= math.sqrt((1 + 2 * sigma) / 100) + 1 / math.sqrt(2000) + 3 * se


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_triangle_inequality(seed):
    rng = np.random.default_rng(seed)
    k = Kernel("gaussian", rng.uniform(0.3, 3))
    a, b, c = (rng.normal(rng.normal(), 1, size=(rng.integers(1, 30), 2)) for _ in range(3))
    ac, ab, bc = (mmd2_vstat(k, p, q).value for p, q in ((a, c), (a, b), (b, c)))
    assert ac <= ab + bc + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_vstat_nonnegative_and_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    k = Kernel(rng.choice(["gaussian", "laplace"]), rng.uniform(0.3, 3))
    x, y = rng.normal(size=(rng.integers(1, 60), 3)), rng.normal(size=(rng.integers(1, 60), 3))
    v = mmd2_vstat(k, x, y).squared
    assert v >= -1e-12
    w = mmd2_vstat(k, rng.permutation(x), rng.permutation(y)).squared
    assert w == pytest.approx(v, abs=1e-9)
