import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmdrobust import _backend, _core_py
from mmdrobust.kernels import Kernel

try:
    from mmdrobust import _core
except ImportError:  # pragma: no cover - extension not built
    _core = None

needs_ext = pytest.mark.skipif(_core is None, reason="compiled extension not built")


def brute_rowsums(ref, query, k):
    return np.array([sum(k(r, q) for r in ref) for q in query])


@pytest.mark.parametrize("family", ["gaussian", "laplace"])
@pytest.mark.parametrize("d", [1, 2, 3, 4, 10])
def test_fallback_matches_brute_force(family, d, rng):
    k = Kernel(family, 1.5)
    ref, query = rng.normal(size=(17, d)), rng.normal(size=(9, d))
    got = _core_py.cross_rowsums(ref, query, k.gamma, k.code)
    np.testing.assert_allclose(got, brute_rowsums(ref, query, k), rtol=1e-12)
    got = _core_py.self_rowsums(ref, k.gamma, k.code)
    np.testing.assert_allclose(got, brute_rowsums(ref, ref, k), rtol=1e-12)


@needs_ext
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 700), st.integers(1, 300), st.sampled_from([1, 2, 3, 4, 7, 10, 64]),
       st.sampled_from([0, 1]), st.integers(0, 2**32 - 1))
def test_extension_matches_fallback(n, m, d, family, seed):
    rng = np.random.default_rng(seed)
    ref, query = rng.normal(size=(n, d)), rng.normal(size=(m, d))
    gamma = float(np.sqrt(d))
    np.testing.assert_allclose(_core.cross_rowsums(ref, query, gamma, family),
                               _core_py.cross_rowsums(ref, query, gamma, family),
                               rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(_core.self_rowsums(ref, gamma, family),
                               _core_py.self_rowsums(ref, gamma, family),
                               rtol=1e-10, atol=1e-10)


@needs_ext
def test_extension_self_diagonal_exact():
    # repeated points: diagonal must contribute exactly 1, duplicates exactly 1
    pts = np.repeat(np.arange(5.0)[:, None] * 100.0, 3, axis=0) @ np.ones((1, 6))
    np.testing.assert_array_equal(_core.self_rowsums(np.ascontiguousarray(pts), 1.0, 0),
                                  np.full(15, 3.0))


def test_empty_inputs():
    out = _backend.cross_rowsums(np.zeros((0, 2)), np.zeros((3, 2)), 1.0, 0)
    np.testing.assert_array_equal(out, np.zeros(3))


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        _backend.cross_rowsums(np.zeros((2, 2)), np.zeros((3, 3)), 1.0, 0)


def test_env_var_forces_fallback():
    env = dict(os.environ, MMDROBUST_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import mmdrobust; print(mmdrobust.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
