"""Pure NumPy implementation of the Gram row-sum kernels.

Mirrors the compiled ``_core`` module exactly in signature and semantics;
used when the extension is not built or ``MMDROBUST_PURE_PYTHON`` is set.
"""

import numpy as np

# Rows per block when materialising distance matrices.
_BLOCK = 512


def _kernel_from_sq(sq, gamma, family):
    if family == 0:
        return np.exp(-sq / (gamma * gamma))
    return np.exp(-np.sqrt(sq) / gamma)


def _sq_dists(a, b):
    sq = (
        np.einsum("ij,ij->i", a, a)[:, None]
        + np.einsum("ij,ij->i", b, b)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.maximum(sq, 0.0, out=sq)


def _rowsums(ref, query, gamma, family, self_pairs):
    ref = np.ascontiguousarray(ref, dtype=float)
    query = np.ascontiguousarray(query, dtype=float)
    if ref.ndim != 2 or query.ndim != 2 or ref.shape[1] != query.shape[1]:
        raise ValueError("dimension mismatch")
    out = np.empty(query.shape[0])
    for start in range(0, query.shape[0], _BLOCK):
        block = query[start:start + _BLOCK]
        sq = _sq_dists(ref, block)
        if self_pairs:
            # expanded-norm distances leave ~1e-16 on the diagonal
            idx = np.arange(block.shape[0])
            sq[start + idx, idx] = 0.0
        out[start:start + block.shape[0]] = _kernel_from_sq(
            sq, gamma, family).sum(axis=0)
    return out


def cross_rowsums(ref, query, gamma, family):
    """out[j] = sum_i k(ref[i], query[j])."""
    return _rowsums(ref, query, gamma, family, self_pairs=False)


def self_rowsums(pts, gamma, family):
    """out[j] = sum_l k(pts[j], pts[l]), diagonal (k = 1) included."""
    return _rowsums(pts, pts, gamma, family, self_pairs=True)
