# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Gram-sum kernels.

Both entry points return, for every point of a "query" set, the sum of
kernel values against a "reference" set. These row sums are the only
quantities the MMD criterion and its stochastic gradient need, so the
full Gram matrix is never materialised.

Family codes: 0 = Gaussian ``exp(-r^2/g^2)``, 1 = Laplace ``exp(-r/g)``.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

# direct path: queries per block x references per tile (fits in L1)
DEF QB = 8
DEF TILE = 256
# BLAS path, used above DIRECT_MAX_DIM: block sizes for the dgemm tiles
DEF DIRECT_MAX_DIM = 3
DEF GQB = 64
DEF GTILE = 512
# square tiles for the symmetric self-sum path
DEF SB = 128


cdef double _sum_kernel(double* buf, Py_ssize_t n, double inv_scale,
                        int family) noexcept nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0
    if family == 0:
        for i in range(n):
            buf[i] = exp(-buf[i] * inv_scale)
    else:
        for i in range(n):
            buf[i] = exp(-sqrt(buf[i]) * inv_scale)
    for i in range(n):
        acc += buf[i]
    return acc


cdef void _rowsums(const double[:, ::1] ref_t, const double[:, ::1] query,
                   double inv_scale, int family, double* buf,
                   double* out) noexcept nogil:
    cdef Py_ssize_t d = ref_t.shape[0]
    cdef Py_ssize_t n = ref_t.shape[1]
    cdef Py_ssize_t m = query.shape[0]
    cdef Py_ssize_t j0, t0, nb, nt, b, i, k
    cdef double q, diff
    cdef const double* row
    cdef double* bb
    for j0 in range(0, m, QB):
        nb = min(QB, m - j0)
        for b in range(nb):
            out[j0 + b] = 0.0
        # tiles are visited in index order, so sums are reproducible
        for t0 in range(0, n, TILE):
            nt = min(TILE, n - t0)
            for i in range(nb * TILE):
                buf[i] = 0.0
            for k in range(d):
                row = &ref_t[k, t0]
                for b in range(nb):
                    q = query[j0 + b, k]
                    bb = &buf[b * TILE]
                    for i in range(nt):
                        diff = row[i] - q
                        bb[i] += diff * diff
            for b in range(nb):
                out[j0 + b] += _sum_kernel(&buf[b * TILE], nt, inv_scale, family)


cdef void _rowsums_blas(const double[:, ::1] ref, const double[:, ::1] query,
                        const double* ref_sq, const double* query_sq,
                        double inv_scale, int family, bint self_pairs,
                        double* buf, double* out) noexcept nogil:
    # squared distances as |x|^2 + |y|^2 - 2<x, y>, inner products by dgemm
    cdef int d = <int>ref.shape[1]
    cdef Py_ssize_t n = ref.shape[0]
    cdef Py_ssize_t m = query.shape[0]
    cdef Py_ssize_t j0, t0, b, i
    cdef int nb, nt
    cdef double alpha = 1.0, beta = 0.0, qn, v
    cdef double* col
    cdef const double* rsq
    cdef char ta = b'T', tb = b'N'
    for j0 in range(0, m, GQB):
        nb = <int>min(GQB, m - j0)
        for b in range(nb):
            out[j0 + b] = 0.0
        for t0 in range(0, n, GTILE):
            nt = <int>min(GTILE, n - t0)
            # row-major (nt x d) is column-major (d x nt): C = A^T B, C is nt x nb
            dgemm(&ta, &tb, &nt, &nb, &d, &alpha, <double*>&ref[t0, 0], &d,
                  <double*>&query[j0, 0], &d, &beta, buf, &nt)
            rsq = &ref_sq[t0]
            for b in range(nb):
                col = &buf[b * nt]
                qn = query_sq[j0 + b]
                for i in range(nt):
                    v = rsq[i] + qn - 2.0 * col[i]
                    col[i] = v if v > 0.0 else 0.0
                # the expanded form leaves rounding noise on (x, x); pin it to 0
                if self_pairs and t0 <= j0 + b < t0 + nt:
                    col[j0 + b - t0] = 0.0
                out[j0 + b] += _sum_kernel(col, nt, inv_scale, family)


cdef void _self_rowsums_blas(const double[:, ::1] pts, const double* sq,
                             double inv_scale, int family, double* buf,
                             double* out) noexcept nogil:
    # upper-triangular tiles only: tile (I, J) with J > I feeds both blocks
    cdef int d = <int>pts.shape[1]
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t i0, j0, a, b
    cdef int ni, nj
    cdef double alpha = 1.0, beta = 0.0, qn, v
    cdef double* col
    cdef char ta = b'T', tb = b'N'
    for a in range(n):
        out[a] = 0.0
    for j0 in range(0, n, SB):
        nj = <int>min(SB, n - j0)
        for i0 in range(0, j0 + 1, SB):
            ni = <int>min(SB, n - i0)
            dgemm(&ta, &tb, &ni, &nj, &d, &alpha, <double*>&pts[i0, 0], &d,
                  <double*>&pts[j0, 0], &d, &beta, buf, &ni)
            for b in range(nj):
                col = &buf[b * ni]
                qn = sq[j0 + b]
                for a in range(ni):
                    v = sq[i0 + a] + qn - 2.0 * col[a]
                    col[a] = v if v > 0.0 else 0.0
                if i0 == j0:
                    col[b] = 0.0
                out[j0 + b] += _sum_kernel(col, ni, inv_scale, family)
            if i0 != j0:
                # transpose contribution, visited in a fixed order
                for b in range(nj):
                    col = &buf[b * ni]
                    for a in range(ni):
                        out[i0 + a] += col[a]


def _dispatch(const double[:, ::1] ref, const double[:, ::1] query,
              double gamma, int family, bint self_pairs):
    if ref.shape[1] != query.shape[1]:
        raise ValueError("dimension mismatch")
    cdef double inv_scale = 1.0 / (gamma * gamma) if family == 0 else 1.0 / gamma
    out = np.zeros(query.shape[0])
    cdef double[::1] out_v = out
    if query.shape[0] == 0 or ref.shape[0] == 0:
        return out
    cdef double[:, ::1] ref_t
    cdef double[::1] buf, ref_sq, query_sq
    if ref.shape[1] <= DIRECT_MAX_DIM:
        ref_t = np.ascontiguousarray(np.asarray(ref).T)
        buf = np.empty(QB * TILE)
        with nogil:
            _rowsums(ref_t, query, inv_scale, family, &buf[0], &out_v[0])
    elif self_pairs:
        ref_sq = np.einsum("ij,ij->i", ref, ref)
        buf = np.empty(SB * SB)
        with nogil:
            _self_rowsums_blas(ref, &ref_sq[0], inv_scale, family, &buf[0], &out_v[0])
    else:
        ref_sq = np.einsum("ij,ij->i", ref, ref)
        query_sq = np.einsum("ij,ij->i", query, query)
        buf = np.empty(GQB * GTILE)
        with nogil:
            _rowsums_blas(ref, query, &ref_sq[0], &query_sq[0], inv_scale,
                          family, self_pairs, &buf[0], &out_v[0])
    return out


def cross_rowsums(const double[:, ::1] ref, const double[:, ::1] query,
                  double gamma, int family):
    """out[j] = sum_i k(ref[i], query[j])."""
    return _dispatch(ref, query, gamma, family, False)


def self_rowsums(const double[:, ::1] pts, double gamma, int family):
    """out[j] = sum_l k(pts[j], pts[l]), diagonal (k = 1) included."""
    return _dispatch(pts, pts, gamma, family, True)
