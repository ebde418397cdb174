# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled node-statistics kernels for fuzzy ID3 growth.

Signatures mirror ``fuzzyid3._pykernels`` exactly.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log2

cnp.import_array()

ctypedef cnp.float64_t DTYPE_t
ctypedef cnp.int64_t ITYPE_t


cdef inline double _tn(int tcode, double a, double b) noexcept nogil:
    if tcode == 0:
        return a if a <= b else b
    return a * b


cdef double _entropy(double[::1] mass, int K, double total) noexcept nogil:
    cdef double h = 0.0, p
    cdef int k
    if total <= 0.0:
        return log2(<double>K)
    for k in range(K):
        if mass[k] > 0.0:
            p = mass[k] / total
            h -= p * log2(p)
    if h < 0.0:
        h = 0.0
    if h > log2(<double>K):
        h = log2(<double>K)
    return h


def node_statistics(const ITYPE_t[::1] idx, const DTYPE_t[::1] u,
                    const DTYPE_t[:, ::1] class_u, int tcode):
    """Return (proportions, entropy, total_weight, class_mass) for one node."""
    cdef Py_ssize_t n = idx.shape[0], i, r
    cdef int K = class_u.shape[1], k
    cdef double total_w = 0.0, total_m = 0.0, h
    mass_arr = np.zeros(K, dtype=np.float64)
    cdef double[::1] mass = mass_arr
    with nogil:
        for i in range(n):
            r = idx[i]
            total_w += u[i]
            for k in range(K):
                mass[k] += _tn(tcode, class_u[r, k], u[i])
        for k in range(K):
            total_m += mass[k]
        h = _entropy(mass, K, total_m)
    if total_m > 0.0:
        props = mass_arr / total_m
    else:
        props = np.full(K, 1.0 / K)
    return props, h, total_w, total_m


def candidate_gains(const ITYPE_t[::1] idx, const DTYPE_t[::1] u,
                    const DTYPE_t[:, ::1] class_u, const DTYPE_t[:, :, ::1] var_u,
                    const ITYPE_t[::1] set_counts, const ITYPE_t[::1] candidates,
                    int tcode, double beta, double parent_entropy):
    """Information gain of splitting the node on each candidate variable."""
    cdef Py_ssize_t n = idx.shape[0], i, r, c, j
    cdef int K = class_u.shape[1], k, l, M
    cdef Py_ssize_t nc = candidates.shape[0]
    cdef int Mmax = var_u.shape[2]
    gains_arr = np.zeros(nc, dtype=np.float64)
    cdef double[::1] gains = gains_arr
    cdef double[:, ::1] mass = np.zeros((Mmax, K), dtype=np.float64)
    cdef double[::1] weight = np.zeros(Mmax, dtype=np.float64)
    cdef double[::1] tot = np.zeros(Mmax, dtype=np.float64)
    cdef double uc, wsum, acc
    with nogil:
        for c in range(nc):
            j = candidates[c]
            M = <int>set_counts[j]
            for l in range(M):
                weight[l] = 0.0
                tot[l] = 0.0
                for k in range(K):
                    mass[l, k] = 0.0
            for i in range(n):
                r = idx[i]
                for l in range(M):
                    uc = _tn(tcode, u[i], var_u[r, j, l])
                    if uc > 0.0 and uc >= beta:
                        weight[l] += uc
                        for k in range(K):
                            mass[l, k] += _tn(tcode, class_u[r, k], uc)
            wsum = 0.0
            for l in range(M):
                wsum += weight[l]
            if wsum <= 0.0:
                gains[c] = 0.0
                continue
            acc = 0.0
            for l in range(M):
                if weight[l] > 0.0:
                    for k in range(K):
                        tot[l] += mass[l, k]
                    acc += (weight[l] / wsum) * _entropy(mass[l], K, tot[l])
            gains[c] = parent_entropy - acc
    return gains_arr
