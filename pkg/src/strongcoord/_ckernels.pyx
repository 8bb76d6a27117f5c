# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: lattice convolution by k-way merge, batch inverse-CDF draws."""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef inline void _sift_down(long long *hk, int *hj, int size, int pos) noexcept nogil:
    cdef int child
    cdef long long k
    cdef int j
    while True:
        child = 2 * pos + 1
        if child >= size:
            break
        if child + 1 < size and hk[child + 1] < hk[child]:
            child += 1
        if hk[pos] <= hk[child]:
            break
        k = hk[pos]; hk[pos] = hk[child]; hk[child] = k
        j = hj[pos]; hj[pos] = hj[child]; hj[child] = j
        pos = child


def lattice_convolve(keys_a, probs_a, keys_b, probs_b):
    cdef cnp.int64_t[::1] ka = np.ascontiguousarray(keys_a, dtype=np.int64)
    cdef double[::1] pa = np.ascontiguousarray(probs_a, dtype=np.float64)
    cdef cnp.int64_t[::1] kb = np.ascontiguousarray(keys_b, dtype=np.int64)
    cdef double[::1] pb = np.ascontiguousarray(probs_b, dtype=np.float64)
    if ka.shape[0] < kb.shape[0]:
        ka, kb = kb, ka
        pa, pb = pb, pa
    cdef Py_ssize_t na = ka.shape[0], nb = kb.shape[0]
    out_k = np.empty(na * nb, dtype=np.int64)
    out_p = np.empty(na * nb, dtype=np.float64)
    cdef cnp.int64_t[::1] ok = out_k
    cdef double[::1] op = out_p
    if na == 0 or nb == 0:
        return out_k[:0], out_p[:0]
    # one sorted run per atom of the smaller operand: ka[:] + kb[j]
    cdef long long *hk = <long long *> malloc(nb * sizeof(long long))
    cdef int *hj = <int *> malloc(nb * sizeof(int))
    cdef Py_ssize_t *pos = <Py_ssize_t *> malloc(nb * sizeof(Py_ssize_t))
    cdef Py_ssize_t j, i, n_out = 0
    cdef int size = <int> nb
    cdef long long key
    cdef double mass
    try:
        with nogil:
            for j in range(nb):
                pos[j] = 0
                hk[j] = ka[0] + kb[j]
                hj[j] = <int> j
            for j in range(nb // 2 - 1, -1, -1):
                _sift_down(hk, hj, size, <int> j)
            while size > 0:
                key = hk[0]
                j = hj[0]
                i = pos[j]
                mass = pa[i] * pb[j]
                if n_out > 0 and ok[n_out - 1] == key:
                    op[n_out - 1] += mass
                else:
                    ok[n_out] = key
                    op[n_out] = mass
                    n_out += 1
                pos[j] = i + 1
                if i + 1 < na:
                    hk[0] = ka[i + 1] + kb[j]
                else:
                    size -= 1
                    hk[0] = hk[size]
                    hj[0] = hj[size]
                _sift_down(hk, hj, size, 0)
    finally:
        free(hk)
        free(hj)
        free(pos)
    out_k = out_k[:n_out]
    out_p = out_p[:n_out]
    keep = out_p > 0
    return out_k[keep], out_p[keep]


def categorical_draw(cdf, rows, uniforms):
    cdef double[:, ::1] c = np.ascontiguousarray(cdf, dtype=np.float64)
    cdef cnp.int64_t[::1] r = np.ascontiguousarray(rows, dtype=np.int64)
    cdef double[::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t n = u.shape[0], k = c.shape[1], s, lo, hi, mid
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    cdef cnp.int64_t row
    with nogil:
        for s in range(n):
            row = r[s]
            # count of cdf entries <= u, by binary search on the sorted row
            lo = 0
            hi = k
            while lo < hi:
                mid = (lo + hi) >> 1
                if c[row, mid] <= u[s]:
                    lo = mid + 1
                else:
                    hi = mid
            o[s] = lo if lo < k else k - 1
    return out
