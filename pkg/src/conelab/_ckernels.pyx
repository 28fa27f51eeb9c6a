# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; same contracts as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()


def soc_margins(double[:, ::1] X):
    cdef Py_ssize_t m = X.shape[0], n = X.shape[1], i, j
    cdef double s
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(m):
        s = 0.0
        for j in range(1, n):
            s += X[i, j] * X[i, j]
        o[i] = X[i, 0] - sqrt(s)
    return out


def jacobi_eigvalsh(double[:, ::1] A_in, double tol=1e-14, int max_sweeps=100):
    cdef Py_ssize_t n = A_in.shape[0], p, q, k
    a_arr = np.array(A_in, dtype=np.float64, copy=True)
    cdef double[:, ::1] a = a_arr
    cdef double off, scale, theta, t, c, s, apq, app, aqq, akp, akq
    cdef int sweep
    scale = 0.0
    for p in range(n):
        for q in range(n):
            scale += a[p, q] * a[p, q]
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if off <= tol * tol * scale or off == 0.0:
            break
        for p in range(n):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + sqrt(1.0 + theta * theta))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    akp = a[p, k]
                    akq = a[q, k]
                    a[p, k] = c * akp - s * akq
                    a[q, k] = s * akp + c * akq
    return np.sort(np.diagonal(a_arr).copy())


cdef bint _is_nilpotent(long long[:, ::1] N, long long[:, ::1] P, long long[:, ::1] Q, int d):
    cdef int i, j, k, step
    cdef long long acc
    for i in range(d):
        for j in range(d):
            P[i, j] = N[i, j]
    for step in range(d - 1):
        for i in range(d):
            for j in range(d):
                acc = 0
                for k in range(d):
                    acc += P[i, k] * N[k, j]
                Q[i, j] = acc
        for i in range(d):
            for j in range(d):
                P[i, j] = Q[i, j]
    for i in range(d):
        for j in range(d):
            if P[i, j] != 0:
                return False
    return True


def nilpotent_candidates(int dim, int bound):
    cdef int d2 = dim * dim, base = 2 * bound + 1, i, tr
    cdef long long total = 1, idx, code
    for i in range(d2):
        total *= base
    N_arr = np.zeros((dim, dim), dtype=np.int64)
    P_arr = np.zeros((dim, dim), dtype=np.int64)
    Q_arr = np.zeros((dim, dim), dtype=np.int64)
    cdef long long[:, ::1] N = N_arr
    cdef long long[:, ::1] P = P_arr
    cdef long long[:, ::1] Q = Q_arr
    found = []
    for idx in range(total):
        code = idx
        for i in range(d2):
            N[i // dim, i % dim] = (code % base) - bound
            code //= base
        tr = 0
        for i in range(dim):
            tr += N[i, i]
        if tr != 0:
            continue
        if _is_nilpotent(N, P, Q, dim):
            found.append(N_arr.copy())
    if not found:
        return np.zeros((0, dim, dim), dtype=np.int64)
    return np.stack(found)
