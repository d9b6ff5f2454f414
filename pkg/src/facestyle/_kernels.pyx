# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Must stay bit-identical with ``_fallback``."""

import numpy as np
from libc.math cimport sqrt, log, cos, sin
from libc.stdint cimport uint64_t

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline double _frame_cost(const double[:, :, ::1] a, Py_ssize_t i,
                               const double[:, :, ::1] b, Py_ssize_t j,
                               Py_ssize_t n) nogil:
    cdef double acc = 0.0, dx, dy, dz
    cdef Py_ssize_t v
    for v in range(n):
        dx = a[i, v, 0] - b[j, v, 0]
        dy = a[i, v, 1] - b[j, v, 1]
        dz = a[i, v, 2] - b[j, v, 2]
        acc += sqrt(dx * dx + dy * dy + dz * dz)
    return acc / n


def dtw_cost(const double[:, :, ::1] pred, const double[:, :, ::1] gt):
    cdef Py_ssize_t t1 = pred.shape[0], t2 = gt.shape[0], n = pred.shape[1]
    cdef Py_ssize_t i, j
    cdef double best, c
    cdef double[::1] prev = np.empty(t2, dtype=np.float64)
    cdef double[::1] cur = np.empty(t2, dtype=np.float64)
    cdef double[::1] tmp
    with nogil:
        for i in range(t1):
            for j in range(t2):
                c = _frame_cost(pred, i, gt, j, n)
                if i == 0 and j == 0:
                    cur[j] = c
                    continue
                if i == 0:
                    best = cur[j - 1]
                elif j == 0:
                    best = prev[j]
                else:
                    best = prev[j - 1]
                    if prev[j] < best:
                        best = prev[j]
                    if cur[j - 1] < best:
                        best = cur[j - 1]
                cur[j] = best + c
            tmp = prev
            prev = cur
            cur = tmp
    return prev[t2 - 1]


def splitmix64_block(uint64_t state, Py_ssize_t n):
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] view = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(n):
            state = state + GAMMA
            view[k] = _mix(state)
    return out, int(state)


def uniforms(uint64_t state, Py_ssize_t n):
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef Py_ssize_t k
    with nogil:
        for k in range(n):
            state = state + GAMMA
            view[k] = <double>(_mix(state) >> 11) * INV_2_53
    return out, int(state)


def normals(uint64_t state, Py_ssize_t n):
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef Py_ssize_t k = 0
    cdef double u1, u2, r, theta
    with nogil:
        while k < n:
            state = state + GAMMA
            u1 = 1.0 - <double>(_mix(state) >> 11) * INV_2_53
            state = state + GAMMA
            u2 = <double>(_mix(state) >> 11) * INV_2_53
            r = sqrt(-2.0 * log(u1))
            theta = TWO_PI * u2
            view[k] = r * cos(theta)
            k += 1
            if k < n:
                view[k] = r * sin(theta)
                k += 1
    return out, int(state)


def sinusoids(const double[:, :, ::1] amps, const double[::1] bins,
              const double[:, :, ::1] phases, Py_ssize_t T):
    cdef Py_ssize_t n = amps.shape[0], nb = amps.shape[2]
    out = np.empty((T, n, 3), dtype=np.float64)
    cdef double[:, :, ::1] view = out
    cdef Py_ssize_t t, v, c, b
    cdef double acc
    cdef double dT = <double>T
    with nogil:
        for t in range(T):
            for v in range(n):
                for c in range(3):
                    acc = 0.0
                    for b in range(nb):
                        acc = acc + amps[v, c, b] * sin(TWO_PI * bins[b] * <double>t / dT + phases[v, c, b])
                    view[t, v, c] = acc
    return out
