# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stencil kernels.

Per-cell arithmetic is ordered exactly as in ``_fallback.py`` so both
backends produce bit-identical fields.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def leapfrog_step_1d(double[::1] u_next, double[::1] u, double[::1] u_prev,
                     double r2):
    cdef Py_ssize_t i, n = u.shape[0]
    for i in range(1, n - 1):
        u_next[i] = (2.0 * u[i] - u_prev[i]
                     + r2 * (u[i - 1] + u[i + 1] - 2.0 * u[i]))


def leapfrog_step_2d(double[:, ::1] u_next, double[:, ::1] u,
                     double[:, ::1] u_prev, double rx2, double ry2):
    cdef Py_ssize_t i, j
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1]
    cdef double c
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            c = u[i, j]
            u_next[i, j] = (2.0 * c - u_prev[i, j]
                            + rx2 * (u[i - 1, j] + u[i + 1, j] - 2.0 * c)
                            + ry2 * (u[i, j - 1] + u[i, j + 1] - 2.0 * c))


cdef inline double _next_1d(double[::1] v, double[::1] vt, double[::1] v_prev,
                            double[::1] big_a, double[::1] cgx,
                            double[::1] lapc, double a2, double dt,
                            double hx, Py_ssize_t i):
    cdef double c = v[i]
    cdef double lap = (v[i - 1] + v[i + 1] - 2.0 * c) / (hx * hx)
    cdef double dvt_dx = (vt[i + 1] - vt[i - 1]) / (2.0 * hx)
    cdef double rhs = (2.0 * a2 * cgx[i] * dvt_dx
                       + a2 * lapc[i] * vt[i]
                       + a2 * lap)
    return 2.0 * c - v_prev[i] + dt * dt * rhs / big_a[i]


def transformed_step_1d(double[::1] v_next, double[::1] v, double[::1] v_prev,
                        double[::1] big_a, double[::1] cgx, double[::1] lapc,
                        double a2, double dt, double hx, int n_corr=1):
    cdef Py_ssize_t i, n = v.shape[0]
    cdef int k
    vt_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] vt = vt_arr
    for i in range(n):
        vt[i] = (v[i] - v_prev[i]) / dt
    for i in range(1, n - 1):
        v_next[i] = _next_1d(v, vt, v_prev, big_a, cgx, lapc, a2, dt, hx, i)
    for k in range(n_corr):
        for i in range(n):
            vt[i] = (v_next[i] - v_prev[i]) / (2.0 * dt)
        for i in range(1, n - 1):
            v_next[i] = _next_1d(v, vt, v_prev, big_a, cgx, lapc, a2, dt, hx, i)


cdef inline double _next_2d(double[:, ::1] v, double[:, ::1] vt,
                            double[:, ::1] v_prev, double[:, ::1] big_a,
                            double[:, ::1] cgx, double[:, ::1] cgy,
                            double[:, ::1] lapc, double a2, double dt,
                            double hx, double hy, Py_ssize_t i, Py_ssize_t j):
    cdef double c = v[i, j]
    cdef double lap = ((v[i - 1, j] + v[i + 1, j] - 2.0 * c) / (hx * hx)
                       + (v[i, j - 1] + v[i, j + 1] - 2.0 * c) / (hy * hy))
    cdef double dvt_dx = (vt[i + 1, j] - vt[i - 1, j]) / (2.0 * hx)
    cdef double dvt_dy = (vt[i, j + 1] - vt[i, j - 1]) / (2.0 * hy)
    cdef double rhs = (2.0 * a2 * (cgx[i, j] * dvt_dx + cgy[i, j] * dvt_dy)
                       + a2 * lapc[i, j] * vt[i, j]
                       + a2 * lap)
    return 2.0 * c - v_prev[i, j] + dt * dt * rhs / big_a[i, j]


def transformed_step_2d(double[:, ::1] v_next, double[:, ::1] v,
                        double[:, ::1] v_prev, double[:, ::1] big_a,
                        double[:, ::1] cgx, double[:, ::1] cgy,
                        double[:, ::1] lapc, double a2, double dt,
                        double hx, double hy, int n_corr=1):
    cdef Py_ssize_t i, j
    cdef Py_ssize_t nx = v.shape[0], ny = v.shape[1]
    cdef int k
    vt_arr = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] vt = vt_arr
    for i in range(nx):
        for j in range(ny):
            vt[i, j] = (v[i, j] - v_prev[i, j]) / dt
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            v_next[i, j] = _next_2d(v, vt, v_prev, big_a, cgx, cgy, lapc,
                                    a2, dt, hx, hy, i, j)
    for k in range(n_corr):
        for i in range(nx):
            for j in range(ny):
                vt[i, j] = (v_next[i, j] - v_prev[i, j]) / (2.0 * dt)
        for i in range(1, nx - 1):
            for j in range(1, ny - 1):
                v_next[i, j] = _next_2d(v, vt, v_prev, big_a, cgx, cgy, lapc,
                                        a2, dt, hx, hy, i, j)
