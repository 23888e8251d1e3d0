"""Pure-NumPy stencil kernels.

These mirror the compiled kernels in ``_core.pyx`` operation-for-operation:
the per-cell arithmetic is written in the same order in both backends so that
results agree bit-for-bit, which the test suite asserts.

All kernels update interior cells only; callers impose boundary values.
"""

import numpy as np

BACKEND = "numpy"


def leapfrog_step_1d(u_next, u, u_prev, r2):
    """u_next = 2u - u_prev + r2 * (left + right - 2u) on interior cells."""
    u_next[1:-1] = (
        2.0 * u[1:-1] - u_prev[1:-1] + r2 * (u[:-2] + u[2:] - 2.0 * u[1:-1])
    )


def leapfrog_step_2d(u_next, u, u_prev, rx2, ry2):
    c = u[1:-1, 1:-1]
    u_next[1:-1, 1:-1] = (
        2.0 * c
        - u_prev[1:-1, 1:-1]
        + rx2 * (u[:-2, 1:-1] + u[2:, 1:-1] - 2.0 * c)
        + ry2 * (u[1:-1, :-2] + u[1:-1, 2:] - 2.0 * c)
    )


def _transformed_next_1d(v, vt, v_prev, big_a, cgx, lapc, a2, dt, hx):
    """One evaluation of the transformed-equation update given a time-
    derivative estimate ``vt`` at the current level."""
    c = v[1:-1]
    lap = (v[:-2] + v[2:] - 2.0 * c) / (hx * hx)
    dvt_dx = (vt[2:] - vt[:-2]) / (2.0 * hx)
    rhs = (
        2.0 * a2 * cgx[1:-1] * dvt_dx
        + a2 * lapc[1:-1] * vt[1:-1]
        + a2 * lap
    )
    return 2.0 * c - v_prev[1:-1] + dt * dt * rhs / big_a[1:-1]


def transformed_step_1d(v_next, v, v_prev, big_a, cgx, lapc, a2, dt, hx, n_corr=1):
    """Explicit step for the time-shifted wave equation in 1-D.

    Predictor uses the backward time difference for the first-order terms;
    each corrector pass re-centers it with the predicted level.
    """
    vt = (v - v_prev) / dt
    v_next[1:-1] = _transformed_next_1d(v, vt, v_prev, big_a, cgx, lapc, a2, dt, hx)
    for _ in range(n_corr):
        vt = np.empty_like(v)
        vt[:] = (v_next - v_prev) / (2.0 * dt)
        v_next[1:-1] = _transformed_next_1d(
            v, vt, v_prev, big_a, cgx, lapc, a2, dt, hx
        )


def _transformed_next_2d(v, vt, v_prev, big_a, cgx, cgy, lapc, a2, dt, hx, hy):
    c = v[1:-1, 1:-1]
    lap = (v[:-2, 1:-1] + v[2:, 1:-1] - 2.0 * c) / (hx * hx) + (
        v[1:-1, :-2] + v[1:-1, 2:] - 2.0 * c
    ) / (hy * hy)
    dvt_dx = (vt[2:, 1:-1] - vt[:-2, 1:-1]) / (2.0 * hx)
    dvt_dy = (vt[1:-1, 2:] - vt[1:-1, :-2]) / (2.0 * hy)
    rhs = (
        2.0 * a2 * (cgx[1:-1, 1:-1] * dvt_dx + cgy[1:-1, 1:-1] * dvt_dy)
        + a2 * lapc[1:-1, 1:-1] * vt[1:-1, 1:-1]
        + a2 * lap
    )
    return 2.0 * c - v_prev[1:-1, 1:-1] + dt * dt * rhs / big_a[1:-1, 1:-1]


def transformed_step_2d(
    v_next, v, v_prev, big_a, cgx, cgy, lapc, a2, dt, hx, hy, n_corr=1
):
    vt = (v - v_prev) / dt
    v_next[1:-1, 1:-1] = _transformed_next_2d(
        v, vt, v_prev, big_a, cgx, cgy, lapc, a2, dt, hx, hy
    )
    for _ in range(n_corr):
        vt = np.empty_like(v)
        vt[:] = (v_next - v_prev) / (2.0 * dt)
        v_next[1:-1, 1:-1] = _transformed_next_2d(
            v, vt, v_prev, big_a, cgx, cgy, lapc, a2, dt, hx, hy
        )
