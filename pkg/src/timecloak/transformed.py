"""The cloaking construction and its verifiers.

Four independent views of the same mathematics:
- ``map_solution`` builds the cloaked field v from the physical solution u by
  the piecewise time shift (identity below the jump, shift by c(y) above,
  void in between),
- ``glue_check`` measures the interface continuity of value and time
  derivative transported back to the jump,
- ``residual_field`` / ``residual_transformed`` evaluate the transformed
  equation on centered stencils of the mapped field,
- ``solve_transformed_above`` integrates the transformed equation directly on
  the flat slab above the bump, seeded from a slice of u, giving a second,
  independent construction of v+ to compare against.

Void cells carry NaN payloads so accidental reads surface immediately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import binary_erosion

from . import kernels
from .errors import (
    CflViolationError,
    CoverageExceededError,
    NotHyperbolicError,
    StencilTouchesBoundaryError,
    StencilTouchesVoidError,
)
from .profile import CloakProfile
from .symbol import max_characteristic_slope
from .wavesolver import BoundarySignal, Grid, SpacetimeField

__all__ = [
    "CloakedField",
    "map_solution",
    "map_at_times",
    "glue_check",
    "GlueReport",
    "residual_field",
    "residual_transformed",
    "slice_initial_data",
    "solve_transformed_above",
    "cross_agreement",
]


@dataclass
class CloakedField:
    """A spacetime field in (y0, y) coordinates with a void mask and a
    record of how it was built (``Mapped`` or ``DirectSolve``)."""

    field: SpacetimeField
    profile: CloakProfile
    provenance: str

    @property
    def grid(self) -> Grid:
        return self.field.grid

    @property
    def values(self) -> np.ndarray:
        return self.field.values

    @property
    def times(self) -> np.ndarray:
        return self.field.times

    @property
    def mask(self):
        return self.field.mask


# ---------------------------------------------------------------------------
# temporal interpolation of u at shifted times
# ---------------------------------------------------------------------------


def _lagrange4_weights(theta):
    """Cubic Lagrange weights on nodes (-1, 0, 1, 2) at offset theta."""
    w_m1 = -theta * (theta - 1.0) * (theta - 2.0) / 6.0
    w_0 = (theta + 1.0) * (theta - 1.0) * (theta - 2.0) / 2.0
    w_p1 = -(theta + 1.0) * theta * (theta - 2.0) / 2.0
    w_p2 = (theta + 1.0) * theta * (theta - 1.0) / 6.0
    return w_m1, w_0, w_p1, w_p2


def _interp_time(u: SpacetimeField, tau: np.ndarray) -> np.ndarray:
    """Cubic (4-point Lagrange) evaluation of u at per-cell times ``tau``.

    ``tau`` is broadcast against the spatial shape.  The stencil is clamped
    one-sidedly at the window edges; times outside the window raise
    CoverageExceededError.
    """
    t0 = u.times[0]
    dt = u.times[1] - u.times[0]
    n = u.n_levels
    tau = np.broadcast_to(np.asarray(tau, dtype=float), u.values.shape[1:])
    tol = 1e-9 * dt
    if np.any(tau < t0 - tol) or np.any(tau > u.times[-1] + tol):
        raise CoverageExceededError("shifted time falls outside the computed window")
    k = np.floor((tau - t0) / dt).astype(np.int64)
    k = np.clip(k, 1, n - 3)
    theta = (tau - t0) / dt - k
    w = _lagrange4_weights(theta)
    out = np.zeros(tau.shape)
    flat = u.values.reshape(n, -1)
    kf = k.reshape(-1)
    cols = np.arange(flat.shape[1])
    acc = np.zeros(flat.shape[1])
    for off, wi in zip((-1, 0, 1, 2), w):
        acc += wi.reshape(-1) * flat[kf + off, cols]
    out[...] = acc.reshape(tau.shape)
    return out


def map_at_times(u: SpacetimeField, profile: CloakProfile, times) -> np.ndarray:
    """Values of the mapped field v+ at arbitrary slab times (all >= c(y)).

    Cells where c vanishes are copied bit-exactly when the shifted time lands
    on a grid level, preserving the outside-the-ball identity.
    """
    pts = u.grid.meshpoints()
    c_arr = np.asarray(profile.c_value(pts))
    t0 = u.times[0]
    dt = u.times[1] - u.times[0]
    out = np.empty((len(times),) + u.grid.shape)
    for j, t in enumerate(np.asarray(times, dtype=float)):
        tau = t - c_arr
        vals = _interp_time(u, tau)
        # bit-exact copy wherever the shift is the identity and t is on-grid
        k = (t - t0) / dt
        kr = int(round(k))
        if abs(k - kr) < 1e-9 and 0 <= kr < u.n_levels:
            zero = c_arr == 0.0
            vals[zero] = u.values[kr][zero]
        out[j] = vals
    return out


def map_solution(u: SpacetimeField, profile: CloakProfile) -> CloakedField:
    """Build the cloaked field on u's own grid levels.

    Below the jump v copies u level-for-level; above the bump surface v is
    u evaluated at the shifted time; the void cells in between are NaN.
    """
    pts = u.grid.meshpoints()
    c_arr = np.asarray(profile.c_value(pts))
    czero = c_arr == 0.0
    values = np.empty_like(u.values)
    mask = np.zeros(u.values.shape, dtype=bool)
    for j, t in enumerate(u.times):
        if t < 0.0:
            values[j] = u.values[j]
            continue
        void = t < c_arr
        vals = _interp_time(u, np.where(void, 0.0, t - c_arr))
        vals[czero] = u.values[j][czero]
        vals[void] = np.nan
        values[j] = vals
        mask[j] = void
    fld = SpacetimeField(u.grid, values, u.times.copy(), mask)
    return CloakedField(field=fld, profile=profile, provenance="Mapped")


# ---------------------------------------------------------------------------
# interface gluing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GlueReport:
    value_jump: float
    deriv_jump: float


def _extrap_to_zero(values, offsets):
    """Polynomial extrapolation to 0 of samples at per-cell offsets;
    returns (value, derivative) at 0.

    Uses the product form of the Lagrange basis, which stays finite even
    when one offset is exactly 0 (the interface lands on a grid level).
    """
    n = len(offsets)
    v = 0.0
    dv = 0.0
    for i in range(n):
        others = [offsets[j] for j in range(n) if j != i]
        denom = np.prod([offsets[i] - xj for xj in others], axis=0)
        num = np.prod([-xj for xj in others], axis=0)
        # d/dt prod(t - xj) at t = 0, by the product rule
        dnum = 0.0
        for k in range(len(others)):
            dnum = dnum + np.prod(
                [-others[j] for j in range(len(others)) if j != k], axis=0
            )
        v = v + (num / denom) * values[i]
        dv = dv + (dnum / denom) * values[i]
    return v, dv


def glue_check(v: CloakedField, u: SpacetimeField) -> GlueReport:
    """Mismatch of value and time derivative at the jump.

    The limit from below comes from u's last levels before time zero; the
    limit from above comes from v's first levels past the bump surface,
    transported back by the shift.  Both extrapolate cubically to the
    interface, so a smooth solution gives jumps at discretization order.
    """
    grid = u.grid
    dt = u.times[1] - u.times[0]
    pts = grid.meshpoints()
    c_arr = np.asarray(v.profile.c_value(pts))

    # below: last four levels with t < 0 (same offsets for every cell)
    m = int(np.searchsorted(u.times, 0.0) - 1)
    if m < 3:
        raise CoverageExceededError("need at least four levels before t = 0")
    below_vals = [u.values[m - j] for j in (3, 2, 1, 0)]
    below_offs = [u.times[m - j] for j in (3, 2, 1, 0)]
    v_below, dv_below = _extrap_to_zero(below_vals, below_offs)

    # above: first grid level at or past the bump surface, per cell
    t0 = u.times[0]
    k = np.ceil((c_arr - t0) / dt - 1e-9).astype(np.int64)
    k = np.maximum(k, int(np.searchsorted(u.times, 0.0)))
    if np.any(k + 3 >= u.n_levels):
        raise CoverageExceededError("window too short above the bump surface")
    flat = v.values.reshape(u.n_levels, -1)
    cols = np.arange(flat.shape[1])
    kf = k.reshape(-1)
    vals = [flat[kf + j, cols].reshape(grid.shape) for j in range(4)]
    offs = [(t0 + (k + j) * dt) - c_arr for j in range(4)]
    v_above, dv_above = _extrap_to_zero(vals, offs)

    return GlueReport(
        value_jump=float(np.max(np.abs(v_above - v_below))),
        deriv_jump=float(np.max(np.abs(dv_above - dv_below))),
    )


# ---------------------------------------------------------------------------
# residual of the transformed equation
# ---------------------------------------------------------------------------


def _coefficients(grid: Grid, profile: CloakProfile, a: float):
    pts = grid.meshpoints()
    cg = np.asarray(profile.c_grad(pts))
    lapc = np.asarray(profile.c_laplacian(pts))
    big_a = 1.0 - a * a * np.sum(cg * cg, axis=-1)
    return big_a, cg, lapc


def residual_field(v: CloakedField, a: float):
    """Residual of the transformed equation on every admissible centered
    stencil of the mapped field.

    Returns ``(residual, valid)``: the residual array (NaN outside) and the
    boolean mask of points whose full 3^(dim+1) stencil lies in the upper
    region with a one-cell buffer from void cells and domain boundaries.
    """
    grid = v.grid
    dt = v.times[1] - v.times[0]
    h = grid.h
    big_a, cg, lapc = _coefficients(grid, v.profile, a)
    w = v.values
    a2 = a * a

    res = np.full(w.shape, np.nan)
    ctr = np.s_[1:-1]
    # level-by-level so peak memory stays at a few 2-D slices
    for k in range(1, w.shape[0] - 1):
        lo, mi, hi = w[k - 1], w[k], w[k + 1]
        if grid.dim == 1:
            c = mi[ctr]
            vtt = (hi[ctr] - 2.0 * c + lo[ctr]) / (dt * dt)
            vt = (hi[ctr] - lo[ctr]) / (2.0 * dt)
            v0x = (hi[2:] - hi[:-2] - lo[2:] + lo[:-2]) / (4.0 * dt * h)
            lap = (mi[2:] - 2.0 * c + mi[:-2]) / (h * h)
            mixed = cg[ctr, 0] * v0x
            res[k, ctr] = (
                big_a[ctr] * vtt - 2.0 * a2 * mixed - a2 * lapc[ctr] * vt - a2 * lap
            )
        else:
            c = mi[ctr, ctr]
            vtt = (hi[ctr, ctr] - 2.0 * c + lo[ctr, ctr]) / (dt * dt)
            vt = (hi[ctr, ctr] - lo[ctr, ctr]) / (2.0 * dt)
            v0x = (
                hi[2:, ctr] - hi[:-2, ctr] - lo[2:, ctr] + lo[:-2, ctr]
            ) / (4.0 * dt * h)
            v0y = (
                hi[ctr, 2:] - hi[ctr, :-2] - lo[ctr, 2:] + lo[ctr, :-2]
            ) / (4.0 * dt * h)
            lap = (
                (mi[2:, ctr] - 2.0 * c + mi[:-2, ctr])
                + (mi[ctr, 2:] - 2.0 * c + mi[ctr, :-2])
            ) / (h * h)
            mixed = cg[ctr, ctr, 0] * v0x + cg[ctr, ctr, 1] * v0y
            res[k, ctr, ctr] = (
                big_a[ctr, ctr] * vtt
                - 2.0 * a2 * mixed
                - a2 * lapc[ctr, ctr] * vt
                - a2 * lap
            )

    # stencil admissibility: every stencil cell strictly in the upper region,
    # plus a one-cell buffer in every direction
    pts = grid.meshpoints()
    c_arr = np.asarray(v.profile.c_value(pts))
    times_col = v.times.reshape((-1,) + (1,) * grid.dim)
    upper = times_col >= np.maximum(c_arr, 0.0)[np.newaxis]
    valid = binary_erosion(
        upper, structure=np.ones((3,) * (grid.dim + 1), dtype=bool), iterations=2
    )
    return res, valid


def residual_transformed(v: CloakedField, a: float, stencil_point) -> float:
    """Residual at a single (level, cell) stencil point, with the spec'd
    error reporting for inadmissible stencils."""
    level, idx = stencil_point
    idx = (idx,) if np.isscalar(idx) else tuple(idx)
    grid = v.grid
    if level < 1 or level > v.field.n_levels - 2 or any(
        i < 1 or i > grid.points - 2 for i in idx
    ):
        raise StencilTouchesBoundaryError(f"stencil at {stencil_point} leaves the grid")
    if v.mask is not None:
        nbhd = v.mask[
            (np.s_[level - 1 : level + 2],)
            + tuple(np.s_[i - 1 : i + 2] for i in idx)
        ]
        if np.any(nbhd):
            raise StencilTouchesVoidError(f"stencil at {stencil_point} reads the void")
    res, _ = residual_field(v, a)
    return float(res[(level,) + idx])


# ---------------------------------------------------------------------------
# direct solve on the slab above the bump
# ---------------------------------------------------------------------------


def slice_initial_data(u: SpacetimeField, profile: CloakProfile, y0_start: float):
    """Value and time derivative of v+ on the slice {y0 = y0_start}.

    The slice lies in the upper region whenever y0_start >= c0.  The time
    derivative is a centered difference of cubically interpolated values, so
    at cells where c vanishes and y0_start is a grid time it reduces to the
    centered difference of stored levels.
    """
    if y0_start < profile.c0 - 1e-12:
        raise CoverageExceededError("slice must sit at or above the bump height")
    dt = u.times[1] - u.times[0]
    pts = u.grid.meshpoints()
    c_arr = np.asarray(profile.c_value(pts))
    tau = y0_start - c_arr
    v_slice = map_at_times(u, profile, [y0_start])[0]
    up = _interp_time(u, tau + dt)
    down = _interp_time(u, tau - dt)
    v_t_slice = (up - down) / (2.0 * dt)
    return v_slice, v_t_slice


def _transformed_cfl_check(grid: Grid, a: float, dt: float, margin_min: float):
    a_eff = max_characteristic_slope(a, margin_min) if a > 0.0 else 1.0
    if a_eff * dt * math.sqrt(grid.dim) / grid.h > grid.cfl_limit * (1.0 + 1e-9):
        raise CflViolationError(
            "time step exceeds the characteristic-based stability bound"
        )


def solve_transformed_above(
    initial,
    signal: BoundarySignal,
    a: float,
    profile: CloakProfile,
    grid: Grid,
    y0_start: float,
    y0_max: float,
    n_corr: int = 1,
) -> CloakedField:
    """Explicit integration of the transformed equation on the flat slab
    y0 in [y0_start, y0_max], seeded from (value, time-derivative) data.

    The first step is a Taylor expansion whose second-derivative term comes
    from the discrete form of the equation itself, which makes the restart
    exact (to rounding) when the coefficients degenerate to the flat case.
    """
    v_slice, v_t_slice = initial
    big_a, cg, lapc = _coefficients(grid, profile, a)
    if np.min(big_a) <= 0.0:
        raise NotHyperbolicError("transformed equation loses hyperbolicity on grid")
    dt = grid.dt
    _transformed_cfl_check(grid, a, dt, float(np.min(big_a)))

    n_steps = max(2, int(math.ceil((y0_max - y0_start) / dt - 1e-9)))
    times = y0_start + dt * np.arange(n_steps + 1)
    shape = grid.shape
    # zero-initialized so inactive Dirichlet faces hold their correct data
    # before the corrector pass reads them
    values = np.zeros((n_steps + 1,) + shape)
    a2 = a * a
    h = grid.h

    values[0] = v_slice
    # Taylor seed: v1 = v0 + dt v_t + dt^2/2 * v_tt with v_tt from the PDE,
    # discretized with the same spatial stencils as the stepping kernel
    vt = v_t_slice
    v0 = v_slice
    interior = (np.s_[1:-1],) * grid.dim
    if grid.dim == 1:
        lap = (v0[:-2] + v0[2:] - 2.0 * v0[1:-1]) / (h * h)
        dvt = (vt[2:] - vt[:-2]) / (2.0 * h)
        rhs = 2.0 * a2 * cg[1:-1, 0] * dvt + a2 * lapc[1:-1] * vt[1:-1] + a2 * lap
        vtt = rhs / big_a[1:-1]
    else:
        lap = (
            (v0[:-2, 1:-1] + v0[2:, 1:-1] - 2.0 * v0[1:-1, 1:-1])
            + (v0[1:-1, :-2] + v0[1:-1, 2:] - 2.0 * v0[1:-1, 1:-1])
        ) / (h * h)
        dvtx = (vt[2:, 1:-1] - vt[:-2, 1:-1]) / (2.0 * h)
        dvty = (vt[1:-1, 2:] - vt[1:-1, :-2]) / (2.0 * h)
        rhs = (
            2.0 * a2 * (cg[1:-1, 1:-1, 0] * dvtx + cg[1:-1, 1:-1, 1] * dvty)
            + a2 * lapc[1:-1, 1:-1] * vt[1:-1, 1:-1]
            + a2 * lap
        )
        vtt = rhs / big_a[1:-1, 1:-1]
    values[1] = v0 + dt * vt
    values[1][interior] += 0.5 * dt * dt * vtt
    signal.apply(values[1], grid, times[1])

    if grid.dim == 1:
        cgx = np.ascontiguousarray(cg[:, 0])
    else:
        cgx = np.ascontiguousarray(cg[:, :, 0])
        cgy = np.ascontiguousarray(cg[:, :, 1])
    big_a = np.ascontiguousarray(big_a)
    lapc = np.ascontiguousarray(lapc)

    for n in range(1, n_steps):
        # boundary of the next level is imposed first so the corrector's
        # centered time difference sees the true Dirichlet data
        signal.apply(values[n + 1], grid, times[n + 1])
        if grid.dim == 1:
            kernels.transformed_step_1d(
                values[n + 1], values[n], values[n - 1],
                big_a, cgx, lapc, a2, dt, h, n_corr,
            )
        else:
            kernels.transformed_step_2d(
                values[n + 1], values[n], values[n - 1],
                big_a, cgx, cgy, lapc, a2, dt, h, h, n_corr,
            )
        signal.apply(values[n + 1], grid, times[n + 1])

    fld = SpacetimeField(grid, values, times, None)
    return CloakedField(field=fld, profile=profile, provenance="DirectSolve")


def cross_agreement(direct: CloakedField, u: SpacetimeField) -> float:
    """Max-norm disagreement between the direct slab solve and the mapped
    construction evaluated at the slab's own time levels."""
    mapped = map_at_times(u, direct.profile, direct.times)
    return float(np.max(np.abs(direct.values - mapped)))
