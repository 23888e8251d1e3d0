import numpy as np
import pytest

from timecloak.errors import (
    CoverageExceededError,
    StencilTouchesBoundaryError,
    StencilTouchesVoidError,
)
from timecloak.profile import CloakProfile, RegionLabel
from timecloak.symbol import max_admissible_c0
from timecloak.transformed import (
    cross_agreement,
    glue_check,
    map_at_times,
    map_solution,
    residual_field,
    residual_transformed,
    slice_initial_data,
    solve_transformed_above,
)
from timecloak.wavesolver import BoundarySignal, Grid, solve_physical, suggest_dt

A = 1.0
C1 = 0.25


def make_setup(points=129, c0_factor=0.8, dim=1, t_max=0.8):
    c0 = c0_factor * max_admissible_c0(A, C1)
    profile = CloakProfile(c0=c0, c1=C1, center=(0.0,) * dim, dim=dim)
    margin = 1.0 - (A * profile.max_grad) ** 2
    h = 2.0 / (points - 1)
    dt = suggest_dt(h, A, margin, dim, 0.9)
    grid = Grid.build(dim, 1.0, points, -1.0, t_max, dt, 0.9)
    sig = BoundarySignal(shape="ricker", t_on=-0.9, t_off=-0.35, amplitude=1.0,
                         faces=("x_min",), spatial_width=1.4)
    u = solve_physical(grid, A, sig)
    return u, profile, grid, sig


@pytest.fixture(scope="module")
def setup1d():
    return make_setup()


# ---------------------------------------------------------------------------
# mapping
# ---------------------------------------------------------------------------


def test_trivial_profile_maps_identically(setup1d):
    u = setup1d[0]
    flat = CloakProfile(c0=0.0, c1=C1, dim=1)
    v = map_solution(u, flat)
    assert np.array_equal(v.values, u.values)
    assert not np.any(v.mask)
    assert v.provenance == "Mapped"


def test_map_is_identity_outside_the_ball(setup1d):
    u, profile, grid, _ = setup1d
    v = map_solution(u, profile)
    outside = np.abs(grid.axis) >= C1
    assert np.array_equal(v.values[:, outside], u.values[:, outside])


def test_map_below_jump_copies_levels(setup1d):
    u, profile, _, _ = setup1d
    v = map_solution(u, profile)
    below = u.times < 0.0
    assert np.array_equal(v.values[below], u.values[below])


def test_plateau_shift_by_whole_steps():
    u, _, grid, _ = make_setup()
    # a bump height that is an exact number of steps makes the shift a
    # pure level lookup on the plateau
    c0 = 4.0 * grid.dt
    profile = CloakProfile(c0=c0, c1=C1, dim=1)
    v = map_solution(u, profile)
    mid = grid.points // 2
    assert profile.c_value(grid.axis[mid]) == c0
    for k, t in enumerate(u.times):
        if t < c0:
            continue
        assert v.values[k, mid] == pytest.approx(
            u.values[k - 4, mid], rel=1e-9, abs=1e-15
        )


def test_void_mask_matches_classification(setup1d):
    u, profile, grid, _ = setup1d
    v = map_solution(u, profile)
    for k in (0, u.n_levels // 2, u.n_levels - 1):
        for j in range(0, grid.points, 7):
            expect = profile.classify(u.times[k], grid.axis[j]) is RegionLabel.Y_ZERO
            assert bool(v.mask[k, j]) == expect
    assert np.all(np.isnan(v.values[v.mask]))
    assert not np.any(np.isnan(v.values[~v.mask]))


def test_map_at_times_out_of_window_raises(setup1d):
    u, profile, _, _ = setup1d
    with pytest.raises(CoverageExceededError):
        map_at_times(u, profile, [u.times[-1] + 1.0])


# ---------------------------------------------------------------------------
# gluing
# ---------------------------------------------------------------------------


def test_glue_zero_field_is_exact(setup1d):
    _, profile, grid, _ = setup1d
    zero = solve_physical(grid, A, BoundarySignal(
        shape="ricker", t_on=-0.9, t_off=-0.35, amplitude=0.0, faces=("x_min",)))
    rep = glue_check(map_solution(zero, profile), zero)
    assert rep.value_jump == 0.0
    assert rep.deriv_jump == 0.0


def test_glue_small_on_true_solution(setup1d):
    u, profile, _, _ = setup1d
    rep = glue_check(map_solution(u, profile), u)
    assert rep.value_jump < 1e-5
    assert rep.deriv_jump < 0.05


def test_glue_detects_artificial_offset(setup1d):
    u, profile, grid, _ = setup1d
    v = map_solution(u, profile)
    base = glue_check(v, u)
    delta = 0.37
    above = u.times >= 0.0
    mid = grid.points // 2
    # a constant offset of the whole upper branch at one cell passes
    # straight through the extrapolation as a value jump
    v.values[above, mid] += delta
    rep = glue_check(v, u)
    assert rep.value_jump == pytest.approx(delta, abs=base.value_jump + 1e-10)
    assert rep.deriv_jump == pytest.approx(base.deriv_jump, abs=1e-7)


def test_glue_needs_levels_below_zero(setup1d):
    u, profile, _, _ = setup1d
    grid = Grid.build(1, 1.0, 129, -2.0 * u.grid.dt, 0.8, u.grid.dt, 0.9)
    sub = type(u)(grid, u.values[: grid.n_levels], grid.times)
    with pytest.raises(CoverageExceededError):
        glue_check(map_solution(sub, profile), sub)


# ---------------------------------------------------------------------------
# residual
# ---------------------------------------------------------------------------


def test_residual_zero_on_constant_field(setup1d):
    u, profile, _, _ = setup1d
    v = map_solution(u, profile)
    v.values[...] = 3.25
    v.field.mask = None
    res, valid = residual_field(v, A)
    assert np.any(valid)
    assert np.all(res[valid] == 0.0)


def test_residual_tiny_on_spatially_affine_field(setup1d):
    u, profile, grid, _ = setup1d
    v = map_solution(u, profile)
    v.values[...] = 0.5 + 2.0 * grid.axis
    v.field.mask = None
    res, valid = residual_field(v, A)
    scale = np.abs(v.values).max()
    assert np.abs(res[valid]).max() <= 1e-12 * scale


def test_residual_tiny_on_affine_spacetime_flat_profile(setup1d):
    u, _, grid, _ = setup1d
    flat = CloakProfile(c0=0.0, c1=C1, dim=1)
    v = map_solution(u, flat)
    v.values[...] = 1.0 + 0.7 * u.times[:, np.newaxis] - 1.3 * grid.axis
    res, valid = residual_field(v, A)
    # the time term is rounding-limited: second differences of exact
    # on-grid values divided by dt^2 amplify eps by 1/dt^2
    dt = float(u.times[1] - u.times[0])
    tol = 100.0 * np.finfo(float).eps * np.abs(v.values).max() / dt**2
    assert np.abs(res[valid]).max() <= tol


def test_residual_on_mapped_solution_refines_at_second_order(setup1d):
    errs = []
    for points in (129, 257):
        u, profile, _, _ = make_setup(points)
        res, valid = residual_field(map_solution(u, profile), A)
        assert np.all(np.isnan(res[0]))
        errs.append(np.abs(res[valid]).max())
    order = np.log2(errs[0] / errs[1])
    assert 1.5 <= order <= 2.6


def test_residual_valid_mask_avoids_void_and_edges(setup1d):
    u, profile, grid, _ = setup1d
    v = map_solution(u, profile)
    _, valid = residual_field(v, A)
    assert not np.any(valid[:2])
    assert not np.any(valid[:, :2]) and not np.any(valid[:, -2:])
    # two-cell buffer around every void cell
    lev, cell = np.nonzero(v.mask)
    for dk in (-2, -1, 0, 1, 2):
        for dj in (-2, -1, 0, 1, 2):
            assert not np.any(valid[lev + dk, cell + dj])


def test_residual_single_point_matches_field(setup1d):
    u, profile, grid, _ = setup1d
    v = map_solution(u, profile)
    res, valid = residual_field(v, A)
    lev, cell = np.nonzero(valid)
    pick = (int(lev[len(lev) // 2]), int(cell[len(cell) // 2]))
    assert residual_transformed(v, A, pick) == res[pick]


def test_residual_point_error_reporting(setup1d):
    u, profile, _, _ = setup1d
    v = map_solution(u, profile)
    with pytest.raises(StencilTouchesBoundaryError):
        residual_transformed(v, A, (0, 5))
    with pytest.raises(StencilTouchesBoundaryError):
        residual_transformed(v, A, (5, 0))
    lev, cell = np.nonzero(v.mask)
    pick = (int(lev[0]) + 1, int(cell[0]))
    with pytest.raises(StencilTouchesVoidError):
        residual_transformed(v, A, pick)


# ---------------------------------------------------------------------------
# direct slab solve
# ---------------------------------------------------------------------------


def test_slice_requires_clearing_the_bump(setup1d):
    u, profile, _, _ = setup1d
    with pytest.raises(CoverageExceededError):
        slice_initial_data(u, profile, 0.5 * profile.c0)


def test_slice_flat_profile_reduces_to_levels(setup1d):
    u, _, grid, _ = setup1d
    flat = CloakProfile(c0=0.0, c1=C1, dim=1)
    k = int(np.searchsorted(u.times, 0.0)) + 3
    v_sl, vt_sl = slice_initial_data(u, flat, float(u.times[k]))
    assert np.array_equal(v_sl, u.values[k])
    expect = (u.values[k + 1] - u.values[k - 1]) / (2.0 * grid.dt)
    assert np.allclose(vt_sl, expect, rtol=0.0, atol=1e-10)


def test_direct_solve_zero_data_stays_zero(setup1d):
    u, profile, grid, sig = setup1d
    shape = grid.shape
    zero = (np.zeros(shape), np.zeros(shape))
    d = solve_transformed_above(zero, sig, A, profile, grid,
                                y0_start=profile.c0, y0_max=profile.c0 + 0.3)
    assert np.all(d.values == 0.0)
    assert d.provenance == "DirectSolve"


def test_direct_solve_flat_profile_restart(setup1d):
    """With no bump the slab solve must reproduce the stored levels."""
    u, _, grid, sig = setup1d
    flat = CloakProfile(c0=0.0, c1=C1, dim=1)
    k0 = int(np.searchsorted(u.times, 0.0)) + 1
    y0 = float(u.times[k0])
    init = slice_initial_data(u, flat, y0)
    d = solve_transformed_above(init, sig, A, flat, grid,
                                y0_start=y0, y0_max=y0 + 0.4)
    scale = np.abs(u.values).max()
    err = cross_agreement(d, u)
    assert err <= 1e-12 * scale


def test_cross_agreement_on_real_profile(setup1d):
    u, profile, grid, sig = setup1d
    init = slice_initial_data(u, profile, profile.c0)
    d = solve_transformed_above(init, sig, A, profile, grid,
                                y0_start=profile.c0, y0_max=profile.c0 + 0.4)
    assert cross_agreement(d, u) < 0.5
