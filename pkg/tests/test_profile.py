import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from timecloak.errors import CloakedPointError
from timecloak.profile import CloakProfile, RegionLabel

C0, C1 = 0.1, 0.5


def make_profile(dim=1, center=None, c0=C0, c1=C1):
    center = center if center is not None else (0.0,) * dim
    return CloakProfile(c0=c0, c1=c1, center=center, dim=dim)


# ---------------------------------------------------------------------------
# bump shape
# ---------------------------------------------------------------------------


def test_chi_plateau_is_one():
    p = make_profile()
    assert p.chi(0.0) == 1.0
    assert p.chi(0.2 * C1) == 1.0


def test_chi_support_boundary_is_zero():
    p = make_profile()
    assert p.chi(C1) == 0.0
    assert p.chi(1.7 * C1) == 0.0


def test_chi_midramp_is_half():
    # the smoothstep is symmetric about the midpoint of the ramp
    p = make_profile()
    assert p.chi(0.75 * C1) == pytest.approx(0.5, abs=1e-14)
    p2 = make_profile(dim=2, center=(0.3, -0.2))
    pt = np.array([0.3, -0.2 + 0.75 * C1])
    assert p2.chi(pt) == pytest.approx(0.5, abs=1e-14)


def test_chi_monotone_in_radius():
    p = make_profile()
    r = np.linspace(0.0, 1.2 * C1, 400)
    vals = p.chi(r[:, np.newaxis])
    assert np.all(np.diff(vals) <= 1e-15)


def test_c_value_center():
    p = make_profile()
    assert p.c_value(0.0) == C0
    p2 = make_profile(dim=2)
    assert p2.c_value(np.zeros(2)) == C0


def test_c_grad_zero_on_plateau_and_outside():
    p = make_profile(dim=2)
    for pt in (np.zeros(2), np.array([0.2 * C1, 0.0]), np.array([C1, 0.0]),
               np.array([2.0 * C1, 0.5])):
        assert np.all(p.c_grad(pt) == 0.0)


def test_max_grad_formula_matches_sampled_maximum():
    p = make_profile()
    r = np.linspace(0.0, C1, 20001)
    g = np.abs(p.c_grad(r[:, np.newaxis])[:, 0])
    assert g.max() == pytest.approx(p.max_grad, rel=1e-8)
    # attained at three quarters of the radius
    assert r[np.argmax(g)] == pytest.approx(0.75 * C1, abs=1e-3)


@pytest.mark.parametrize("dim", [1, 2])
def test_c_grad_matches_finite_differences(dim):
    p = make_profile(dim=dim)
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1.2 * C1, 1.2 * C1, size=(40, dim))
    ratios = []
    for h in (1e-3, 5e-4):
        err = 0.0
        for x in pts:
            num = np.zeros(dim)
            for j in range(dim):
                e = np.zeros(dim)
                e[j] = h
                num[j] = (p.c_value(x + e) - p.c_value(x - e)) / (2 * h)
            err = max(err, np.max(np.abs(num - p.c_grad(x))))
        ratios.append(err)
    # halving the step divides the mismatch by about four
    assert ratios[1] < 0.35 * ratios[0]


@pytest.mark.parametrize("dim", [1, 2])
def test_c_laplacian_matches_finite_differences(dim):
    p = make_profile(dim=dim)
    rng = np.random.default_rng(8)
    pts = rng.uniform(-1.2 * C1, 1.2 * C1, size=(30, dim))
    h = 1e-3
    for x in pts:
        num = 0.0
        for j in range(dim):
            e = np.zeros(dim)
            e[j] = h
            num += (p.c_value(x + e) - 2.0 * p.c_value(x) + p.c_value(x - e)) / h**2
        # the fourth derivative of the ramp polynomial is large, so the
        # centered-difference bias dominates the tolerance
        assert num == pytest.approx(float(p.c_laplacian(x)), abs=5e-3)


# ---------------------------------------------------------------------------
# time change
# ---------------------------------------------------------------------------


def test_phi0_branches():
    p = make_profile()
    assert p.phi0(-1.0, 0.3) == -1.0
    assert p.phi0(0.0, 0.0) == C0
    assert p.phi0(2.0, 1.5 * C1) == 2.0


def test_phi0_jump_size_equals_c():
    p = make_profile()
    x = 0.6 * C1
    below = p.phi0(-1e-12, x)
    at = p.phi0(0.0, x)
    assert at - below == pytest.approx(float(p.c_value(x)), abs=1e-10)


def test_psi_branches_and_void():
    p = make_profile()
    assert p.psi(-3.0, 0.0) == -3.0
    assert p.psi(C0 + 1.0, 0.0) == pytest.approx(1.0)
    with pytest.raises(CloakedPointError):
        p.psi(0.5 * C0, 0.0)


def test_classify():
    p = make_profile()
    assert p.classify(-0.1, 0.0) is RegionLabel.Y_MINUS
    assert p.classify(0.5 * C0, 0.0) is RegionLabel.Y_ZERO
    assert p.classify(0.5, C1) is RegionLabel.Y_PLUS
    # half-open void: the bump surface itself belongs to the upper region
    assert p.classify(C0, 0.0) is RegionLabel.Y_PLUS


def test_region_codes_partition():
    p = make_profile(dim=2)
    rng = np.random.default_rng(9)
    y = rng.uniform(-1.0, 1.0, size=(200, 2))
    y0 = rng.uniform(-1.0, 1.0, size=200)
    codes = p.region_codes(y0, y)
    assert set(np.unique(codes)) <= {0, 1, 2}
    c = p.c_value(y)
    assert np.array_equal(codes == 0, y0 < 0.0)
    assert np.array_equal(codes == 1, (y0 >= 0.0) & (y0 < c))


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------

coords = st.floats(-1.0, 1.0, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(x0=st.floats(-5.0, 5.0, allow_nan=False), x=coords)
def test_round_trip(x0, x):
    p = make_profile()
    y0 = p.phi0(x0, x)
    assert p.classify(y0, x) is not RegionLabel.Y_ZERO
    # exact below the jump; one rounding of the shift-and-unshift above it
    if x0 < 0.0:
        assert p.psi(y0, x) == x0
    else:
        assert p.psi(y0, x) == pytest.approx(x0, abs=1e-15 * max(1.0, abs(x0)))


@settings(max_examples=200, deadline=None)
@given(a=st.floats(-5.0, 5.0, allow_nan=False),
       b=st.floats(-5.0, 5.0, allow_nan=False), x=coords)
def test_phi0_strictly_increasing(a, b, x):
    lo, hi = sorted((a, b))
    if hi - lo < 1e-12:  # gap must survive the addition's rounding
        return
    p = make_profile()
    assert p.phi0(lo, x) < p.phi0(hi, x)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(C1, 10.0, allow_nan=False), sign=st.sampled_from([-1.0, 1.0]))
def test_support(x, sign):
    p = make_profile()
    assert p.c_value(sign * x) == 0.0
    assert np.all(p.c_grad(sign * x) == 0.0)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        CloakProfile(c0=-0.1, c1=1.0)
    with pytest.raises(ValueError):
        CloakProfile(c0=0.1, c1=0.0)
    with pytest.raises(ValueError):
        CloakProfile(c0=0.1, c1=1.0, dim=3)
    with pytest.raises(ValueError):
        CloakProfile(c0=0.1, c1=1.0, center=(0.0, 0.0), dim=1)


def test_contains_ball():
    p = make_profile(dim=2, center=(0.5, 0.0))
    assert p.contains_ball(extent=1.1)
    assert not p.contains_ball(extent=1.0)
    assert not p.contains_ball(extent=1.1, margin=0.2)
