"""Hyperbolicity and feasibility analysis.

Covers the principal symbol of the time-shifted wave operator, its
characteristic roots, the strict-hyperbolicity margin ``1 - a^2 |grad c|^2``,
and the general-metric machinery: coefficient transform under the time change,
hyperbolicity of the transformed operator, time-like boundary check and the
elliptic sufficient bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NotHyperbolicError, PreconditionViolatedError
from .profile import CloakProfile

__all__ = [
    "Covector",
    "Metric",
    "FeasibilityReport",
    "principal_symbol",
    "characteristic_roots",
    "hyperbolicity_margin",
    "max_admissible_c0",
    "transform_metric",
    "check_hyperbolic_general",
    "check_timelike_boundary",
    "elliptic_bound_check",
    "annulus_samples",
]


@dataclass(frozen=True)
class Covector:
    """Spacetime covector (eta0 dual to time, eta dual to space)."""

    eta0: float
    eta: tuple[float, ...]


@dataclass(frozen=True)
class FeasibilityReport:
    margin_min: float
    margin_argmin: tuple[float, ...]
    admissible: bool
    samples: int

    def to_dict(self) -> dict:
        return {
            "margin_min": self.margin_min,
            "argmin": list(self.margin_argmin),
            "admissible": self.admissible,
            "samples": self.samples,
        }


@dataclass(frozen=True)
class Metric:
    """Symmetric (n+1)x(n+1) coefficient field g^{jk}(x0, x), index 0 = time.

    ``eval`` maps (x0, x) -> matrix.  Invariants (symmetry, g^{00} > 0,
    nondegenerate spatial block) are checked on evaluation.
    """

    dim: int
    eval: Callable[[float, Sequence[float]], np.ndarray]
    name: str = ""

    def at(self, x0: float, x) -> np.ndarray:
        g = np.asarray(self.eval(x0, x), dtype=float)
        n = self.dim
        if g.shape != (n + 1, n + 1):
            raise ValueError(f"metric must be {(n + 1, n + 1)}, got {g.shape}")
        if not np.allclose(g, g.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(g).max())):
            raise ValueError("metric matrix must be symmetric")
        if g[0, 0] <= 0.0:
            raise ValueError("metric requires g^{00} > 0")
        if abs(np.linalg.det(g[1:, 1:])) == 0.0:
            raise ValueError("spatial block of the metric is degenerate")
        return 0.5 * (g + g.T)

    # ---- presets --------------------------------------------------------

    @staticmethod
    def minkowski(a: float, dim: int) -> "Metric":
        g = np.diag([1.0] + [-a * a] * dim)

        def _eval(x0, x, _g=g):
            return _g

        return Metric(dim=dim, eval=_eval, name=f"minkowski(a={a})")

    @staticmethod
    def diagonal_demo(dim: int) -> "Metric":
        """Smooth diagonal metric with mild spatial variation of the speeds."""

        def _eval(x0, x):
            x = np.atleast_1d(np.asarray(x, dtype=float))
            g = np.zeros((dim + 1, dim + 1))
            g[0, 0] = 1.0 + 0.2 * math.exp(-float(x @ x))
            for j in range(dim):
                g[j + 1, j + 1] = -(1.0 + 0.3 * math.sin(2.0 * x[j])) ** 2
            return g

        return Metric(dim=dim, eval=_eval, name="diagonal_demo")

    @staticmethod
    def from_table(axes: Sequence[np.ndarray], values: np.ndarray) -> "Metric":
        """Tabulated metric on a rectilinear spatial grid, time-independent.

        ``values`` has shape grid_shape + (n+1, n+1); entries are interpolated
        linearly in space.
        """
        from scipy.interpolate import RegularGridInterpolator

        axes = [np.asarray(ax, dtype=float) for ax in axes]
        dim = len(axes)
        values = np.asarray(values, dtype=float)
        interp = RegularGridInterpolator(axes, values, bounds_error=False, fill_value=None)

        def _eval(x0, x):
            pt = np.atleast_1d(np.asarray(x, dtype=float)).reshape(1, dim)
            return interp(pt)[0]

        return Metric(dim=dim, eval=_eval, name="tabulated")


# ---------------------------------------------------------------------------
# principal symbol and characteristic roots
# ---------------------------------------------------------------------------


def principal_symbol(a: float, cgrad, eta0: float, eta) -> float:
    """eta0^2 - a^2 sum_j (eta_j + c_{y_j} eta0)^2."""
    cgrad = np.atleast_1d(np.asarray(cgrad, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    shifted = eta + cgrad * eta0
    return float(eta0 * eta0 - a * a * np.dot(shifted, shifted))


def characteristic_roots(a: float, cgrad, eta) -> tuple[float, float]:
    """The two real roots eta0 of the principal symbol, largest first.

    Raises NotHyperbolicError when the strict-hyperbolicity condition
    ``1 - a^2 |grad c|^2 > 0`` fails (the roots stop being real for
    covectors orthogonal to grad c) or the discriminant is nonpositive.
    """
    cgrad = np.atleast_1d(np.asarray(cgrad, dtype=float))
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    eta_sq = float(eta @ eta)
    if eta_sq == 0.0:
        raise ValueError("spatial covector eta must be nonzero")
    q = 1.0 - a * a * float(cgrad @ cgrad)
    dot = float(cgrad @ eta)
    disc = a ** 4 * dot * dot + q * a * a * eta_sq
    if q <= 0.0 or disc <= 0.0:
        raise NotHyperbolicError(
            f"no two distinct real characteristic roots (margin={q:.6g})"
        )
    root = math.sqrt(disc)
    return ((a * a * dot + root) / q, (a * a * dot - root) / q)


def max_characteristic_slope(a: float, margin: float) -> float:
    """Largest |eta0| / |eta| over unit covectors, from the margin alone.

    For a radial profile the worst direction aligns eta with grad c, which
    collapses the root formula to a(1 + sqrt(1 - margin)) / margin.
    """
    if margin <= 0.0:
        raise NotHyperbolicError(f"margin must be positive, got {margin}")
    return a * (1.0 + math.sqrt(max(0.0, 1.0 - margin))) / margin


# ---------------------------------------------------------------------------
# margins over sample grids
# ---------------------------------------------------------------------------


def annulus_samples(profile: CloakProfile, spacing: float | None = None) -> np.ndarray:
    """Regular sample points covering the gradient-carrying annulus.

    Returns an (m, dim) array with spacing <= c1/64 by default.
    """
    if spacing is None:
        spacing = profile.c1 / 64.0
    spacing = min(spacing, profile.c1 / 64.0)
    c = np.asarray(profile.center)
    lo, hi = -profile.c1, profile.c1
    n = int(math.ceil((hi - lo) / spacing)) + 1
    axis = np.linspace(lo, hi, n)
    if profile.dim == 1:
        pts = axis[:, np.newaxis] + c
    else:
        gx, gy = np.meshgrid(axis, axis, indexing="ij")
        pts = np.stack([gx.ravel(), gy.ravel()], axis=-1) + c
    r = np.linalg.norm(pts - c, axis=-1)
    keep = (r >= 0.5 * profile.c1 - spacing) & (r <= profile.c1 + spacing)
    return pts[keep]


def hyperbolicity_margin(
    profile: CloakProfile, a: float, sample_grid: np.ndarray | None = None
) -> FeasibilityReport:
    """Minimum of ``1 - a^2 |grad c|^2`` over the sample grid."""
    if sample_grid is None:
        sample_grid = annulus_samples(profile)
    pts = np.asarray(sample_grid, dtype=float)
    grad = profile.c_grad(pts)
    margins = 1.0 - a * a * np.sum(grad * grad, axis=-1)
    i = int(np.argmin(margins))
    argmin = pts[i]
    return FeasibilityReport(
        margin_min=float(margins[i]),
        margin_argmin=tuple(np.atleast_1d(argmin).tolist()),
        admissible=bool(margins[i] > 0.0),
        samples=len(pts),
    )


def max_admissible_c0(a: float, c1: float) -> float:
    """Supremum of c0 keeping the septic profile strictly hyperbolic.

    Inverts a * max|grad c| < 1 with max|grad c| = 35 c0 / (8 c1).
    """
    if a <= 0.0 or c1 <= 0.0:
        raise ValueError("a and c1 must be positive")
    return 8.0 * c1 / (35.0 * a)


# ---------------------------------------------------------------------------
# general-metric machinery
# ---------------------------------------------------------------------------


def _phi0_gradient(profile: CloakProfile, x0: float, x) -> np.ndarray:
    """Spacetime gradient of the time change at (x0, x): (1, grad c) above
    the jump, (1, 0) below."""
    grad = np.zeros(profile.dim + 1)
    grad[0] = 1.0
    if x0 >= 0.0:
        grad[1:] = np.atleast_1d(profile.c_grad(x))
    return grad


def transform_metric(metric: Metric, profile: CloakProfile, point) -> np.ndarray:
    """Coefficients of the operator after the time change.

    Spatial block is copied, the 00 entry becomes the metric square of the
    time-change gradient, and the 0j entries its metric pairing with e_j.
    """
    x0, x = point
    g = metric.at(x0, x)
    phi = _phi0_gradient(profile, x0, x)
    ghat = g.copy()
    ghat[0, 0] = float(phi @ g @ phi)
    row = g @ phi
    ghat[0, 1:] = row[1:]
    ghat[1:, 0] = row[1:]
    return 0.5 * (ghat + ghat.T)


def check_hyperbolic_general(
    metric: Metric,
    profile: CloakProfile,
    sample_grid: np.ndarray | None = None,
    x0: float = 0.0,
) -> FeasibilityReport:
    """Transformed-operator hyperbolicity: positivity of the 00 coefficient."""
    if sample_grid is None:
        sample_grid = annulus_samples(profile)
    pts = np.asarray(sample_grid, dtype=float)
    best = math.inf
    argmin = pts[0]
    for p in pts:
        phi = _phi0_gradient(profile, x0, p)
        g = metric.at(x0, p)
        val = float(phi @ g @ phi)
        if val < best:
            best, argmin = val, p
    return FeasibilityReport(
        margin_min=best,
        margin_argmin=tuple(np.atleast_1d(argmin).tolist()),
        admissible=bool(best > 0.0),
        samples=len(pts),
    )


@dataclass(frozen=True)
class TimelikeReport:
    timelike: bool
    worst_value: float
    transformed_timelike: bool

    def to_dict(self) -> dict:
        return {
            "timelike": self.timelike,
            "worst_value": self.worst_value,
            "transformed_timelike": self.transformed_timelike,
        }


def check_timelike_boundary(
    metric: Metric,
    boundary_points_with_normals,
    profile: CloakProfile | None = None,
) -> TimelikeReport:
    """Check the quadratic form in the spacetime normal is negative on the
    lateral boundary, for both the original and the transformed metric.

    ``boundary_points_with_normals`` is an iterable of ((x0, x), nu) with
    nu a spacetime vector of length dim+1 (nu0 = 0 for a cylinder).
    """
    worst = -math.inf
    worst_hat = -math.inf
    for (x0, x), nu in boundary_points_with_normals:
        nu = np.asarray(nu, dtype=float)
        g = metric.at(x0, x)
        worst = max(worst, float(nu @ g @ nu))
        if profile is not None:
            ghat = transform_metric(metric, profile, (x0, x))
            worst_hat = max(worst_hat, float(nu @ ghat @ nu))
    if profile is None:
        worst_hat = worst
    return TimelikeReport(
        timelike=worst < 0.0,
        worst_value=worst,
        transformed_timelike=worst_hat < 0.0,
    )


@dataclass(frozen=True)
class EllipticBoundReport:
    positivity_holds: bool
    positivity_min: float
    sufficient_bound_holds: bool

    def to_dict(self) -> dict:
        return {
            "positivity_holds": self.positivity_holds,
            "positivity_min": self.positivity_min,
            "sufficient_bound_holds": self.sufficient_bound_holds,
        }


def elliptic_bound_check(
    metric: Metric,
    C0: float,
    profile: CloakProfile,
    sample_grid: np.ndarray | None = None,
    x0: float = 0.0,
) -> EllipticBoundReport:
    """For metrics with elliptic spatial part and no time-space coupling,
    check positivity of g^{00} + sum g^{jk} c_j c_k and the sufficient bound
    |grad c|^2 <= g^{00} / C0."""
    if sample_grid is None:
        sample_grid = annulus_samples(profile)
    pts = np.asarray(sample_grid, dtype=float)
    pos_min = math.inf
    bound_ok = True
    for p in pts:
        g = metric.at(x0, p)
        scale = max(1.0, float(np.abs(g).max()))
        if np.abs(g[0, 1:]).max() > 1e-12 * scale:
            raise PreconditionViolatedError(
                "elliptic bound check requires vanishing time-space coupling"
            )
        cg = np.atleast_1d(profile.c_grad(p))
        val = float(g[0, 0] + cg @ g[1:, 1:] @ cg)
        pos_min = min(pos_min, val)
        if float(cg @ cg) > g[0, 0] / C0:
            bound_ok = False
    return EllipticBoundReport(
        positivity_holds=pos_min > 0.0,
        positivity_min=pos_min,
        sufficient_bound_holds=bound_ok,
    )
