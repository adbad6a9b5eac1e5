"""Limiting (long-time) distribution of the rescaled stationary interface height.

The limit CDF at rescaled position w is

    F_w(s) = d/ds [ F_gue(s + w^2) * g(s + w^2, w) ],

where F_gue is the Fredholm determinant of the Airy kernel (the GUE Tracy-Widom
law) and g carries the stationary-initial-data correction.  g is assembled from
a linear part, a one-dimensional exponentially weighted Airy integral and an
Airy-resolvent inner product; see g_func.  All quadratures run on semi-infinite
Gauss-Legendre rules from the fredholm module; the CDF itself comes from a
5-point numerical derivative with one Richardson step.

Only w > 0 is supported: the resolvent representation used here is the w > 0
branch (w = 0 is served by the right-limit convention in g_sc).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .fredholm import build_semi_infinite_rule, build_system, fredholm_det, resolvent_solve
from .specialfn import airy_ai, airy_kernel

__all__ = [
    "LimitLawRequest",
    "DistributionCurve",
    "f_gue",
    "hat_phi",
    "hat_psi",
    "g_func",
    "limit_cdf",
    "moments_by_parts",
    "g_sc",
    "g_sc_second_derivative",
    "curve_from_mass_function",
]

_DERIV_STEP = 1e-3
_W_ZERO_LIMIT = 1e-3  # right-limit evaluation point standing in for w = 0

DEFAULT_S_GRID = np.round(np.arange(-12.0, 9.0 + 1e-12, 0.125), 6)


class NumericalConsistencyError(RuntimeError):
    """A computed curve violated a structural property beyond tolerance."""


@dataclass(frozen=True)
class LimitLawRequest:
    """Parameters for tabulating the limit law at one rescaled position."""

    w: float
    s_grid: np.ndarray = field(default_factory=lambda: DEFAULT_S_GRID.copy())
    n_quad: int = 64

    def __post_init__(self):
        grid = np.asarray(self.s_grid, dtype=float)
        if grid.ndim != 1 or grid.size < 4 or np.any(np.diff(grid) <= 0):
            raise ValueError("s_grid must be an increasing 1-d grid")
        object.__setattr__(self, "s_grid", grid)
        if self.n_quad < 16:
            raise ValueError("n_quad too small")


@dataclass
class DistributionCurve:
    """A CDF/PDF sampled on an s-grid together with its moments."""

    s: np.ndarray
    cdf: np.ndarray
    pdf: np.ndarray
    moments: np.ndarray  # orders 0..4
    quad_error: float

    def moment(self, order: int) -> float:
        return float(self.moments[order])


def _require_positive_w(w: float) -> None:
    if not (w > 0.0):
        raise ValueError(
            "w must be positive: the w <= 0 branch needs a different decomposition "
            "and is not supported")


def f_gue(s: float, n_quad: int = 64, map_scale: float = 4.0) -> float:
    """GUE Tracy-Widom CDF via det(1 - P_s K_Ai P_s) on [s, inf)."""
    if not np.isfinite(s):
        raise ValueError("s must be finite")
    system = build_system(lambda x, y: airy_kernel(x, y, 0.0), s, n_quad, map_scale)
    return fredholm_det(system)


def _panel_rule(span: float, panel_width: float = 2.0, n_per_panel: int = 16):
    """Composite Gauss-Legendre rule on [0, span] (for oscillatory decaying
    integrands a mapped half-line rule resolves poorly)."""
    from numpy.polynomial.legendre import leggauss
    xi, wq = leggauss(n_per_panel)
    n_panels = max(1, int(math.ceil(span / panel_width)))
    half = 0.5 * span / n_panels
    starts = np.linspace(0.0, span, n_panels + 1)[:-1]
    nodes = (starts[:, None] + half * (1.0 + xi)[None, :]).ravel()
    weights = np.tile(wq * half, n_panels)
    return nodes, weights


def _neg_axis_rule(w: float, s: float, tol: float = 1e-11):
    """Rule for int_{R_-} e^{w z} f(z + s) dz with |f| Airy-bounded: nodes zeta > 0
    for the reflected variable, covering the oscillatory region past |s|."""
    span = max(12.0, abs(min(s, 0.0)) + 4.0) - math.log(tol) / w
    return _panel_rule(min(span, 600.0))


def hat_psi(w: float, s: float, x, n_quad: int = 64) -> float | np.ndarray:
    """int_{R_-} e^{w z} Ai(x + z + s) dz, w > 0."""
    del n_quad  # resolution is set by the panel rule below
    _require_positive_w(w)
    z, wz = _neg_axis_rule(w, s)
    x = np.asarray(x, dtype=float)
    vals = (np.exp(-w * z) * wz) @ special.airy(x[None, ...] - z[:, None] + s)[0] \
        if x.ndim else float(np.dot(np.exp(-w * z) * wz, airy_ai(x - z + s)))
    return vals


def hat_phi(w: float, s: float, x, n_quad: int = 64) -> float | np.ndarray:
    """e^{w s} int_{R_-} e^{w z} K_Ai(z, x; s) dz, w > 0.

    (The e^{w s} prefactor is part of the definition; it keeps the g assembly's
    exponential bookkeeping in one place.)
    """
    del n_quad
    _require_positive_w(w)
    z, wz = _neg_axis_rule(w, s)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    kmat = airy_kernel(-z[:, None], x_arr[None, :], s)
    out = math.exp(w * s) * ((np.exp(-w * z) * wz) @ kmat)
    return out if np.ndim(x) else float(out[0])


def _exp_weighted_ai(c, w):
    """e^{w c} Ai(c), overflow-safe for large positive c."""
    c = np.asarray(c, dtype=float)
    pos = c > 0.0
    cp = np.where(pos, c, 1.0)
    scaled = special.airye(cp)[0] * np.exp(w * cp - (2.0 / 3.0) * cp ** 1.5)
    plain = special.airy(np.where(pos, 0.0, c))[0] * np.exp(w * np.where(pos, 0.0, c))
    return np.where(pos, scaled, plain)


def g_func(s: float, w: float, n_quad: int = 64) -> float:
    """Stationary correction factor g(s, w) of the limit law, w > 0.

    Three pieces:
      linear:    s - w^2
      area term: e^{-w^3/3} int_0^inf v e^{w(s+v)} Ai(s+v) dv
                 (the 1-d reduction of the double integral over x+y = v)
      resolvent: e^{-w^3/3} <hat_psi, (1 - P_0 K_Ai,s P_0)^{-1} hat_phi> on R_+
    With this normalization F_gue(s+w^2) g(s+w^2, w) - s -> 0 as s -> +inf, which
    is what makes d/ds of the product a proper CDF of total mass one.
    """
    _require_positive_w(w)
    # area term; the integrand oscillates on [0, |s|] when s < 0, so use panels
    v, wv = _panel_rule(abs(min(s, 0.0)) + 16.0)
    area = math.exp(-w ** 3 / 3.0) * float(np.dot(wv * v, _exp_weighted_ai(s + v, w)))
    # resolvent term
    system = build_system(lambda xx, yy: airy_kernel(xx, yy, s), 0.0, n_quad, 4.0)
    det = fredholm_det(system)
    if det <= 1e-12:
        raise NumericalConsistencyError(f"Airy resolvent nearly singular (det={det:.2e})")
    x = system.rule.nodes
    phi = np.asarray(hat_phi(w, s, x, n_quad))
    psi = np.asarray(hat_psi(w, s, x, n_quad))
    sol = resolvent_solve(system, phi)
    resv = math.exp(-w ** 3 / 3.0) * float(np.dot(system.rule.weights, psi * sol))
    return (s - w * w) + area + resv


def _mass_derivative(mass_fn, s: float, h: float = _DERIV_STEP) -> float:
    """5-point derivative of mass_fn at s with one Richardson step (h and h/2)."""

    def d5(step):
        return (mass_fn(s - 2 * step) - 8 * mass_fn(s - step)
                + 8 * mass_fn(s + step) - mass_fn(s + 2 * step)) / (12 * step)

    d_h = d5(h)
    d_h2 = d5(h / 2)
    return (16.0 * d_h2 - d_h) / 15.0


def curve_from_mass_function(mass_fn, s_grid: np.ndarray, h: float = _DERIV_STEP,
                             monotone_slack: float = 1e-5) -> DistributionCurve:
    """Differentiate a smooth mass function into a sampled CDF/PDF with moments.

    mass_fn(s) must tend to 0 at -inf and to s + O(exp) at +inf; its derivative is
    the CDF.  Moments are Stieltjes sums over the grid plus endpoint lumps for the
    truncated tails (both provably below quadrature error for the shipped grids).
    """
    s_grid = np.asarray(s_grid, dtype=float)
    cdf = np.array([_mass_derivative(mass_fn, s, h) for s in s_grid])
    drops = np.diff(cdf)
    worst = float(-drops.min()) if drops.size else 0.0
    if worst > monotone_slack:
        raise NumericalConsistencyError(
            f"computed CDF decreases by {worst:.2e} (> {monotone_slack:.0e} slack)")
    pdf = np.gradient(cdf, s_grid)
    mids = 0.5 * (s_grid[1:] + s_grid[:-1])
    dF = np.diff(cdf)
    left_lump = max(float(cdf[0]), 0.0)
    right_lump = max(float(1.0 - cdf[-1]), 0.0)
    moments = np.empty(5)
    for ell in range(5):
        core = float(np.dot(mids ** ell, dF))
        moments[ell] = core + left_lump * s_grid[0] ** ell + right_lump * s_grid[-1] ** ell
    quad_error = abs(moments[0] - 1.0) + left_lump + right_lump
    return DistributionCurve(s=s_grid.copy(), cdf=cdf, pdf=pdf,
                             moments=moments, quad_error=quad_error)


def _limit_mass_function(w: float, n_quad: int):
    """s -> F_gue(s+w^2) g(s+w^2, w) with tail short-circuits.

    Deep in the left tail the determinant underflows and the resolvent is
    singular, but the product is below 1e-12 there; far in the right tail
    s - F_gue*g decays exponentially and is below 1e-12 past s = 12.  Both
    regions are replaced by their limits, keeping the function smooth to well
    under the differentiation noise floor.
    """

    def mass(s: float) -> float:
        if s >= 12.0:
            return float(s)
        sig = s + w * w
        det = f_gue(sig, n_quad)
        if det < 1e-11:
            return 0.0
        return det * g_func(sig, w, n_quad)

    return mass


def limit_cdf(request: LimitLawRequest) -> DistributionCurve:
    """Tabulate the limit CDF F_w on the requested grid."""
    w = request.w
    _require_positive_w(w)
    mass = _limit_mass_function(w, request.n_quad)
    curve = curve_from_mass_function(mass, request.s_grid)
    if curve.cdf[0] > 1e-3 or curve.cdf[-1] < 1.0 - 1e-3:
        raise NumericalConsistencyError(
            f"CDF endpoints {curve.cdf[0]:.2e}, {curve.cdf[-1]:.6f} not near 0/1; "
            "widen the s_grid")
    return curve


def moments_by_parts(w: float, ell: int, n_quad: int = 64) -> float:
    """Moment of F_w through the two-sided integration-by-parts representation.

    For ell >= 2:
        m_ell = -ell(ell-1) int_0^inf s^{ell-2} (s - M(s)) ds
                - ell int_{-inf}^0 s^{ell-1} F_w(s) ds
    with M(s) = F_gue(s+w^2) g(s+w^2, w); m_1 = M(0) - int_{-inf}^0 F_w(s) ds.
    The only numerical differentiation happens on the negative half-line.
    """
    _require_positive_w(w)
    if ell < 0 or ell > 4:
        raise ValueError("moment order must be in 0..4")
    if ell == 0:
        return 1.0
    mass = _limit_mass_function(w, n_quad)
    pos_rule = build_semi_infinite_rule(0.0, n_quad, 2.0)
    neg_rule = build_semi_infinite_rule(0.0, n_quad, 2.0)
    cdf_neg = np.array([_mass_derivative(mass, -z) for z in neg_rule.nodes])
    if ell == 1:
        return float(mass(0.0) - np.dot(neg_rule.weights, cdf_neg))
    resid = np.array([z - mass(z) for z in pos_rule.nodes])
    pos_part = -ell * (ell - 1) * float(np.dot(pos_rule.weights,
                                               pos_rule.nodes ** (ell - 2) * resid))
    neg_part = -ell * float(np.dot(neg_rule.weights,
                                   (-neg_rule.nodes) ** (ell - 1) * cdf_neg))
    return pos_part + neg_part


def g_sc(w: float, n_quad: int = 64, s_grid: np.ndarray | None = None) -> float:
    """Scaling function: the second moment (= variance) of F_w.

    w = 0 is evaluated at the right limit w = 1e-3; negative w is rejected here
    (callers relying on the evenness of the scaling function take |w| first).
    """
    if w < 0.0:
        raise ValueError("g_sc is defined here for w >= 0; use g_sc(|w|) for w < 0")
    w_eff = max(w, _W_ZERO_LIMIT)
    grid = DEFAULT_S_GRID if s_grid is None else np.asarray(s_grid, dtype=float)
    curve = limit_cdf(LimitLawRequest(w=w_eff, s_grid=grid, n_quad=n_quad))
    return curve.moment(2)


def g_sc_second_derivative(w: float, h: float = 0.2, n_quad: int = 64,
                           g_sc_fn=None) -> float:
    """Second derivative of g_sc by central differences, Richardson over h, h/2."""
    if not (0.05 <= h <= 0.3):
        raise ValueError("h must lie in [0.05, 0.3]")
    fn = g_sc_fn if g_sc_fn is not None else (lambda ww: g_sc(ww, n_quad))
    cache: dict[float, float] = {}

    def g(ww: float) -> float:
        key = round(ww, 12)
        if key not in cache:
            cache[key] = fn(key)
        return cache[key]

    def d2(step: float) -> float:
        return (g(w - step) - 2.0 * g(w) + g(w + step)) / step ** 2

    d_h = d2(h)
    d_h2 = d2(h / 2)
    return (4.0 * d_h2 - d_h) / 3.0
