"""Quadrature and grid-search oracles, independent of the closed forms.

Everything here evaluates densities pointwise and integrates or searches
numerically, so the closed-form entropies, couplings and minimizers in the
rest of the package can be cross-checked against a path that shares no
algebra with them.

Integration uses adaptive Gauss-Kronrod (scipy.integrate.quad), tensorized
over bounding boxes for bivariate integrands.  Domain policy:

* compact supports (q < 1, m < 1): the integration domain is the exact
  support, with edges passed as breakpoints;
* one-dimensional heavy tails (q > 1): the domain is truncated at a radius
  where a power-law envelope provably bounds the discarded mass below
  cfg.tail_mass_bound, with breakpoints on a log ladder so the central
  peak cannot be missed on the huge resulting interval;
* bivariate heavy tails (m > 1): a central box around the means is
  integrated with ladder breakpoints and the wings run to infinity through
  the library's variable transformation.  No truncation: near the
  normalizable limit m = 3/2 the tails decay so slowly that an envelope
  radius for any useful bound overflows, while the transformed wings
  remain accurate.

Each result records the policy applied in its note.

The grid searches are deterministic (no randomness): minimize_kh_grid uses
nested refinement, minimize_theta uses coarse grid + golden section + a
parabolic polish (the polish averages out adaptive-quadrature noise, which
would otherwise limit the minimizer location to ~sqrt(noise/curvature)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .functionals import coefficients
from .qgaussian import MBivariate, QGaussian1D, SupportInterval
from .qmath import DomainError

__all__ = [
    "QuadratureConfig",
    "QuadResult",
    "power_tail_radius",
    "integrate_1d",
    "mass_quad",
    "moment2_quad",
    "entropy_quad",
    "entropy_quad_2d",
    "m_rel_entropy_quad",
    "ThetaMin",
    "minimize_theta",
    "theta_family_minimizer",
    "PythagoreanGap",
    "pythagorean_gap",
    "KhGrid",
    "minimize_kh_grid",
    "support_included",
]

# Central half-width of the exactly integrated box, in units of the largest
# scale parameter; beyond it the transformed wings take over.
_WING_MULT = 20.0


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budget for the quadrature oracle."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 200
    tail_mass_bound: float = 1e-11


class QuadResult(NamedTuple):
    """Integral value with the adaptive error estimate.

    converged is False when the subdivision budget ran out before the
    requested tolerance; note carries the quadrature message and the
    domain policy applied (truncation radius or infinite wings).
    """

    value: float
    error_estimate: float
    converged: bool
    note: str


def _quad(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    cfg: QuadratureConfig,
    points: Sequence[float] | None = None,
    note: str = "",
) -> QuadResult:
    kwargs = {
        "epsabs": cfg.abs_tol,
        "epsrel": cfg.rel_tol,
        "full_output": True,
    }
    pts = None
    if points is not None and math.isfinite(lo) and math.isfinite(hi):
        pts = sorted({p for p in points if lo < p < hi})
        if not pts:
            pts = None
    kwargs["limit"] = max(cfg.max_subdivisions, 3 * len(pts) if pts else 0)
    if pts is not None:
        kwargs["points"] = pts
    out = quad(f, lo, hi, **kwargs)
    converged = len(out) < 4
    msg = "" if converged else str(out[3]).strip().replace("\n", " ")
    full_note = "; ".join(s for s in (note, msg) if s)
    return QuadResult(
        value=float(out[0]), error_estimate=float(out[1]), converged=converged, note=full_note
    )


def _composite_line(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    pts: Sequence[float],
    cfg: QuadratureConfig,
    left_wing: bool = True,
) -> QuadResult:
    """Central cell [lo, hi] plus infinite wings.

    The wings run at an absolute tolerance anchored to the central value:
    they only have to avoid polluting the total at rel_tol level, and
    chasing the wings' own relative precision makes the transformed
    tail integrals arbitrarily expensive.  left_wing=False drops
    (-inf, lo) (for point-symmetric integrands whose caller doubles a
    half-line result).
    """
    central = _quad(f, lo, hi, cfg, pts)
    wing_cfg = QuadratureConfig(
        rel_tol=cfg.rel_tol,
        abs_tol=max(cfg.abs_tol, 100.0 * cfg.rel_tol * abs(central.value)),
        max_subdivisions=cfg.max_subdivisions,
        tail_mass_bound=cfg.tail_mass_bound,
    )
    parts = [central, _quad(f, hi, math.inf, wing_cfg)]
    if left_wing:
        parts.append(_quad(f, -math.inf, lo, wing_cfg))
    return QuadResult(
        value=sum(p.value for p in parts),
        error_estimate=sum(p.error_estimate for p in parts),
        converged=all(p.converged for p in parts),
        note="; ".join(p.note for p in parts if p.note),
    )


def integrate_1d(
    f: Callable[[float], float],
    support: SupportInterval,
    cfg: QuadratureConfig,
    points: Sequence[float] | None = None,
) -> QuadResult:
    """Adaptive quadrature of f over a support interval.

    Infinite endpoints are passed through to the transformation-based
    routine; breakpoints are honored on finite intervals only.
    """
    return _quad(f, support.lo, support.hi, cfg, points)


def power_tail_radius(coef: float, p_decay: float, bound: float) -> float:
    """Radius R with integral_R^inf coef * u^(-p_decay) du <= bound.

    Requires p_decay > 1 (integrable tail).
    """
    if not p_decay > 1.0:
        raise DomainError(f"tail exponent must exceed 1, got {p_decay!r}")
    if not (coef > 0.0 and bound > 0.0):
        raise DomainError("coef and bound must be positive")
    return (coef / ((p_decay - 1.0) * bound)) ** (1.0 / (p_decay - 1.0))


def _ladder(center: float, scale: float, radius: float) -> list[float]:
    """Log-spaced breakpoints center +- scale * 10^k out to the radius."""
    pts = [center]
    r = scale
    while r < radius:
        pts.append(center - r)
        pts.append(center + r)
        r *= 10.0
    return pts


def _tail_envelope_1d(g: QGaussian1D) -> tuple[float, float]:
    """(coef, p) with density(mu + u) <= coef * u^(-p) for all u > 0 (q > 1)."""
    q = g.params.q
    v = g.variance
    kappa = (q - 1.0) * g.params.c1_q_d / (2.0 * v)
    p = 2.0 / (q - 1.0)
    coef = g.params.c0_q_d / math.sqrt(v) * kappa ** (-1.0 / (q - 1.0))
    return coef, p


def _interval_for(
    g: QGaussian1D, cfg: QuadratureConfig, pieces: Sequence[tuple[float, float]]
) -> tuple[float, float, list[float], str]:
    """Integration interval, breakpoints and note for a 1d q-Gaussian.

    pieces lists (coef, p_decay) power-law envelopes of the integrand; the
    radius is the largest one needed to push every tail below the bound.
    """
    s = g.support()
    if s.is_finite:
        return s.lo, s.hi, [g.mu], "exact support"
    radius = max(power_tail_radius(c, p, cfg.tail_mass_bound) for c, p in pieces)
    radius = max(radius, 20.0 * g.scale)
    note = f"truncated at |x-mu| <= {radius:.6g} (tail bound {cfg.tail_mass_bound:g})"
    return g.mu - radius, g.mu + radius, _ladder(g.mu, g.scale, radius), note


def mass_quad(g: QGaussian1D, cfg: QuadratureConfig | None = None) -> QuadResult:
    """Total mass of the density by quadrature (should be 1)."""
    cfg = cfg or QuadratureConfig()
    if g.support().is_finite:
        lo, hi, pts, note = _interval_for(g, cfg, [])
    else:
        lo, hi, pts, note = _interval_for(g, cfg, [_tail_envelope_1d(g)])
    return _quad(g.density, lo, hi, cfg, pts, note)


def moment2_quad(g: QGaussian1D, cfg: QuadratureConfig | None = None) -> QuadResult:
    """Second moment about the mean by quadrature (should be C sigma^2)."""
    cfg = cfg or QuadratureConfig()
    if g.support().is_finite:
        lo, hi, pts, note = _interval_for(g, cfg, [])
    else:
        coef, p = _tail_envelope_1d(g)
        if not p - 2.0 > 1.0:
            raise DomainError(f"second moment tail not integrable at q={g.params.q!r}")
        lo, hi, pts, note = _interval_for(g, cfg, [(coef, p - 2.0)])
    mu = g.mu
    return _quad(lambda x: (x - mu) ** 2 * g.density(x), lo, hi, cfg, pts, note)


def _logm_val(t: float, m: float) -> float:
    """log_m(t) extended to t = 0 (finite for m < 1, -inf for m > 1)."""
    if t > 0.0:
        return math.expm1((1.0 - m) * math.log(t)) / (1.0 - m)
    return -1.0 / (1.0 - m) if m < 1.0 else -math.inf


def entropy_quad(g: QGaussian1D, cfg: QuadratureConfig | None = None) -> QuadResult:
    """Tsallis entropy integral f log_q f of a 1d member, by quadrature."""
    cfg = cfg or QuadratureConfig()
    q = g.params.q
    if g.support().is_finite:
        lo, hi, pts, note = _interval_for(g, cfg, [])
    else:
        coef, p = _tail_envelope_1d(g)
        # |f log_q f| <= (f^(2-q) + f)/(q-1)
        pieces = [
            (coef ** (2.0 - q) / (q - 1.0), p * (2.0 - q)),
            (coef / (q - 1.0), p),
        ]
        lo, hi, pts, note = _interval_for(g, cfg, pieces)

    def integrand(x: float) -> float:
        fv = g.density(x)
        if fv == 0.0:
            return 0.0
        return fv * _logm_val(fv, q)

    return _quad(integrand, lo, hi, cfg, pts, note)


def _ellipse_slice(nu: MBivariate, x: float) -> tuple[float, float] | None:
    """y-extent of the support ellipse of a compact bivariate at abscissa x."""
    thr = nu.support_threshold()
    u = (x - nu.mu1) / nu.s1
    if u * u >= thr:
        return None
    th = nu.theta
    disc = math.sqrt((1.0 - th * th) * (thr - u * u))
    return nu.mu2 + nu.s2 * (th * u - disc), nu.mu2 + nu.s2 * (th * u + disc)


def _ellipse_xrange(nu: MBivariate) -> tuple[float, float]:
    r = math.sqrt(nu.support_threshold())
    return nu.mu1 - r * nu.s1, nu.mu1 + r * nu.s1


def _quad_2d_compact(
    integrand: Callable[[float, float], float],
    xlo: float,
    xhi: float,
    cfg: QuadratureConfig,
    xpts: Sequence[float],
    yslice: Callable[[float], tuple[float, float, Sequence[float]] | None],
    note: str = "exact support",
) -> QuadResult:
    """Tensorized quadrature over per-column slices of a compact support."""

    def inner(x: float) -> float:
        lims = yslice(x)
        if lims is None:
            return 0.0
        lo, hi, pts = lims
        return _quad(lambda y: integrand(x, y), lo, hi, cfg, pts).value

    return _quad(inner, xlo, xhi, cfg, xpts, note)


def _quad_2d_wings(
    integrand: Callable[[float, float], float],
    nus: Sequence[MBivariate],
    cfg: QuadratureConfig,
    symmetric: bool,
) -> QuadResult:
    """Tensorized quadrature over the plane: central cells + infinite wings.

    The central y-cell of each column tracks every density's conditional
    mean at that x (correlated members concentrate on a narrow moving
    ridge that fixed breakpoints and the wing transformation both miss),
    extended by _WING_MULT conditional widths and never smaller than the
    overall central box.  symmetric doubles the half-plane x >= center
    (valid when the integrand is even under point reflection through the
    common mean).
    """
    center = np.mean([nu.mean for nu in nus], axis=0)
    cx, cy = float(center[0]), float(center[1])
    max_shift = max(float(np.linalg.norm(nu.mean - center)) for nu in nus)
    max_scale = max(max(nu.s1, nu.s2) for nu in nus)
    half = 2.0 * max_shift + _WING_MULT * max_scale
    xpts = _ladder(cx, max_scale, half) + [nu.mu1 for nu in nus]
    base_ypts = _ladder(cy, max_scale, half) + [nu.mu2 for nu in nus]
    # (x-intercept, y-intercept, ridge slope, conditional width) per member
    ridges = [
        (nu.mu1, nu.mu2, nu.theta * nu.s2 / nu.s1, nu.s2 * math.sqrt(1.0 - nu.theta**2))
        for nu in nus
    ]

    def inner(x: float) -> float:
        centers = [m2 + slope * (x - m1) for m1, m2, slope, _ in ridges]
        ylo = min(cy - half, min(c - _WING_MULT * w for c, (_, _, _, w) in zip(centers, ridges)))
        yhi = max(cy + half, max(c + _WING_MULT * w for c, (_, _, _, w) in zip(centers, ridges)))
        pts = centers + base_ypts
        return _composite_line(lambda y: integrand(x, y), ylo, yhi, pts, cfg).value

    if symmetric:
        res = _composite_line(inner, cx, cx + half, xpts, cfg, left_wing=False)
    else:
        res = _composite_line(inner, cx - half, cx + half, xpts, cfg)
    value = 2.0 * res.value if symmetric else res.value
    err = 2.0 * res.error_estimate if symmetric else res.error_estimate
    note = f"central box half-width {half:.6g} with ridge tracking, wings to infinity"
    full_note = "; ".join(
        s for s in (note, "symmetric half doubled" if symmetric else "", res.note) if s
    )
    return QuadResult(value, err, res.converged, full_note)


def entropy_quad_2d(nu: MBivariate, cfg: QuadratureConfig | None = None) -> QuadResult:
    """Entropy integral f log_m f of a bivariate member, by quadrature."""
    cfg = cfg or QuadratureConfig()
    m = nu.m

    def integrand(x: float, y: float) -> float:
        fv = nu.density(x, y)
        if fv == 0.0:
            return 0.0
        return fv * _logm_val(fv, m)

    if m < 1.0:
        xlo, xhi = _ellipse_xrange(nu)

        def yslice(x: float):
            seg = _ellipse_slice(nu, x)
            if seg is None:
                return None
            return seg[0], seg[1], [nu.mu2]

        return _quad_2d_compact(integrand, xlo, xhi, cfg, [nu.mu1], yslice)

    return _quad_2d_wings(integrand, [nu], cfg, symmetric=True)


def _mrel_integrand(
    f_biv: MBivariate, g_biv: MBivariate, form: str
) -> Callable[[float, float], float]:
    m = f_biv.m
    if form == "second":

        def integrand(x: float, y: float) -> float:
            fv = f_biv.density(x, y)
            gv = g_biv.density(x, y)
            if fv == 0.0 and gv == 0.0:
                return 0.0
            t = (1.0 - m) * gv * _logm_val(gv, m) if gv > 0.0 else 0.0
            if fv > 0.0:
                t += fv * _logm_val(fv, m)
                t -= (2.0 - m) * fv * _logm_val(gv, m)
            return t / (2.0 - m)

    elif form == "first":

        def integrand(x: float, y: float) -> float:
            fv = f_biv.density(x, y)
            gv = g_biv.density(x, y)
            if fv == 0.0 and gv == 0.0:
                return 0.0
            lg = _logm_val(gv, m)
            t = -(2.0 - m) * lg * (fv - gv)
            if fv > 0.0:
                t += fv * _logm_val(fv, m)
            if gv > 0.0:
                t -= gv * lg
            return t / (2.0 - m)

    else:
        raise ValueError(f"form must be 'first' or 'second', got {form!r}")
    return integrand


def m_rel_entropy_quad(
    f_biv: MBivariate,
    g_biv: MBivariate,
    cfg: QuadratureConfig | None = None,
    form: str = "second",
) -> QuadResult:
    """Relative m-entropy H_m(f || g) of two bivariates, by quadrature.

    form selects between the two pointwise-identical integrand
    arrangements

        (1/(2-m)) [f log_m f - g log_m g - (2-m) log_m(g) (f - g)],
        (1/(2-m)) [f log_m f + (1-m) g log_m g - (2-m) f log_m g],

    which share no cancellation pattern and therefore cross-check each
    other.  For m < 1 this is the honest integral even when the supports
    are not nested (the closed form then differs).
    """
    cfg = cfg or QuadratureConfig()
    if f_biv.m != g_biv.m:
        raise DomainError("relative entropy needs a common exponent m")
    m = f_biv.m
    integrand = _mrel_integrand(f_biv, g_biv, form)
    # Exactly equal centers make the integrand even under point reflection
    # through them, so the half-plane x >= center integral can be doubled.
    symmetric = f_biv.mu1 == g_biv.mu1 and f_biv.mu2 == g_biv.mu2

    if m < 1.0:
        xr_f = _ellipse_xrange(f_biv)
        xr_g = _ellipse_xrange(g_biv)
        xlo, xhi = min(xr_f[0], xr_g[0]), max(xr_f[1], xr_g[1])
        xpts = [f_biv.mu1, g_biv.mu1, xr_f[0], xr_f[1], xr_g[0], xr_g[1]]

        def yslice(x: float):
            segs = [s for s in (_ellipse_slice(f_biv, x), _ellipse_slice(g_biv, x)) if s]
            if not segs:
                return None
            lo = min(s[0] for s in segs)
            hi = max(s[1] for s in segs)
            pts = [p for s in segs for p in s]
            return lo, hi, pts

        return _quad_2d_compact(integrand, xlo, xhi, cfg, xpts, yslice)

    return _quad_2d_wings(integrand, [f_biv, g_biv], cfg, symmetric=symmetric)


class ThetaMin(NamedTuple):
    theta: float
    value: float


def minimize_theta(
    p_biv: MBivariate,
    nu1: float,
    xi1: float,
    nu2: float,
    xi2: float,
    cfg: QuadratureConfig | None = None,
) -> ThetaMin:
    """Minimize theta -> H_m(N_m(nu1, xi1^2, nu2, xi2^2, theta) || P) by
    grid search, golden section, and a parabolic polish.

    The search runs in t = atanh(theta): minimizers cluster near |theta|
    = 1 (the reference coupling's own correlation approaches 1 as the step
    size shrinks), where a uniform theta grid has no resolution.  The
    objective is a quadrature value carrying ~rel_tol noise that is
    discontinuous in theta, so golden section alone cannot localize the
    vertex below ~sqrt(noise/curvature); the final least-squares parabola
    over five points, with spacing chosen from a curvature probe so the
    value swing stays well above the noise, does.  Raises DomainError when
    the objective is flat over the coarse grid (degenerate family).
    """
    cfg = cfg or QuadratureConfig(rel_tol=1e-10, abs_tol=1e-13)
    cache: dict[float, float] = {}

    def obj(t: float) -> float:
        if t not in cache:
            qv = MBivariate(nu1, nu2, xi1, xi2, math.tanh(t), p_biv.mparams)
            cache[t] = m_rel_entropy_quad(qv, p_biv, cfg).value
        return cache[t]

    t_max = math.atanh(0.9995)
    grid = np.linspace(-t_max, t_max, 17)
    vals = [obj(float(t)) for t in grid]
    if max(vals) - min(vals) < 1e-13:
        raise DomainError("flat objective over the correlation grid")
    i = int(np.argmin(vals))
    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, len(grid) - 1)])

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = obj(c), obj(d)
    while b - a > 5e-4:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = obj(d)
    mid = 0.5 * (a + b)

    noise = cfg.rel_tol * abs(obj(mid)) + cfg.abs_tol
    spacing = 2.5e-4
    for probe in (1e-2, 1e-1):
        curv = (obj(mid + probe) + obj(mid - probe) - 2.0 * obj(mid)) / probe**2
        if curv > 0.0 and curv * probe**2 > 100.0 * noise:
            spacing = min(max(math.sqrt(1e4 * noise / curv), 1e-4), probe)
            break

    ts = mid + spacing * np.arange(-2.0, 3.0)
    vs = np.array([obj(float(t)) for t in ts])
    coeffs = np.polyfit(ts, vs, 2)
    if coeffs[0] <= 0.0:
        t_star = mid
    else:
        t_star = float(np.clip(-coeffs[1] / (2.0 * coeffs[0]), ts[0], ts[-1]))
    return ThetaMin(theta=math.tanh(t_star), value=obj(t_star))


def theta_family_minimizer(p_biv: MBivariate, xi1: float, xi2: float) -> float:
    """Analytic minimizer over the theta-family with scales xi1, xi2.

    Solves s(eta) = s(theta_P) (xi1 xi2 / (s1 s2))^(2-m) with
    s(e) = e (1 - e^2)^(-(3-m)/2), the stationarity condition of the
    objective minimized by minimize_theta.
    """
    m = p_biv.m
    kappa = (3.0 - m) / 2.0

    def s(e: float) -> float:
        return e * (1.0 - e * e) ** (-kappa)

    rhs = s(p_biv.theta) * (xi1 * xi2 / (p_biv.s1 * p_biv.s2)) ** (2.0 - m)
    if rhs == 0.0:
        return 0.0
    sign = 1.0 if rhs > 0.0 else -1.0
    target = math.log(abs(rhs))
    root = brentq(
        lambda e: math.log(s(e)) - target,
        1e-15,
        1.0 - 1e-15,
        xtol=1e-300,
        rtol=8.881784197001252e-16,
        maxiter=300,
    )
    return sign * root


class PythagoreanGap(NamedTuple):
    gap: float
    h_q_p: float
    h_q_qstar: float
    h_qstar_p: float


def pythagorean_gap(
    q_biv: MBivariate,
    qstar_biv: MBivariate,
    p_biv: MBivariate,
    cfg: QuadratureConfig | None = None,
    h_qstar_p: float | None = None,
) -> PythagoreanGap:
    """H(Q||P) - H(Q||Q*) - H(Q*||P), each term by quadrature.

    h_qstar_p caches the member-independent term across a family sweep.
    """
    cfg = cfg or QuadratureConfig()
    h_q_p = m_rel_entropy_quad(q_biv, p_biv, cfg).value
    h_q_qstar = m_rel_entropy_quad(q_biv, qstar_biv, cfg).value
    if h_qstar_p is None:
        h_qstar_p = m_rel_entropy_quad(qstar_biv, p_biv, cfg).value
    return PythagoreanGap(
        gap=h_q_p - h_q_qstar - h_qstar_p,
        h_q_p=h_q_p,
        h_q_qstar=h_q_qstar,
        h_qstar_p=h_qstar_p,
    )


class KhGrid(NamedTuple):
    mu: float
    sigma: float
    value: float
    mu_resolution: float
    sigma_resolution: float


def minimize_kh_grid(
    g0: QGaussian1D,
    h: float,
    rounds: int = 3,
    points_per_axis: int = 101,
) -> KhGrid:
    """Minimize K_h(. | g0) over (mu, sigma) by nested grid refinement.

    Deterministic: each round re-grids a window of +-2 cells around the
    running argmin.  The returned resolutions are the final grid steps.
    """
    if not h > 0.0:
        raise DomainError(f"h must be positive, got {h!r}")
    p = g0.params
    q = p.q
    big_c = p.C
    sigma0 = g0.sigma
    mu0 = g0.mu
    b = coefficients(q, sigma0).b
    bc = b * big_c

    step = h * b / sigma0
    w_sigma = max(0.05 * sigma0, 5.0 * step)
    w_mu = max(0.05 * sigma0, 5.0 * step)
    mu_lo, mu_hi = mu0 - w_mu, mu0 + w_mu
    sig_lo, sig_hi = max(1e-3 * sigma0, sigma0 - w_sigma), sigma0 + w_sigma

    best = (mu0, sigma0, 0.0)
    dmu = dsig = 0.0
    for _ in range(rounds):
        mus = np.linspace(mu_lo, mu_hi, points_per_axis)
        sigs = np.linspace(sig_lo, sig_hi, points_per_axis)
        mm, ss = np.meshgrid(mus, sigs, indexing="ij")
        w2 = big_c * (ss - sigma0) ** 2 + (mm - mu0) ** 2
        ent = bc * ((sigma0 / ss) ** (1.0 - q) - 1.0) / (1.0 - q)
        vals = w2 / (4.0 * h) + 0.5 * ent
        i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
        dmu = mus[1] - mus[0]
        dsig = sigs[1] - sigs[0]
        best = (float(mus[i]), float(sigs[j]), float(vals[i, j]))
        mu_lo, mu_hi = best[0] - 2.0 * dmu, best[0] + 2.0 * dmu
        sig_lo, sig_hi = max(1e-3 * sigma0, best[1] - 2.0 * dsig), best[1] + 2.0 * dsig
    return KhGrid(
        mu=best[0],
        sigma=best[1],
        value=best[2],
        mu_resolution=dmu,
        sigma_resolution=dsig,
    )


def support_included(
    inner: MBivariate, outer: MBivariate, margin: float = 0.0, n_angles: int = 720
) -> bool:
    """True when the support ellipse of inner lies inside outer's.

    Sweeps the boundary of inner (exact parametrization via Cholesky) and
    requires outer's quadratic form to stay below its threshold by the
    given relative margin.  Both exponents must be < 1.
    """
    thr_i = inner.support_threshold()
    thr_o = outer.support_threshold()
    if not (math.isfinite(thr_i) and math.isfinite(thr_o)):
        raise DomainError("support_included needs compactly supported members (m < 1)")
    chol = np.linalg.cholesky(inner.cov)
    phis = np.linspace(0.0, 2.0 * math.pi, n_angles, endpoint=False)
    circle = np.stack([np.cos(phis), np.sin(phis)])
    boundary = inner.mean[:, None] + math.sqrt(thr_i) * (chol @ circle)
    limit = thr_o * (1.0 - margin)
    return all(
        outer.quadratic_form(float(zx), float(zy)) < limit
        for zx, zy in boundary.T
    )
