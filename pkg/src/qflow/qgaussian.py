"""q-Gaussian densities in one and two dimensions and their entropies.

One-dimensional family, parametrized by a shape scale sigma (the actual
variance is C sigma^2 with C the profile constant):

    f(x) = C0 / sqrt(C sigma^2) * exp_q(-C1 (x - mu)^2 / (2 C sigma^2)).

For q < 1 the support is the interval |x - mu| < sqrt(2 C sigma^2 /
((1-q) C1)); for q >= 1 it is the whole line with a power tail
f ~ |x|^(-2/(q-1)).

Two-dimensional family with exponent m, raw scale matrix
Sigma = [[s1^2, th s1 s2], [th s1 s2, s2^2]]:

    nu(x, y) = C0(m,2) / (s1 s2 sqrt(1-th^2))
               * exp_m(-(1/2) C1(m,2) <z - mean, Sigma^(-1) (z - mean)>).

The closed-form entropy expressions evaluated here are the difference of
m-entropies E_m(rho) = integral rho log_m rho between members with equal
means, and the relative m-entropy

    H_m(f || g) = (1/(2-m)) integral [f log_m f - g log_m g
                                      - (2-m) log_m(g) (f - g)],

both reduced to determinants, traces and a single deformed logarithm.
For m < 1 the closed relative entropy represents the integral only when
supp f lies inside supp g; callers on the compact branch must ensure
inclusion (the quadrature oracle checks it geometrically).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qmath import (
    DomainError,
    QParams,
    in_q_domain,
    q_domain_upper,
    q_exp,
    q_log_pow,
)

__all__ = [
    "OutsideVerifiedRangeError",
    "SupportInterval",
    "QGaussian1D",
    "MBivariate",
    "make_bivariate",
    "density_1d",
    "density_2d",
    "entropy_diff_closed",
    "m_rel_entropy_closed",
]


class OutsideVerifiedRangeError(DomainError):
    """Exponent outside the range where the closed forms are established."""


@dataclass(frozen=True)
class SupportInterval:
    """Closed-form support of a 1d density: [lo, hi], infinite ends allowed."""

    lo: float
    hi: float

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class QGaussian1D:
    """q-Gaussian N_q(mu, C sigma^2) in shape-scale parametrization.

    sigma is the scale parameter; the second moment about mu is exactly
    C sigma^2 (params.C).  params must be a d=1 parameter set.
    """

    mu: float
    sigma: float
    params: QParams

    def __post_init__(self) -> None:
        if self.params.d != 1:
            raise DomainError(f"QGaussian1D needs d=1 params, got d={self.params.d}")
        if not self.sigma > 0.0:
            raise DomainError(f"sigma must be positive, got {self.sigma!r}")

    @property
    def variance(self) -> float:
        return self.params.C * self.sigma * self.sigma

    @property
    def scale(self) -> float:
        return math.sqrt(self.variance)

    def support(self) -> SupportInterval:
        q = self.params.q
        if q >= 1.0:
            return SupportInterval(-math.inf, math.inf)
        r = math.sqrt(2.0 * self.variance / ((1.0 - q) * self.params.c1_q_d))
        return SupportInterval(self.mu - r, self.mu + r)

    def peak_density(self) -> float:
        return self.params.c0_q_d / self.scale

    def density(self, x: float) -> float:
        v = self.variance
        dx = x - self.mu
        w = self.params.c1_q_d * dx * dx / (2.0 * v)
        return self.params.c0_q_d / math.sqrt(v) * q_exp(-w, self.params.q)


def density_1d(g: QGaussian1D, x: float) -> float:
    """Pointwise density of a 1d q-Gaussian (0.0 outside a compact support)."""
    return g.density(x)


@dataclass(frozen=True)
class MBivariate:
    """Bivariate m-Gaussian with raw scales s1, s2 and correlation theta.

    The scale matrix is Sigma = [[s1^2, th s1 s2], [th s1 s2, s2^2]]; for
    m < 3/2 second moments are finite (a multiple of Sigma).  mparams must
    be a d=2 parameter set whose q is the exponent m.
    """

    mu1: float
    mu2: float
    s1: float
    s2: float
    theta: float
    mparams: QParams

    def __post_init__(self) -> None:
        if self.mparams.d != 2:
            raise DomainError(f"MBivariate needs d=2 params, got d={self.mparams.d}")
        if not (self.s1 > 0.0 and self.s2 > 0.0):
            raise DomainError("scales s1, s2 must be positive")
        if not -1.0 < self.theta < 1.0:
            raise DomainError(f"theta must lie in (-1, 1), got {self.theta!r}")

    @property
    def m(self) -> float:
        return self.mparams.q

    @property
    def mean(self) -> np.ndarray:
        return np.array([self.mu1, self.mu2])

    @property
    def cov(self) -> np.ndarray:
        off = self.theta * self.s1 * self.s2
        return np.array([[self.s1 * self.s1, off], [off, self.s2 * self.s2]])

    @property
    def det_cov(self) -> float:
        return (self.s1 * self.s2) ** 2 * (1.0 - self.theta * self.theta)

    def support_threshold(self) -> float:
        """Bound R^2 with support = {<z-mean, Sigma^(-1)(z-mean)> < R^2}.

        +inf for m >= 1 (full plane).
        """
        m = self.m
        if m >= 1.0:
            return math.inf
        return 2.0 / ((1.0 - m) * self.mparams.c1_q_d)

    def quadratic_form(self, x: float, y: float) -> float:
        u = (x - self.mu1) / self.s1
        v = (y - self.mu2) / self.s2
        th = self.theta
        return (u * u + v * v - 2.0 * th * u * v) / (1.0 - th * th)

    def density(self, x: float, y: float) -> float:
        th = self.theta
        norm = self.mparams.c0_q_d / (self.s1 * self.s2 * math.sqrt(1.0 - th * th))
        w = 0.5 * self.mparams.c1_q_d * self.quadratic_form(x, y)
        return norm * q_exp(-w, self.m)


def make_bivariate(
    mu1: float, mu2: float, s1: float, s2: float, theta: float, m: float
) -> MBivariate:
    """Build a bivariate m-Gaussian, restricting m to the verified range.

    Raises OutsideVerifiedRangeError for m outside (0, 1) u (1, 3/2): there
    either normalization or second moments fail and none of the closed
    entropy formulas are established.
    """
    from .qmath import make_params

    if not in_q_domain(m, 2):
        raise OutsideVerifiedRangeError(
            f"m={m!r} outside the verified range (0, 1) u (1, {q_domain_upper(2)!r}) "
            "for bivariate m-Gaussians"
        )
    return MBivariate(mu1=mu1, mu2=mu2, s1=s1, s2=s2, theta=theta, mparams=make_params(m, 2))


def density_2d(nu: MBivariate, x: float, y: float) -> float:
    """Pointwise density of a bivariate m-Gaussian."""
    return nu.density(x, y)


def _check_spd(mat: np.ndarray, d: int, name: str) -> None:
    if mat.shape != (d, d):
        raise DomainError(f"{name} must have shape ({d}, {d}), got {mat.shape}")
    if not np.allclose(mat, mat.T, rtol=1e-12, atol=0.0):
        raise DomainError(f"{name} must be symmetric")
    if np.linalg.eigvalsh(mat).min() <= 0.0:
        raise DomainError(f"{name} must be positive definite")


def entropy_diff_closed(mp: QParams, det_sigma: float, det_v: float) -> float:
    """E_m(N_m(mu, Sigma)) - E_m(N_m(mu, V)) from the determinants alone.

        (2-m) C1(m,d) (C0(m,d) / det(V)^(1/2))^(1-m)
            * log_m(det(V)^(1/2) / det(Sigma)^(1/2)).

    The mean drops out of the difference.
    """
    if not (det_sigma > 0.0 and det_v > 0.0):
        raise DomainError("determinants must be positive")
    m = mp.q
    pref = math.exp((1.0 - m) * (math.log(mp.c0_q_d) - 0.5 * math.log(det_v)))
    return (2.0 - m) * mp.c1_q_d * pref * q_log_pow(det_v / det_sigma, 0.5, m)


def m_rel_entropy_closed(mp, mu_a, sigma_a, mu_b, sigma_b) -> float:
    """Relative m-entropy H_m(N_m(mu_a, Sigma_a) || N_m(mu_b, Sigma_b)).

        (1/2) C1(m,d) (C0(m,d)/det(Sigma_b)^(1/2))^(1-m)
        * [tr(Sigma_b^-1 Sigma_a) + <mu_a - mu_b, Sigma_b^-1 (mu_a - mu_b)>
           + 2 log_m(det(Sigma_b)^(1/2) / det(Sigma_a)^(1/2)) - d].

    Scalars are accepted for d = 1.  Nonnegative, and 0 exactly at equal
    arguments.  For m < 1 it agrees with the defining integral only when
    supp of the first argument is contained in supp of the second.
    """
    d = mp.d
    m = mp.q
    mu_a = np.atleast_1d(np.asarray(mu_a, dtype=float))
    mu_b = np.atleast_1d(np.asarray(mu_b, dtype=float))
    sig_a = np.atleast_2d(np.asarray(sigma_a, dtype=float))
    sig_b = np.atleast_2d(np.asarray(sigma_b, dtype=float))
    if mu_a.shape != (d,) or mu_b.shape != (d,):
        raise DomainError(f"means must have shape ({d},)")
    _check_spd(sig_a, d, "sigma_a")
    _check_spd(sig_b, d, "sigma_b")

    det_a = float(np.linalg.det(sig_a))
    det_b = float(np.linalg.det(sig_b))
    inv_b = np.linalg.inv(sig_b)
    tr = float(np.trace(inv_b @ sig_a))
    dmu = mu_a - mu_b
    quad = float(dmu @ inv_b @ dmu)
    pref = math.exp((1.0 - m) * (math.log(mp.c0_q_d) - 0.5 * math.log(det_b)))
    bracket = tr + quad + 2.0 * q_log_pow(det_b / det_a, 0.5, m) - d
    return 0.5 * mp.c1_q_d * pref * bracket
