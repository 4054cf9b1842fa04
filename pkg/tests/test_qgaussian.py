import math

import numpy as np
import pytest

from qflow import oracle
from qflow.qgaussian import (
    OutsideVerifiedRangeError,
    QGaussian1D,
    density_1d,
    density_2d,
    entropy_diff_closed,
    m_rel_entropy_closed,
    make_bivariate,
)
from qflow.qmath import DomainError, make_params, q_exp


def _g(q, mu=0.0, sigma=1.0):
    return QGaussian1D(mu=mu, sigma=sigma, params=make_params(q, 1))


@pytest.mark.parametrize("q,sigma", [(0.1, 0.6), (0.5, 1.0), (0.9, 2.3), (1.1, 0.4), (1.4, 1.7), (1.6, 1.0)])
def test_mass_is_one(q, sigma):
    g = _g(q, mu=0.7, sigma=sigma)
    res = oracle.mass_quad(g)
    assert res.converged
    assert res.value == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("q,sigma", [(0.3, 0.9), (0.8, 1.5), (1.2, 0.5), (1.5, 1.2)])
def test_second_moment_is_c_sigma_sq(q, sigma):
    g = _g(q, mu=-1.1, sigma=sigma)
    res = oracle.moment2_quad(g)
    assert res.value == pytest.approx(g.variance, rel=1e-8)
    assert g.variance == pytest.approx(g.params.C * sigma * sigma, rel=1e-15)


def test_density_shape():
    g = _g(0.8, mu=0.5, sigma=1.3)
    assert g.density(0.5) == pytest.approx(g.peak_density(), rel=1e-15)
    assert g.density(1.7) == pytest.approx(g.density(-0.7), rel=1e-14)
    assert g.density(0.5) > g.density(1.5) > g.density(2.5)
    assert density_1d(g, 0.9) == g.density(0.9)


def test_compact_support_edge():
    g = _g(0.5, mu=0.0, sigma=1.0)
    s = g.support()
    assert s.is_finite
    assert g.density(s.hi + 1e-12) == 0.0
    assert g.density(s.hi - 1e-6) > 0.0
    assert s.contains(0.0) and not s.contains(s.hi + 1.0)
    # edge radius solves c1 r^2 / (2 C sigma^2) = 1/(1-q)
    r = math.sqrt(2.0 * g.variance / ((1.0 - 0.5) * g.params.c1_q_d))
    assert s.hi == pytest.approx(r, rel=1e-15)


def test_heavy_tail_support():
    g = _g(1.3)
    s = g.support()
    assert not s.is_finite
    assert g.density(50.0) > 0.0
    # power-law decay: doubling x should cut the density by ~2^(-2/(q-1))
    ratio = g.density(200.0) / g.density(100.0)
    assert ratio == pytest.approx(2.0 ** (-2.0 / 0.3), rel=1e-2)


def test_sigma_and_params_validation():
    with pytest.raises(DomainError):
        QGaussian1D(mu=0.0, sigma=0.0, params=make_params(0.8, 1))
    with pytest.raises(DomainError):
        QGaussian1D(mu=0.0, sigma=1.0, params=make_params(0.8, 2))


def test_entropy_diff_closed_vs_quadrature_1d():
    for q, s0, s1 in [(0.6, 1.0, 1.7), (1.2, 0.8, 1.1), (1.45, 1.0, 1.3)]:
        p = make_params(q, 1)
        g0 = _g(q, mu=0.1, sigma=s0)
        g1 = _g(q, mu=-0.4, sigma=s1)
        quad = oracle.entropy_quad(g1).value - oracle.entropy_quad(g0).value
        closed = entropy_diff_closed(p, g1.variance, g0.variance)
        assert quad == pytest.approx(closed, rel=1e-8)


def test_entropy_diff_closed_vs_quadrature_2d():
    for m in (0.5, 4.0 / 3.0):
        nu_a = make_bivariate(0.2, -0.1, 1.0, 0.8, 0.3, m)
        nu_b = make_bivariate(0.0, 0.0, 1.2, 1.1, -0.2, m)
        quad = oracle.entropy_quad_2d(nu_a).value - oracle.entropy_quad_2d(nu_b).value
        closed = entropy_diff_closed(nu_a.mparams, nu_a.det_cov, nu_b.det_cov)
        assert quad == pytest.approx(closed, rel=1e-7)


def test_entropy_diff_closed_mean_independent():
    p = make_params(0.8, 1)
    assert entropy_diff_closed(p, 2.0, 3.0) == entropy_diff_closed(p, 2.0, 3.0)
    with pytest.raises(DomainError):
        entropy_diff_closed(p, -1.0, 3.0)


def test_m_rel_closed_zero_at_equal_args():
    for m in (0.5, 1.3):
        mp = make_params(m, 2)
        cov = np.array([[1.0, 0.2], [0.2, 0.9]])
        val = m_rel_entropy_closed(mp, [0.1, 0.2], cov, [0.1, 0.2], cov)
        assert abs(val) < 1e-15


def test_m_rel_closed_positive():
    rng = np.random.default_rng(555)
    for _ in range(20):
        m = float(rng.choice([0.4, 0.8, 1.2, 1.4]))
        mp = make_params(m, 2)
        mu_a = rng.uniform(-1.0, 1.0, 2)
        mu_b = rng.uniform(-1.0, 1.0, 2)
        th_a, th_b = rng.uniform(-0.8, 0.8, 2)
        sa = np.diag(rng.uniform(0.5, 2.0, 2))
        sb = np.diag(rng.uniform(0.5, 2.0, 2))
        sa[0, 1] = sa[1, 0] = th_a * math.sqrt(sa[0, 0] * sa[1, 1])
        sb[0, 1] = sb[1, 0] = th_b * math.sqrt(sb[0, 0] * sb[1, 1])
        assert m_rel_entropy_closed(mp, mu_a, sa, mu_b, sb) > 0.0


def test_m_rel_closed_scalar_d1():
    mp = make_params(0.8, 1)
    a = m_rel_entropy_closed(mp, 0.3, 1.2, 0.0, 1.0)
    b = m_rel_entropy_closed(mp, [0.3], [[1.2]], [0.0], [[1.0]])
    assert a == pytest.approx(b, rel=1e-15)
    assert a > 0.0


def test_m_rel_closed_rejects_bad_inputs():
    mp = make_params(0.8, 2)
    good = np.eye(2)
    with pytest.raises(DomainError):
        m_rel_entropy_closed(mp, [0.0, 0.0], np.array([[1.0, 2.0], [2.0, 1.0]]), [0.0, 0.0], good)
    with pytest.raises(DomainError):
        m_rel_entropy_closed(mp, [0.0], good, [0.0, 0.0], good)


def test_make_bivariate_domain():
    nu = make_bivariate(0.0, 0.0, 1.0, 2.0, 0.5, 0.5)
    assert nu.m == 0.5
    assert nu.mparams.d == 2
    for m in (1.5, 1.0, 0.0, -0.2, 2.0):
        with pytest.raises(OutsideVerifiedRangeError):
            make_bivariate(0.0, 0.0, 1.0, 1.0, 0.0, m)
    with pytest.raises(DomainError):
        make_bivariate(0.0, 0.0, 1.0, 1.0, 1.0, 0.5)
    with pytest.raises(DomainError):
        make_bivariate(0.0, 0.0, -1.0, 1.0, 0.0, 0.5)


def test_bivariate_geometry():
    nu = make_bivariate(0.5, -0.3, 1.2, 0.7, 0.4, 0.5)
    assert nu.det_cov == pytest.approx(float(np.linalg.det(nu.cov)), rel=1e-14)
    inv = np.linalg.inv(nu.cov)
    z = np.array([1.1, 0.4]) - nu.mean
    assert nu.quadratic_form(1.1, 0.4) == pytest.approx(float(z @ inv @ z), rel=1e-12)
    # density from the normalization and quadratic form directly
    w = 0.5 * nu.mparams.c1_q_d * nu.quadratic_form(1.1, 0.4)
    expect = nu.mparams.c0_q_d / math.sqrt(nu.det_cov) * q_exp(-w, nu.m)
    assert density_2d(nu, 1.1, 0.4) == pytest.approx(expect, rel=1e-14)


def test_bivariate_support_threshold():
    compact = make_bivariate(0.0, 0.0, 1.0, 1.0, 0.0, 0.5)
    thr = compact.support_threshold()
    assert math.isfinite(thr)
    r = math.sqrt(thr)
    assert compact.density(r * 1.000001, 0.0) == 0.0
    assert compact.density(r * 0.999999, 0.0) > 0.0
    heavy = make_bivariate(0.0, 0.0, 1.0, 1.0, 0.0, 1.3)
    assert heavy.support_threshold() == math.inf
    assert heavy.density(30.0, -40.0) > 0.0


def test_bivariate_mass():
    for m in (0.5, 1.3):
        nu = make_bivariate(0.1, -0.2, 0.9, 1.4, 0.35, m)
        if m < 1.0:
            xlo, xhi = oracle._ellipse_xrange(nu)

            def yslice(x):
                seg = oracle._ellipse_slice(nu, x)
                return None if seg is None else (seg[0], seg[1], [nu.mu2])

            res = oracle._quad_2d_compact(nu.density, xlo, xhi, oracle.QuadratureConfig(), [nu.mu1], yslice)
        else:
            res = oracle._quad_2d_wings(nu.density, [nu], oracle.QuadratureConfig(), symmetric=True)
        assert res.value == pytest.approx(1.0, abs=1e-8)
