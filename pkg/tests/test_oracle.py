import math

import numpy as np
import pytest

from qflow import oracle
from qflow.functionals import jko_step, q0h
from qflow.qgaussian import QGaussian1D, SupportInterval, m_rel_entropy_closed, make_bivariate
from qflow.qmath import DomainError, make_params


def test_integrate_1d_known_values():
    cfg = oracle.QuadratureConfig()
    res = oracle.integrate_1d(lambda x: 3.0 * x * x, SupportInterval(0.0, 1.0), cfg)
    assert res.value == pytest.approx(1.0, rel=1e-12)
    assert res.converged
    res = oracle.integrate_1d(
        lambda x: math.exp(-0.5 * x * x), SupportInterval(-math.inf, math.inf), cfg
    )
    assert res.value == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-12)
    # breakpoints let the adaptive routine handle a kink exactly
    res = oracle.integrate_1d(lambda x: abs(x), SupportInterval(-1.0, 2.0), cfg, points=[0.0])
    assert res.value == pytest.approx(2.5, rel=1e-12)


def test_power_tail_radius_bound():
    for coef, p, bound in [(1.0, 3.0, 1e-10), (7.3, 2.2, 1e-8)]:
        r = oracle.power_tail_radius(coef, p, bound)
        discarded = coef * r ** (1.0 - p) / (p - 1.0)
        assert discarded == pytest.approx(bound, rel=1e-12)
    with pytest.raises(DomainError):
        oracle.power_tail_radius(1.0, 1.0, 1e-10)
    with pytest.raises(DomainError):
        oracle.power_tail_radius(-1.0, 2.0, 1e-10)


def test_truncation_policy_recorded():
    compact = QGaussian1D(mu=0.0, sigma=1.0, params=make_params(0.8, 1))
    heavy = QGaussian1D(mu=0.0, sigma=1.0, params=make_params(1.2, 1))
    assert oracle.mass_quad(compact).note == "exact support"
    note = oracle.mass_quad(heavy).note
    assert "truncated at" in note and "tail bound" in note
    assert "truncated at" in oracle.entropy_quad(heavy).note
    assert "truncated at" in oracle.moment2_quad(heavy).note


def test_truncated_mass_within_stated_bound():
    cfg = oracle.QuadratureConfig()
    for q in (1.1, 1.4, 1.6):
        g = QGaussian1D(mu=0.3, sigma=1.2, params=make_params(q, 1))
        res = oracle.mass_quad(g, cfg)
        assert abs(res.value - 1.0) <= 10.0 * cfg.tail_mass_bound


def test_mrel_two_integrand_forms_agree():
    # nested compact supports: narrow member inside a wide one
    f = make_bivariate(0.05, -0.02, 0.5, 0.4, 0.2, 0.5)
    g = make_bivariate(0.0, 0.0, 1.1, 1.0, -0.1, 0.5)
    assert oracle.support_included(f, g)
    first = oracle.m_rel_entropy_quad(f, g, form="first").value
    second = oracle.m_rel_entropy_quad(f, g, form="second").value
    closed = m_rel_entropy_closed(f.mparams, f.mean, f.cov, g.mean, g.cov)
    assert first == pytest.approx(second, rel=1e-8)
    assert second == pytest.approx(closed, rel=1e-6)

    fh = make_bivariate(0.2, 0.1, 0.9, 1.1, 0.3, 4.0 / 3.0)
    gh = make_bivariate(0.0, 0.0, 1.0, 1.0, 0.0, 4.0 / 3.0)
    first = oracle.m_rel_entropy_quad(fh, gh, form="first").value
    second = oracle.m_rel_entropy_quad(fh, gh, form="second").value
    closed = m_rel_entropy_closed(fh.mparams, fh.mean, fh.cov, gh.mean, gh.cov)
    assert first == pytest.approx(second, rel=1e-7)
    assert second == pytest.approx(closed, rel=1e-6)


def test_mrel_quad_near_upper_exponent():
    # close to m = 3/2 the tails are barely integrable; the wings policy
    # must still land inside the closed-form tolerance
    m = 1.48
    f = make_bivariate(0.1, 0.0, 0.9, 1.1, 0.25, m)
    g = make_bivariate(0.0, 0.0, 1.0, 1.0, 0.0, m)
    closed = m_rel_entropy_closed(f.mparams, f.mean, f.cov, g.mean, g.cov)
    quad = oracle.m_rel_entropy_quad(f, g).value
    assert quad == pytest.approx(closed, rel=1e-6)


def test_mrel_quad_honest_outside_nesting():
    # with supports not nested the defining integral and the closed form
    # are different quantities; the oracle must report the integral
    f = make_bivariate(0.0, 0.0, 2.0, 2.0, 0.0, 0.5)
    g = make_bivariate(0.0, 0.0, 0.5, 0.5, 0.0, 0.5)
    assert not oracle.support_included(f, g)
    closed = m_rel_entropy_closed(f.mparams, f.mean, f.cov, g.mean, g.cov)
    quad = oracle.m_rel_entropy_quad(f, g).value
    assert abs(quad - closed) > 1e-3 * abs(closed)


def test_mrel_zero_at_equal_and_exponent_mismatch():
    nu = make_bivariate(0.1, -0.2, 1.0, 0.8, 0.3, 1.2)
    assert abs(oracle.m_rel_entropy_quad(nu, nu).value) < 1e-12
    other = make_bivariate(0.0, 0.0, 1.0, 1.0, 0.0, 1.3)
    with pytest.raises(DomainError):
        oracle.m_rel_entropy_quad(nu, other)
    with pytest.raises(ValueError):
        oracle.m_rel_entropy_quad(nu, nu, form="third")


def test_theta_family_minimizer_stationarity():
    p_biv = q0h(QGaussian1D(mu=0.0, sigma=1.0, params=make_params(1.2, 1)), 0.05)
    m = p_biv.m
    kappa = (3.0 - m) / 2.0

    def s(e):
        return e * (1.0 - e * e) ** (-kappa)

    for xi1, xi2 in [(1.7, 1.5), (1.2, 1.9), (0.9, 1.1)]:
        eta = oracle.theta_family_minimizer(p_biv, xi1, xi2)
        rhs = s(p_biv.theta) * (xi1 * xi2 / (p_biv.s1 * p_biv.s2)) ** (2.0 - m)
        assert s(eta) == pytest.approx(rhs, rel=1e-12)
    # matching scales reproduce the reference correlation itself
    eta = oracle.theta_family_minimizer(p_biv, p_biv.s1, p_biv.s2)
    assert eta == pytest.approx(p_biv.theta, rel=1e-12)


def test_minimize_theta_matches_analytic():
    g0 = QGaussian1D(mu=0.0, sigma=1.0, params=make_params(1.2, 1))
    p_biv = q0h(g0, 0.05)
    xi1, xi2 = 1.7, 1.5
    res = oracle.minimize_theta(p_biv, 0.0, xi1, 0.0, xi2)
    eta = oracle.theta_family_minimizer(p_biv, xi1, xi2)
    assert res.theta == pytest.approx(eta, abs=1e-5)
    assert res.value > 0.0


def test_pythagorean_identity_spot():
    g0 = QGaussian1D(mu=0.0, sigma=1.0, params=make_params(1.2, 1))
    p_biv = q0h(g0, 0.05)
    xi1, xi2 = 1.4, 1.6
    eta = oracle.theta_family_minimizer(p_biv, xi1, xi2)
    qstar_biv = make_bivariate(0.0, 0.0, xi1, xi2, eta, p_biv.m)
    member = make_bivariate(0.0, 0.0, xi1, xi2, 0.3, p_biv.m)
    res = oracle.pythagorean_gap(member, qstar_biv, p_biv)
    assert abs(res.gap) <= 1e-6
    assert res.h_q_p > 0.0 and res.h_q_qstar > 0.0 and res.h_qstar_p > 0.0
    # the cached member-independent term short-circuits one quadrature
    again = oracle.pythagorean_gap(member, qstar_biv, p_biv, h_qstar_p=res.h_qstar_p)
    assert again.gap == pytest.approx(res.gap, abs=1e-12)


def test_minimize_kh_grid_matches_implicit_step():
    g0 = QGaussian1D(mu=0.5, sigma=1.0, params=make_params(0.8, 1))
    h = 0.05
    grid = oracle.minimize_kh_grid(g0, h)
    step = jko_step(g0, h)
    assert grid.sigma == pytest.approx(step.sigma, abs=1e-6)
    assert abs(grid.mu - g0.mu) <= grid.mu_resolution
    assert grid.value <= 0.0
    assert 0.0 < grid.sigma_resolution < 1e-4
    with pytest.raises(DomainError):
        oracle.minimize_kh_grid(g0, 0.0)


def test_support_included_geometry():
    inner = make_bivariate(0.0, 0.0, 0.5, 0.5, 0.0, 0.5)
    outer = make_bivariate(0.0, 0.0, 1.0, 1.0, 0.0, 0.5)
    assert oracle.support_included(inner, outer)
    assert not oracle.support_included(outer, inner)
    # a margin shrinks the admissible region
    near = make_bivariate(0.0, 0.0, 0.99, 0.99, 0.0, 0.5)
    assert oracle.support_included(near, outer)
    assert not oracle.support_included(near, outer, margin=0.05)
    heavy = make_bivariate(0.0, 0.0, 1.0, 1.0, 0.0, 1.2)
    with pytest.raises(DomainError):
        oracle.support_included(inner, heavy)


def test_quadrature_config_defaults():
    cfg = oracle.QuadratureConfig()
    assert cfg.rel_tol == 1e-10
    assert cfg.abs_tol == 1e-13
    assert cfg.max_subdivisions == 200
    assert cfg.tail_mass_bound == 1e-11
