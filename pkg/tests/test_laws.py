"""Closed-form auxiliary laws: pinned values and internal consistency.

Frozen pins were computed with mpmath at 40 significant digits directly
from the defining formulas (quadrature of the densities, closed-form
special-function evaluation), independently of this package.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from fellerbm import laws


def test_inverse_local_time_density_pin():
    # r (2 pi l^3)^{-1/2} exp(-r^2/2l) at r=1, l=2; mpmath 40-digit value
    law = laws.k_r_law(1.0)
    assert float(law.density(2.0)) == pytest.approx(0.1098478223669306, rel=1e-13)
    assert law.mean == math.inf
    assert float(law.density(-1.0)) == 0.0
    with pytest.raises(ValueError):
        laws.k_r_law(0.0)


def test_inverse_local_time_transform_matches_density():
    law = laws.k_r_law(1.0)
    for lam in (0.5, 1.0, 2.0):
        val, _ = quad(lambda l: float(law.density(l)) * math.exp(-lam * l),
                      0.0, np.inf, limit=300)
        assert val == pytest.approx(law.laplace_transform(lam), abs=1e-7)


def test_local_time_law_moments_and_transform():
    law = laws.local_time_law(2.0)
    # E L_2 = sqrt(4/pi); mpmath 40-digit value
    assert law.mean == pytest.approx(1.1283791670955126, rel=1e-14)
    mass, _ = quad(lambda y: float(law.density(y)), 0.0, np.inf)
    assert mass == pytest.approx(1.0, abs=1e-9)
    mean, _ = quad(lambda y: y * float(law.density(y)), 0.0, np.inf)
    assert mean == pytest.approx(law.mean, abs=1e-9)
    # e^{t/2} erfc(sqrt(t/2)) at t=1; mpmath 40-digit value
    assert laws.local_time_law(1.0).laplace_transform(1.0) == pytest.approx(
        0.52315658373024674, rel=1e-14
    )
    val, _ = quad(lambda y: math.exp(-y) * float(laws.local_time_law(1.0).density(y)),
                  0.0, np.inf)
    assert val == pytest.approx(0.52315658373024674, abs=1e-9)


def test_exit_transform_solves_its_boundary_value_problem():
    """(1/2)v'' = alpha v with v(a) = 1 and v'(0+) = beta v(0)."""
    alpha, beta, a = 0.7, 1.3, 1.0
    h = 1e-5
    for x in (0.2, 0.5, 0.8):
        vm = laws.v_exit(alpha, beta, a, x - h)
        v0 = laws.v_exit(alpha, beta, a, x)
        vp = laws.v_exit(alpha, beta, a, x + h)
        ddv = (vp - 2 * v0 + vm) / (h * h)
        assert 0.5 * ddv == pytest.approx(alpha * v0, rel=1e-5)
    assert laws.v_exit(alpha, beta, a, a) == pytest.approx(1.0)
    d0 = (laws.v_exit(alpha, beta, a, h) - laws.v_exit(alpha, beta, a, 0.0)) / h
    assert d0 == pytest.approx(beta * laws.v_exit(alpha, beta, a, 0.0), rel=1e-4)
    # even extension and the exterior exponential
    assert laws.v_exit(alpha, beta, a, -0.5) == laws.v_exit(alpha, beta, a, 0.5)
    k = math.sqrt(2 * alpha)
    assert laws.v_exit(alpha, beta, a, 1.5) == pytest.approx(math.exp(-0.5 * k))


def test_exit_transform_zero_rate_limit():
    assert laws.v_exit(0.0, 2.0, 1.0, 0.5) == pytest.approx(2.0 / 3.0)
    assert laws.v_exit(0.0, 2.0, 1.0, 2.0) == 1.0
    # continuity in alpha near 0
    assert laws.v_exit(1e-10, 2.0, 1.0, 0.5) == pytest.approx(2.0 / 3.0, rel=1e-4)


def test_hit_vs_kill_race_probability():
    assert laws.kill_before_hit_prob(1.0, 1.0) == pytest.approx(0.5)
    assert laws.kill_before_hit_prob(2.0, 0.5) == pytest.approx(0.5)
    assert laws.kill_before_hit_prob(1.0, 3.0) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        laws.kill_before_hit_prob(0.0, 1.0)


def test_joint_value_local_time_density_marginals():
    s = 0.9
    # total mass one over the quadrant (substitute w = x + y)
    total, _ = quad(lambda w: w * laws.joint_refl_lt_density(s, w, 0.0), 0.0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-9)
    # x-marginal is the half-line density 2 g(s, x)
    for x in (0.1, 0.7):
        marg, _ = quad(lambda y: laws.joint_refl_lt_density(s, x, y), 0.0, np.inf)
        expect = 2.0 * math.exp(-x * x / (2 * s)) / math.sqrt(2 * math.pi * s)
        assert marg == pytest.approx(expect, rel=1e-8)
    assert laws.joint_refl_lt_density(s, -0.1, 0.5) == 0.0


def test_lifetime_transform_values():
    # beta/(beta + sqrt(2 lam) + gamma lam): both acceptance-scale points
    assert laws.zeta_lt(1.0, 0.0, 0.5) == pytest.approx(0.5, rel=1e-15)
    assert laws.zeta_lt(1.0, 1.0, 2.0) == pytest.approx(0.2, rel=1e-15)
    with pytest.raises(ValueError):
        laws.zeta_lt(0.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        laws.zeta_lt(1.0, -1.0, 1.0)


def test_boundary_clock_potential_values():
    # e^{-sqrt(2 alpha) x} / (sqrt(2 alpha) + alpha gamma)
    assert laws.ls_alpha_potential(2.0, 1.0, 0.0) == pytest.approx(0.25, rel=1e-15)
    assert laws.ls_alpha_potential(0.5, 0.0, 0.0) == pytest.approx(1.0, rel=1e-15)
    x, alpha, gamma = 0.7, 1.5, 0.4
    k = math.sqrt(2 * alpha)
    assert laws.ls_alpha_potential(alpha, gamma, x) == pytest.approx(
        math.exp(-k * x) / (k + alpha * gamma), rel=1e-15
    )


def test_sticky_exit_mean_values():
    assert laws.sticky_exit_mean(0.3, 0.1) == pytest.approx(0.04, rel=1e-15)
    assert laws.sticky_exit_mean(0.0, 0.2) == pytest.approx(0.04, rel=1e-15)
    with pytest.raises(ValueError):
        laws.sticky_exit_mean(-0.1, 0.1)
    with pytest.raises(ValueError):
        laws.sticky_exit_mean(0.3, 0.0)
