"""Kernel formulas: frozen pins, algebraic identities, measure structure.

Two independent oracles back the frozen pins below:

* g-family and atom values: 40-digit Talbot inversion (mpmath) of the
  t-Laplace transform e^{-sqrt(2 lam) x} / (beta + sqrt(2 lam) + gamma lam);
* interval resolvent values: closed-form solution of the boundary-value
  ODE (1/2)u'' - lam u = -f with the endpoint conditions, solved in sympy
  and evaluated at 40 digits.

Everything else is either a direct closed form or an identity between two
live code paths.
"""

import csv
import io
import math

import numpy as np
import pytest
from scipy.integrate import quad

from fellerbm import kernels
from fellerbm.errors import (
    NonPositiveLambda,
    NonPositiveTime,
    SingularSystem,
    StartOutOfRange,
)
from fellerbm.model import BoundaryModel


def test_half_line_building_blocks():
    # Gauss kernel and its two images; mpmath 40-digit pins at (1, 0.3, 0.7)
    assert float(kernels.p_neumann(1.0, 0.3, 0.7)) == pytest.approx(
        0.61024086482246665, rel=1e-14
    )
    assert float(kernels.p_dirichlet(1.0, 0.3, 0.7)) == pytest.approx(
        0.12629941578417995, rel=1e-14
    )
    assert float(kernels.r_neumann(1.0, 0.3, 0.7)) == pytest.approx(
        0.57352543351753464, rel=1e-14
    )
    # sum / difference identities tie all four kernels together
    k = math.sqrt(2.0)
    for x, y in ((0.3, 0.7), (0.0, 1.2), (2.0, 0.5)):
        rn = float(kernels.r_neumann(1.0, x, y))
        rd = float(kernels.r_dirichlet(1.0, x, y))
        assert rn + rd == pytest.approx(2.0 * math.exp(-k * abs(x - y)) / k, rel=1e-13)
        assert rn - rd == pytest.approx(2.0 * math.exp(-k * (x + y)) / k, rel=1e-13)
        pn = float(kernels.p_neumann(1.0, x, y))
        pd = float(kernels.p_dirichlet(1.0, x, y))
        assert pn - pd == pytest.approx(2.0 * float(kernels.p_free(1.0, x, -y)), rel=1e-13)


def test_hitting_density_normalizes_to_one():
    x = 0.8
    mass, _ = quad(lambda s: float(kernels.hitting_density(x, s)), 0.0, np.inf,
                   limit=300)
    assert mass == pytest.approx(1.0, abs=1e-8)
    assert float(kernels.hitting_density(x, 0.0)) == 0.0


# ---------------------------------------------------------------------------
# g family


# (beta, gamma, t, x) -> 40-digit Talbot inversion of the Laplace transform
G_PINS = [
    ((0.0, 0.0, 1.0, 0.5), 0.35206532676429948),
    ((1.0, 0.0, 1.0, 0.5), 0.17046452554495653),
    ((0.0, 1.0, 1.0, 0.5), 0.24944892436302948),
    ((1.0, 1.0, 1.0, 0.5), 0.16840849612132858),
    ((0.0, 1.0, 1.0, 0.0), 0.33620400244634121),
    ((1.0, 1.0, 0.7, 0.0), 0.24304515412522021),
    ((2.0, 0.5, 0.3, 1.2), 0.026740867633317005),
]


def test_g_family_pins():
    for (beta, gamma, t, x), pin in G_PINS:
        assert kernels.g_family(beta, gamma, t, x) == pytest.approx(pin, rel=1e-9)


def test_g_family_small_parameter_limits():
    for t, x in ((1.0, 0.5), (0.3, 1.5)):
        lim = kernels.g_family(1.0, 0.0, t, x)
        assert kernels.g_family(1.0, 1e-6, t, x) == pytest.approx(lim, rel=1e-4)
        lim = kernels.g_family(0.0, 1.0, t, x)
        assert kernels.g_family(1e-6, 1.0, t, x) == pytest.approx(lim, rel=1e-4)


def test_g_family_argument_validation():
    with pytest.raises(NonPositiveTime):
        kernels.g_family(1.0, 1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        kernels.g_family(-1.0, 0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        kernels.g_family(1.0, 1.0, 1.0, -0.5)


def test_vectorized_g_matches_scalar_loop():
    xs = np.array([0.0, 0.4, 1.1])
    out = kernels._g_vec(1.0, 1.0, 0.8, xs)
    for xi, vi in zip(xs, out):
        assert vi == pytest.approx(kernels.g_family(1.0, 1.0, 0.8, float(xi)), rel=1e-12)


def test_boundary_transform_pin_and_identity():
    # K_{a,b} f(t) at (a=1, b=0.3, f=e^{-s}, t=1); mpmath mp.quad pin
    val = kernels.K_ab_apply(1.0, 0.3, lambda s: math.exp(-s), 1.0)
    assert val == pytest.approx(0.1823994825935055, rel=1e-10)
    # K_{1/gamma^2, gamma x}(e^{-beta s/gamma})(t) = gamma * g_{beta,gamma}(t, x)
    beta, gamma, t, x = 2.0, 0.5, 0.3, 1.2
    lhs = kernels.K_ab_apply(1.0 / gamma**2, gamma * x,
                             lambda s: math.exp(-beta * s / gamma), t)
    assert lhs == pytest.approx(gamma * kernels.g_family(beta, gamma, t, x), rel=1e-9)
    assert lhs == pytest.approx(gamma * 0.026740867633317005, rel=1e-9)
    with pytest.raises(NonPositiveTime):
        kernels.K_ab_apply(1.0, 0.0, lambda s: 1.0, 0.0)
    with pytest.raises(ValueError):
        kernels.K_ab_apply(0.0, 0.0, lambda s: 1.0, 1.0)


# ---------------------------------------------------------------------------
# transition measures


def test_transition_atoms_pinned():
    sticky = kernels.transition_measure(BoundaryModel.sticky(1.0), 1.0, 0.0)
    assert sticky.atoms[0.0] == pytest.approx(0.33620400244634121, rel=1e-12)
    general = kernels.transition_measure(BoundaryModel.general(1.0, 1.0), 0.7, 0.0)
    assert general.atoms[0.0] == pytest.approx(0.24304515412522021, rel=1e-9)
    # trap occupation int_0^t h_x(s) e^{-beta(t-s)} ds; mpmath mp.quad pin
    trap = kernels.transition_measure(BoundaryModel.trap_kill(1.0), 1.0, 0.5)
    assert trap.atoms[0.0] == pytest.approx(0.3232059862154669, rel=1e-9)
    # stopped convention: erfc(x/sqrt(2t))
    stop = kernels.transition_measure(BoundaryModel.absorbing(), 1.0, 0.5)
    assert stop.atoms[0.0] == pytest.approx(0.61707507745197379, rel=1e-13)


def test_absorbing_conventions():
    killed = kernels.transition_measure(BoundaryModel.absorbing(), 1.0, 0.5,
                                        absorbing="kill")
    assert killed.atoms == {}
    stop = kernels.transition_measure(BoundaryModel.absorbing(), 1.0, 0.5)
    # the interior density is shared; only the trap atom differs
    ys = np.array([0.2, 0.9, 1.7])
    assert np.allclose(killed.density(ys), stop.density(ys))
    assert stop.total_mass() == pytest.approx(1.0, abs=1e-9)
    assert killed.total_mass() == pytest.approx(1.0 - 0.61707507745197379, abs=1e-9)
    with pytest.raises(ValueError):
        kernels.transition_measure(BoundaryModel.absorbing(), 1.0, 0.5,
                                   absorbing="bogus")


def test_conservative_modes_have_unit_mass():
    for model in (BoundaryModel.reflecting(), BoundaryModel.sticky(1.0)):
        for x in (0.0, 0.7):
            mass = kernels.transition_measure(model, 1.0, x).total_mass()
            assert mass == pytest.approx(1.0, abs=1e-8)


def test_elastic_mass_deficit_is_the_local_time_transform():
    # survival from 0 equals E e^{-beta L_t} = e^{t/2} erfc(sqrt(t/2)) at beta=1
    mass = kernels.transition_measure(BoundaryModel.elastic(1.0), 1.0, 0.0).total_mass()
    assert mass == pytest.approx(0.52315658373024674, abs=1e-9)


def test_elastic_density_dominated_by_reflecting():
    el = kernels.transition_measure(BoundaryModel.elastic(1.0), 1.0, 0.4)
    for y in (0.0, 0.3, 1.0, 2.5):
        assert float(el.density(y)) <= float(kernels.p_neumann(1.0, 0.4, y)) + 1e-14


def test_elastic_transition_alt_equals_measure_density():
    el = kernels.transition_measure(BoundaryModel.elastic(1.0), 0.6, 0.4)
    ys = np.array([0.1, 0.8, 2.0])
    assert np.allclose(kernels.elastic_transition_alt(1.0, 0.6, 0.4, ys),
                       np.asarray(el.density(ys)), rtol=0, atol=1e-13)


def test_transition_argument_validation():
    with pytest.raises(NonPositiveTime):
        kernels.transition_measure(BoundaryModel.reflecting(), 0.0, 0.5)
    with pytest.raises(StartOutOfRange):
        kernels.transition_measure(BoundaryModel.reflecting(), 1.0, -0.5)


# ---------------------------------------------------------------------------
# resolvent measures


def test_resolvent_total_mass_closed_forms():
    lam = 1.0
    # conservative: R_lam 1 = 1/lam
    refl = kernels.resolvent_measure(BoundaryModel.reflecting(), lam, 0.6)
    assert refl.total_mass() == pytest.approx(1.0 / lam, abs=1e-8)
    # (beta, gamma) family: R_lam 1 = (1 - beta rho e^{-kx}) / lam
    model = BoundaryModel.general(1.0, 1.0)
    x = 0.4
    fac = kernels.laplace_factors(1.0, 1.0, lam, x)
    expect = (1.0 - 1.0 * fac.rho * fac.e_lambda) / lam
    mass = kernels.resolvent_measure(model, lam, x).total_mass()
    assert mass == pytest.approx(expect, abs=1e-8)


def test_resolvent_atoms_closed_forms():
    lam = 1.0
    sticky = kernels.resolvent_measure(BoundaryModel.sticky(1.0), lam, 0.0)
    # gamma rho e^{-kx} with rho = 1/(sqrt 2 + 1) at the origin
    assert sticky.atoms[0.0] == pytest.approx(math.sqrt(2.0) - 1.0, rel=1e-14)
    trap = kernels.resolvent_measure(BoundaryModel.trap_kill(2.0), lam, 0.5)
    assert trap.atoms[0.0] == pytest.approx(
        math.exp(-math.sqrt(2.0) * 0.5) / (lam + 2.0), rel=1e-14
    )
    stop = kernels.resolvent_measure(BoundaryModel.absorbing(), lam, 0.5,
                                     absorbing="stop")
    assert stop.atoms[0.0] == pytest.approx(math.exp(-math.sqrt(2.0) * 0.5), rel=1e-14)
    kill = kernels.resolvent_measure(BoundaryModel.absorbing(), lam, 0.5)
    assert kill.atoms == {}


def test_elastic_resolvent_two_forms_agree():
    for lam in (0.5, 1.0, 2.0):
        m = kernels.resolvent_measure(BoundaryModel.elastic(1.0), lam, 0.3)
        for y in (0.1, 0.8, 2.0):
            alt = float(kernels.elastic_resolvent_alt(1.0, lam, 0.3, y))
            assert alt == pytest.approx(float(m.density(y)), abs=1e-13)


def test_resolvent_is_laplace_transform_of_transition():
    """r(x, y) = int_0^inf e^{-lam t} p_t(x, y) dt for the sticky kernel."""
    model = BoundaryModel.sticky(1.0)
    lam, x, y = 1.0, 0.4, 0.9
    target = float(kernels.resolvent_measure(model, lam, x).density(y))

    def integrand(t):
        return math.exp(-lam * t) * float(kernels.transition_measure(model, t, x).density(y))

    val = quad(integrand, 0.0, 8.0, points=[0.05, 0.5, 2.0], limit=300, epsabs=1e-11)[0]
    val += quad(integrand, 8.0, 60.0, limit=200, epsabs=1e-11)[0]
    assert val == pytest.approx(target, rel=1e-6)


def test_resolvent_argument_validation():
    with pytest.raises(NonPositiveLambda):
        kernels.resolvent_measure(BoundaryModel.reflecting(), 0.0, 0.5)
    with pytest.raises(StartOutOfRange):
        kernels.resolvent_measure(BoundaryModel.reflecting(), 1.0, -0.1)
    with pytest.raises(NonPositiveLambda):
        kernels.laplace_factors(1.0, 1.0, -1.0, 0.5)


# ---------------------------------------------------------------------------
# interval kernels


def test_interval_dirichlet_resolvent_pin_and_symmetry():
    # eigenfunction expansion over the odd sine modes, summed in mpmath,
    # cross-checked against the sinh closed form 2 sinh^2(k/2)/(k sinh k)
    val = kernels.interval_dirichlet_resolvent(1.0, 0.5, 0.5)
    assert val == pytest.approx(0.43052858579027382, rel=1e-12)
    for x, y in ((0.2, 0.7), (0.35, 0.9), (0.5, 0.01)):
        a = kernels.interval_dirichlet_resolvent(1.0, x, y)
        b = kernels.interval_dirichlet_resolvent(1.0, y, x)
        assert a == pytest.approx(b, rel=1e-12)
    assert kernels.interval_dirichlet_resolvent(1.0, 0.0, 0.6) == pytest.approx(0.0, abs=1e-13)
    assert kernels.interval_dirichlet_resolvent(1.0, 0.4, 1.0) == pytest.approx(0.0, abs=1e-13)


def test_interval_dirichlet_resolvent_sinh_form():
    # image-charge series vs 2 sinh(kx) sinh(k(1-y)) / (k sinh k), x <= y
    for lam in (0.5, 2.0, 7.0):
        k = math.sqrt(2.0 * lam)
        for x, y in ((0.2, 0.7), (0.45, 0.55), (0.1, 0.95)):
            expect = 2.0 * math.sinh(k * x) * math.sinh(k * (1 - y)) / (k * math.sinh(k))
            got = kernels.interval_dirichlet_resolvent(lam, x, y)
            assert got == pytest.approx(expect, rel=1e-11)


def test_interval_exit_transforms():
    u0, u1 = kernels.interval_hitting_lt(1.0, 0.3)
    # sinh(k(1-x))/sinh k and sinh(kx)/sinh k; mpmath 40-digit pins
    assert u0 == pytest.approx(0.59933410731031363, rel=1e-13)
    assert u1 == pytest.approx(0.22588730746991037, rel=1e-13)
    assert kernels.interval_hitting_lt(2.0, 0.0) == pytest.approx((1.0, 0.0))
    assert kernels.interval_hitting_lt(2.0, 1.0) == pytest.approx((0.0, 1.0))
    # large lambda must not overflow
    a, b = kernels.interval_hitting_lt(1e6, 0.5)
    assert 0.0 <= a < 1e-100 and 0.0 <= b < 1e-100
    with pytest.raises(NonPositiveLambda):
        kernels.interval_hitting_lt(0.0, 0.5)


ONE = lambda y: 1.0

# x -> R_1 1(x) for Elastic(1) at 0 / Reflecting at 1; sympy ODE pins
INTERVAL_PINS = [
    (0.0, 0.5568096679436695),
    (0.3, 0.6884201124609675),
    (1.0, 0.7965321468378095),
]


def test_interval_resolvent_pins():
    el = BoundaryModel.elastic(1.0)
    refl = BoundaryModel.reflecting()
    for x, pin in INTERVAL_PINS:
        got = kernels.interval_resolvent(el, refl, 1.0, ONE, x)
        assert got == pytest.approx(pin, rel=1e-8)


def test_interval_resolvent_conservative_cases():
    refl = BoundaryModel.reflecting()
    for x in (0.0, 0.3, 0.9):
        assert kernels.interval_resolvent(refl, refl, 2.0, ONE, x) == pytest.approx(
            0.5, rel=1e-8
        )
    # stopping at both ends also conserves f = 1 mass (trap contributes f(0)/lam)
    absb = BoundaryModel.absorbing()
    assert kernels.interval_resolvent(absb, absb, 2.0, ONE, 0.4) == pytest.approx(
        0.5, rel=1e-8
    )


def test_interval_resolvent_argument_validation():
    refl = BoundaryModel.reflecting()
    with pytest.raises(NonPositiveLambda):
        kernels.interval_resolvent(refl, refl, 0.0, ONE, 0.5)
    with pytest.raises(StartOutOfRange):
        kernels.interval_resolvent(refl, refl, 1.0, ONE, 1.5)


def test_singular_closure_is_reported():
    with pytest.raises(SingularSystem):
        kernels._solve_closure(1.0, 2.0, 2.0, 4.0, 1.0, 1.0)


# ---------------------------------------------------------------------------
# CSV table export


def _read_table(text):
    comments = [ln for ln in text.splitlines() if ln.startswith("#")]
    rows = list(csv.reader(io.StringIO(
        "\n".join(ln for ln in text.splitlines() if not ln.startswith("#"))
    )))
    return comments, rows[0], rows[1:]


def test_kernel_table_layout_and_atom_column():
    buf = io.StringIO()
    kernels.write_kernel_table(
        BoundaryModel.sticky(1.0), buf, kind="transition", value=1.0,
        xs=(0.0, 0.5), ys=(0.0, 0.25, 0.5),
    )
    comments, header, rows = _read_table(buf.getvalue())
    assert comments[0].startswith("# model:")
    assert "transition at t = 1.0" in comments[1]
    assert tuple(header) == kernels.KERNEL_CSV_COLUMNS
    assert len(rows) == 6
    by_x = {}
    for row in rows:
        by_x.setdefault(float(row[1]), []).append(row)
    # atom0 repeats the boundary atom per x block; atom1 is 0 on the half line
    assert float(by_x[0.0][0][4]) == pytest.approx(0.33620400244634121, rel=1e-12)
    assert all(float(r[5]) == 0.0 for r in rows)
    d = float(by_x[0.5][2][3])
    expect = kernels.transition_measure(BoundaryModel.sticky(1.0), 1.0, 0.5)
    assert d == pytest.approx(float(expect.density(0.5)), rel=1e-12)


def test_kernel_table_resolvent_kind():
    buf = io.StringIO()
    kernels.write_kernel_table(
        BoundaryModel.elastic(1.0), buf, kind="resolvent", value=2.0,
        xs=(0.3,), ys=(0.1, 0.9),
    )
    comments, header, rows = _read_table(buf.getvalue())
    assert "resolvent at lambda = 2.0" in comments[1]
    m = kernels.resolvent_measure(BoundaryModel.elastic(1.0), 2.0, 0.3)
    assert float(rows[0][3]) == pytest.approx(float(m.density(0.1)), rel=1e-12)
    with pytest.raises(ValueError):
        kernels.write_kernel_table(BoundaryModel.elastic(1.0), io.StringIO(),
                                   kind="bogus", value=1.0, xs=(0,), ys=(0,))
