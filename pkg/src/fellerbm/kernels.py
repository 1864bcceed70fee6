"""Closed-form transition densities, boundary atoms, and resolvent kernels.

All half-line models share one master form.  With k = sqrt(2*lambda) and
rho(lambda) = 1/(beta + k + gamma*lambda), the resolvent measure is

    r(lambda, x, dy) = r_D(lambda, x, y) dy
                       + rho * 2 exp(-k (x+y)) dy
                       + gamma * rho * exp(-k x) * delta_0(dy),

which collapses to the Neumann kernel (beta = gamma = 0), the elastic
kernel (gamma = 0), and the sticky kernel (beta = 0).  The transition
measure is the same shape with 2*g_{beta,gamma}(t, x+y) in place of the
exponential and gamma*g_{beta,gamma}(t, x) as the atom, where g_{beta,gamma}
is the boundary kernel family:

    g(t, x)        = (2 pi t)^{-1/2} exp(-x^2/2t)
    g_{beta,0}     = g - (beta/2) e^{beta x + beta^2 t/2} erfc(x/sqrt(2t) + beta sqrt(t/2))
    g_{0,gamma}    = (1/gamma) e^{-x^2/2t} erfcx(x/sqrt(2t) + sqrt(2t)/gamma)
    g_{beta,gamma} = (1/(gamma^2 sqrt(2 pi))) int_0^t (s + gamma x)(t-s)^{-3/2}
                       exp(-(s+gamma x)^2 / (2 gamma^2 (t-s))) e^{-beta s/gamma} ds.

Every exp*erfc product goes through the scaled complementary error function
erfcx to avoid overflow.  The g_{beta,gamma} integral is evaluated by two
substitutions: sigma = s/gamma on [0, t/2] (the integrand peak is at
sigma = O(sqrt t) uniformly in gamma) and s = t - u^2 on [t/2, t] (removes
the (t-s)^{-3/2} endpoint singularity).

Absorbing and trap-and-kill fall outside the master family: absorbing is
the Dirichlet kernel plus (in the stopped convention) an atom
erfc(x/sqrt(2t)) at the origin; trap-and-kill convolves the first-hitting
density of 0 with the exponential holding decay.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Optional, Sequence, TextIO

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc, erfcx

from .errors import (
    NonPositiveLambda,
    NonPositiveTime,
    SingularSystem,
    StartOutOfRange,
)
from .model import BoundaryModel, Mode

_SQRT2PI = math.sqrt(2.0 * math.pi)


# ---------------------------------------------------------------------------
# free-line and half-line building blocks


def p_free(t, x, y):
    """Gauss kernel (2 pi t)^{-1/2} exp(-(x-y)^2 / 2t)."""
    return np.exp(-((x - y) ** 2) / (2.0 * t)) / math.sqrt(2.0 * math.pi * t)


def p_neumann(t, x, y):
    """Transition density of reflecting BM on [0, inf)."""
    return p_free(t, x, y) + p_free(t, x, -np.asarray(y))


def p_dirichlet(t, x, y):
    """Transition density of BM killed at 0."""
    return p_free(t, x, y) - p_free(t, x, -np.asarray(y))


def r_neumann(lam, x, y):
    """Resolvent kernel of reflecting BM."""
    k = math.sqrt(2.0 * lam)
    return (np.exp(-k * np.abs(x - np.asarray(y))) + np.exp(-k * (x + np.asarray(y)))) / k


def r_dirichlet(lam, x, y):
    """Resolvent kernel of BM killed at 0."""
    k = math.sqrt(2.0 * lam)
    return (np.exp(-k * np.abs(x - np.asarray(y))) - np.exp(-k * (x + np.asarray(y)))) / k


def hitting_density(x: float, s):
    """Density of the first hitting time of 0 from x > 0:
    h_x(s) = x (2 pi s^3)^{-1/2} exp(-x^2/2s)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    sp = s[pos]
    out[pos] = x / np.sqrt(2.0 * math.pi * sp**3) * np.exp(-(x * x) / (2.0 * sp))
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# the g family


def _g_plain(t: float, x) -> np.ndarray:
    return np.exp(-np.asarray(x, dtype=float) ** 2 / (2.0 * t)) / math.sqrt(
        2.0 * math.pi * t
    )


def _g_beta0(beta: float, t: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    z = x / math.sqrt(2.0 * t) + beta * math.sqrt(t / 2.0)
    return _g_plain(t, x) - 0.5 * beta * np.exp(-(x * x) / (2.0 * t)) * erfcx(z)


def _g_0gamma(gamma: float, t: float, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    z = x / math.sqrt(2.0 * t) + math.sqrt(2.0 * t) / gamma
    return np.exp(-(x * x) / (2.0 * t)) * erfcx(z) / gamma


def _g_quad(beta: float, gamma: float, t: float, x: float) -> float:
    """g_{beta,gamma} by adaptive quadrature, absolute tolerance 1e-10."""

    def lower(sig):  # sigma = s/gamma on s in [0, t/2]
        ts = t - gamma * sig
        w = sig + x
        arg = w * w / (2.0 * ts)
        if arg > 700.0 or beta * sig > 700.0:
            return 0.0
        return w * ts**-1.5 * math.exp(-arg - beta * sig)

    def upper(u):  # s = t - u^2 on s in [t/2, t]
        s = t - u * u
        w = s + gamma * x
        arg = w * w / (2.0 * gamma * gamma * u * u)
        if arg > 700.0 or beta * s / gamma > 700.0:
            return 0.0
        return w * u**-2 * math.exp(-arg - beta * s / gamma)

    hi = t / (2.0 * gamma)
    rt = math.sqrt(t)
    pts = [p for p in (x + rt, x + 5.0 * rt, x + 20.0 * rt) if 0.0 < p < hi]
    i1, _ = quad(lower, 0.0, hi, points=pts or None, epsabs=1e-12, epsrel=1e-11, limit=300)
    i2, _ = quad(upper, 0.0, math.sqrt(t / 2.0), epsabs=1e-12, epsrel=1e-11, limit=300)
    return (i1 + 2.0 * i2 / (gamma * gamma)) / _SQRT2PI


def g_family(beta: float, gamma: float, t: float, x: float) -> float:
    """Boundary kernel g_{beta,gamma}(t, x) for beta, gamma >= 0, t > 0, x >= 0."""
    if t <= 0:
        raise NonPositiveTime(f"t must be positive, got {t}")
    if beta < 0 or gamma < 0:
        raise ValueError("beta and gamma must be nonnegative")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    if gamma == 0.0:
        if beta == 0.0:
            return float(_g_plain(t, x))
        return float(_g_beta0(beta, t, x))
    if beta == 0.0:
        return float(_g_0gamma(gamma, t, x))
    return _g_quad(beta, gamma, t, x)


def _g_vec(beta: float, gamma: float, t: float, x) -> np.ndarray:
    """Vectorized g_{beta,gamma}(t, .); quadrature only in the mixed case."""
    x = np.asarray(x, dtype=float)
    if gamma == 0.0:
        return _g_plain(t, x) if beta == 0.0 else _g_beta0(beta, t, x)
    if beta == 0.0:
        return _g_0gamma(gamma, t, x)
    flat = np.atleast_1d(x).ravel()
    out = np.array([_g_quad(beta, gamma, t, xi) for xi in flat])
    return out.reshape(np.shape(x)) if np.ndim(x) else float(out[0])


# ---------------------------------------------------------------------------
# measures


@dataclass
class BoundaryMeasure:
    """Sub-probability measure: interior density plus boundary atoms.

    Total mass is 1 for conservative modes (reflecting, sticky) and at most
    1 otherwise; the deficit is the probability of being dead.
    """

    density: Callable[[np.ndarray], np.ndarray]
    atoms: Dict[float, float] = field(default_factory=dict)

    def interior_mass(self, upper: float = np.inf) -> float:
        val, _ = quad(lambda y: float(self.density(y)), 0.0, upper, limit=300)
        return val

    def total_mass(self, upper: float = np.inf) -> float:
        return self.interior_mass(upper) + sum(self.atoms.values())


def _trapkill_atom(beta: float, t: float, x: float) -> float:
    """P(at the trap, still unkilled) = int_0^t h_x(s) e^{-beta(t-s)} ds."""
    if x == 0.0:
        return math.exp(-beta * t)
    val, _ = quad(
        lambda s: float(hitting_density(x, s)) * math.exp(-beta * (t - s)),
        0.0,
        t,
        points=[min(x * x / 3.0, t * 0.5), min(x * x, t * 0.9)],
        epsabs=1e-12,
        limit=300,
    )
    return val


def transition_measure(
    model: BoundaryModel, t: float, x: float, *, absorbing: str = "stop"
) -> BoundaryMeasure:
    """Time-t distribution of the model started at x, as density + atoms.

    `absorbing` picks the convention for the absorbing mode: "stop" keeps
    the path at the origin forever (atom erfc(x/sqrt(2t)) at 0), "kill"
    sends it to the cemetery (mass deficit instead of an atom).
    """
    if t <= 0:
        raise NonPositiveTime(f"t must be positive, got {t}")
    if x < 0:
        raise StartOutOfRange(f"x must be >= 0, got {x}")
    mode = model.mode
    if mode is Mode.ABSORBING:
        atoms = {}
        if absorbing == "stop":
            atoms[0.0] = float(erfc(x / math.sqrt(2.0 * t)))
        elif absorbing != "kill":
            raise ValueError(f"absorbing convention must be stop/kill, got {absorbing}")
        return BoundaryMeasure(density=lambda y: p_dirichlet(t, x, y), atoms=atoms)
    if mode is Mode.TRAP_KILL:
        return BoundaryMeasure(
            density=lambda y: p_dirichlet(t, x, y),
            atoms={0.0: _trapkill_atom(model.beta, t, x)},
        )
    beta, gamma = model.beta, model.gamma

    def density(y):
        return p_dirichlet(t, x, y) + 2.0 * _g_vec(beta, gamma, t, x + np.asarray(y))

    atoms = {}
    if gamma > 0.0:
        atoms[0.0] = gamma * g_family(beta, gamma, t, x)
    return BoundaryMeasure(density=density, atoms=atoms)


def resolvent_measure(
    model: BoundaryModel, lam: float, x: float, *, absorbing: str = "kill"
) -> BoundaryMeasure:
    """Resolvent measure R_lambda(x, dy) as density + atoms.

    For the absorbing mode the default convention here is "kill" (Dirichlet
    kernel only, mass deficit at the trap); "stop" adds the trap atom
    e^{-k x}/lambda.  The two conventions share the interior density.
    """
    if lam <= 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    if x < 0:
        raise StartOutOfRange(f"x must be >= 0, got {x}")
    k = math.sqrt(2.0 * lam)
    mode = model.mode
    if mode is Mode.ABSORBING:
        atoms = {}
        if absorbing == "stop":
            atoms[0.0] = math.exp(-k * x) / lam
        elif absorbing != "kill":
            raise ValueError(f"absorbing convention must be stop/kill, got {absorbing}")
        return BoundaryMeasure(density=lambda y: r_dirichlet(lam, x, y), atoms=atoms)
    if mode is Mode.TRAP_KILL:
        return BoundaryMeasure(
            density=lambda y: r_dirichlet(lam, x, y),
            atoms={0.0: math.exp(-k * x) / (lam + model.beta)},
        )
    beta, gamma = model.beta, model.gamma
    rho = 1.0 / (beta + k + gamma * lam)

    def density(y):
        y = np.asarray(y)
        return r_dirichlet(lam, x, y) + 2.0 * rho * np.exp(-k * (x + y))

    atoms = {}
    if gamma > 0.0:
        atoms[0.0] = gamma * rho * math.exp(-k * x)
    return BoundaryMeasure(density=density, atoms=atoms)


def elastic_resolvent_alt(beta: float, lam: float, x: float, y) -> np.ndarray:
    """Elastic resolvent via the Neumann-kernel form
    r^N - (2 beta / ((beta+k) k)) e^{-k(x+y)}; algebraically equal to the
    Dirichlet-kernel form used by resolvent_measure (self-test hook)."""
    k = math.sqrt(2.0 * lam)
    y = np.asarray(y)
    return r_neumann(lam, x, y) - (2.0 * beta / ((beta + k) * k)) * np.exp(-k * (x + y))


def elastic_transition_alt(beta: float, t: float, x: float, y) -> np.ndarray:
    """Elastic transition density via the Neumann-kernel form
    p^N - beta e^{beta(x+y)+beta^2 t/2} erfc((x+y)/sqrt(2t) + beta sqrt(t/2)),
    evaluated through erfcx (self-test hook)."""
    y = np.asarray(y)
    w = x + y
    z = w / math.sqrt(2.0 * t) + beta * math.sqrt(t / 2.0)
    return p_neumann(t, x, y) - beta * np.exp(-(w * w) / (2.0 * t)) * erfcx(z)


# ---------------------------------------------------------------------------
# Laplace factors


@dataclass(frozen=True)
class LaplaceFactors:
    """e_lambda = e^{-sqrt(2 lambda) x}, rho = 1/(beta + sqrt(2 lambda) + gamma lambda)."""

    e_lambda: float
    rho: float
    sqrt2lambda: float


def laplace_factors(beta: float, gamma: float, lam: float, x: float) -> LaplaceFactors:
    if lam <= 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    k = math.sqrt(2.0 * lam)
    return LaplaceFactors(
        e_lambda=math.exp(-k * x),
        rho=1.0 / (beta + k + gamma * lam),
        sqrt2lambda=k,
    )


# ---------------------------------------------------------------------------
# interval kernels


def _image_charge_terms(lam: float) -> int:
    """Truncation K for the image-charge series from the tail bound
    2 e^{-k(2K-2)} / k < 1e-14."""
    k = math.sqrt(2.0 * lam)
    bound = -math.log(0.5e-14 * k)
    return max(2, int(math.ceil(1.0 + bound / (2.0 * k))))


def interval_dirichlet_resolvent(lam: float, x: float, y: float) -> float:
    """Resolvent kernel of BM on [0,1] killed at both ends, by the
    image-charge series sum_k [e^{-k|x-y+2m|} - e^{-k|x+y+2m|}] / k."""
    if lam <= 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    k = math.sqrt(2.0 * lam)
    kk = _image_charge_terms(lam)
    m = np.arange(-kk, kk + 1, dtype=float) * 2.0
    terms = np.exp(-k * np.abs(x - y + m)) - np.exp(-k * np.abs(x + y + m))
    return float(terms.sum() / k)


def interval_hitting_lt(lam: float, x: float) -> tuple[float, float]:
    """Laplace transforms of exit through each end of [0,1]:
    toward0 = E_x[e^{-lam H_0}; H_0 < H_1] = sinh(k(1-x))/sinh(k) and the
    mirror image toward1, evaluated in overflow-safe exponential form."""
    if lam <= 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    a = math.sqrt(2.0 * lam)
    denom = -math.expm1(-2.0 * a)
    toward0 = math.exp(-a * x) * (-math.expm1(-2.0 * a * (1.0 - x))) / denom
    toward1 = math.exp(-a * (1.0 - x)) * (-math.expm1(-2.0 * a * x)) / denom
    return toward0, toward1


def _sinh_ratio_derivatives(lam: float) -> tuple[float, float]:
    """(k coth k, k/sinh k) for k = sqrt(2 lam), stable for large k."""
    k = math.sqrt(2.0 * lam)
    if k > 700.0:
        e = math.exp(-k)
        return k * (1.0 + 2.0 * e * e), 2.0 * k * e
    return k / math.tanh(k), k / math.sinh(k)


def _solve_closure(a00: float, a01: float, a10: float, a11: float,
                   b0: float, b1: float) -> tuple[float, float]:
    det = a00 * a11 - a01 * a10
    if abs(det) < 1e-13:
        raise SingularSystem(f"boundary closure system is singular (det={det:.3e})")
    return (b0 * a11 - b1 * a01) / det, (a00 * b1 - a10 * b0) / det


def interval_resolvent(
    model0: BoundaryModel,
    model1: BoundaryModel,
    lam: float,
    f: Callable[[float], float],
    x: float,
) -> float:
    """R_lambda f(x) for the interval process with the given endpoint models.

    Representation: R f = R^D f + u0 * Rf(0) + u1 * Rf(1), where u0, u1 are
    the sinh exit ratios.  The two boundary values solve the 2x2 system
    obtained by substituting the representation into each Wentzell
    condition, eliminating second derivatives via (Rf)'' = 2(lam Rf - f)
    and using the analytic derivatives (R^D f)'(0+) = 2 (u0, f),
    (R^D f)'(1-) = -2 (u1, f), u0'(0) = -k coth k, u1'(0) = k/sinh k (and
    mirrored at 1).
    """
    if lam <= 0:
        raise NonPositiveLambda(f"lambda must be positive, got {lam}")
    if not 0.0 <= x <= 1.0:
        raise StartOutOfRange(f"x must lie in [0,1], got {x}")
    a0, b0, c0 = model0.to_wentzell()
    a1, b1, c1 = model1.to_wentzell()
    kcoth, ksh = _sinh_ratio_derivatives(lam)

    if0, _ = quad(lambda y: interval_hitting_lt(lam, y)[0] * f(y), 0.0, 1.0, limit=200)
    if1, _ = quad(lambda y: interval_hitting_lt(lam, y)[1] * f(y), 0.0, 1.0, limit=200)

    r0, r1 = _solve_closure(
        a0 + c0 * lam + b0 * kcoth, -b0 * ksh,
        -b1 * ksh, a1 + c1 * lam + b1 * kcoth,
        c0 * f(0.0) + 2.0 * b0 * if0,
        c1 * f(1.0) + 2.0 * b1 * if1,
    )

    rdf, _ = quad(
        lambda y: interval_dirichlet_resolvent(lam, x, y) * f(y),
        0.0, 1.0, points=[x] if 0.0 < x < 1.0 else None, limit=200,
    )
    u0, u1 = interval_hitting_lt(lam, x)
    return rdf + u0 * r0 + u1 * r1


# ---------------------------------------------------------------------------
# the K_{a,b} transform


def K_ab_apply(a: float, b: float, f: Callable[[float], float], t: float) -> float:
    """K_{a,b} f(t) = sqrt(a/2pi) int_0^t (s+b)(t-s)^{-3/2}
    exp(-a(s+b)^2/(2(t-s))) f(s) ds, with the s -> t endpoint singularity
    removed by s = t - u^2 on the upper half."""
    if t <= 0:
        raise NonPositiveTime(f"t must be positive, got {t}")
    if a <= 0 or b < 0:
        raise ValueError("need a > 0 and b >= 0")

    def lower(s):
        ts = t - s
        w = s + b
        arg = a * w * w / (2.0 * ts)
        if arg > 700.0:
            return 0.0
        return w * ts**-1.5 * math.exp(-arg) * f(s)

    def upper(u):
        s = t - u * u
        w = s + b
        arg = a * w * w / (2.0 * u * u)
        if arg > 700.0:
            return 0.0
        return w * u**-2 * math.exp(-arg) * f(s)

    i1, _ = quad(lower, 0.0, t / 2.0, epsabs=1e-12, epsrel=1e-11, limit=300)
    i2, _ = quad(upper, 0.0, math.sqrt(t / 2.0), epsabs=1e-12, epsrel=1e-11, limit=300)
    return math.sqrt(a / (2.0 * math.pi)) * (i1 + 2.0 * i2)


# ---------------------------------------------------------------------------
# kernel-table CSV export

KERNEL_CSV_COLUMNS = ("t_or_lambda", "x", "y", "density", "atom0", "atom1")


def write_kernel_table(
    model: BoundaryModel,
    out: TextIO,
    *,
    kind: str,
    value: float,
    xs: Sequence[float],
    ys: Sequence[float],
    absorbing: Optional[str] = None,
) -> None:
    """Tabulate a transition (kind="transition", value=t) or resolvent
    (kind="resolvent", value=lambda) measure over a grid of (x, y).

    Header comment lines (prefixed #) record the model and the table kind;
    atom1 is identically 0 for half-line models.
    """
    if kind not in ("transition", "resolvent"):
        raise ValueError(f"kind must be transition or resolvent, got {kind}")
    out.write(f"# model: {model.to_config()}\n")
    out.write(f"# kind: {kind} at {'t' if kind == 'transition' else 'lambda'} = {value!r}\n")
    writer = csv.writer(out)
    writer.writerow(KERNEL_CSV_COLUMNS)
    for x in xs:
        kwargs = {} if absorbing is None else {"absorbing": absorbing}
        if kind == "transition":
            meas = transition_measure(model, value, x, **kwargs)
        else:
            meas = resolvent_measure(model, lam=value, x=x, **kwargs)
        atom0 = meas.atoms.get(0.0, 0.0)
        dens = np.asarray(meas.density(np.asarray(ys, dtype=float)))
        for y, d in zip(ys, dens):
            writer.writerow(
                (repr(float(value)), repr(float(x)), repr(float(y)),
                 repr(float(d)), repr(float(atom0)), repr(0.0))
            )
