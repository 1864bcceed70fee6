"""Closed-form auxiliary laws used as Monte Carlo oracles.

Local-time normalisation is the Tanaka convention throughout: L_t of
reflecting BM at 0 is distributed like |N(0, t)| (density 2 g(t, y)), and
the inverse local time K_r = inf{t : L_t > r} is the first passage time of
level r by the driving BM.  Parts of the literature carry an extra factor
2 in L; every formula below is stated in the convention above and the test
suite pins it via the L_t law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .kernels import p_free


@dataclass
class ScalarLaw:
    """A scalar distribution: density and/or Laplace transform and mean."""

    descriptor: str
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None
    laplace_transform: Optional[Callable[[float], float]] = None
    mean: Optional[float] = None


def k_r_law(r: float) -> ScalarLaw:
    """Law of the inverse local time K_r (= first passage of r by BM).

    Density r (2 pi l^3)^{-1/2} e^{-r^2/2l}; Laplace transform
    e^{-sqrt(2 lambda) r}.  The mean is infinite (stable-1/2 tail).
    """
    if r <= 0:
        raise ValueError(f"r must be positive, got {r}")

    def density(l):
        l = np.asarray(l, dtype=float)
        out = np.zeros_like(l)
        pos = l > 0
        lp = l[pos]
        out[pos] = r / np.sqrt(2.0 * math.pi * lp**3) * np.exp(-(r * r) / (2.0 * lp))
        return out if out.ndim else float(out)

    return ScalarLaw(
        descriptor=f"inverse_local_time(r={r})",
        density=density,
        laplace_transform=lambda lam: math.exp(-math.sqrt(2.0 * lam) * r),
        mean=math.inf,
    )


def local_time_law(t: float) -> ScalarLaw:
    """Law of L_t for reflecting BM from 0: density 2 g(t, y) = |N(0,t)|."""
    if t <= 0:
        raise ValueError(f"t must be positive, got {t}")

    def density(y):
        y = np.asarray(y, dtype=float)
        return np.where(y >= 0, 2.0 * p_free(t, 0.0, y), 0.0)

    return ScalarLaw(
        descriptor=f"local_time(t={t})",
        density=density,
        laplace_transform=lambda lam: float(
            np.exp(lam * lam * t / 2.0)
            * math.erfc(lam * math.sqrt(t / 2.0))
        ),
        mean=math.sqrt(2.0 * t / math.pi),
    )


def v_exit(alpha: float, beta: float, a: float, x: float) -> float:
    """E_x exp(-alpha H_a - beta L_{H_a}) for reflecting BM with exit level a.

    On [0, a] the unique bounded even solution of (1/2)v'' = alpha v with
    v(a) = 1 and v'(0+) = beta v(0):

        v(x) = (k cosh(k x) + beta sinh(k x)) / (k cosh(k a) + beta sinh(k a)),

    k = sqrt(2 alpha); beyond a the local time never enters and
    v(x) = e^{-k(|x|-a)}.  Extended evenly in x.  The alpha -> 0 limit is
    (1 + beta |x|)/(1 + beta a) inside and 1 outside.
    """
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be nonnegative")
    x = abs(x)
    if alpha == 0.0:
        return (1.0 + beta * x) / (1.0 + beta * a) if x <= a else 1.0
    k = math.sqrt(2.0 * alpha)
    if x <= a:
        return (k * math.cosh(k * x) + beta * math.sinh(k * x)) / (
            k * math.cosh(k * a) + beta * math.sinh(k * a)
        )
    return math.exp(-k * (x - a))


def kill_before_hit_prob(a: float, beta: float) -> float:
    """P_0(H_a < zeta_beta) = 1/(1 + beta a) for elastic BM.

    The survival race at level a: L_{H_a} is Exponential(mean a) and the
    kill level S is Exponential(rate beta), independent.  (The value is the
    probability the hit comes first; its complement is the kill
    probability.)
    """
    if a <= 0 or beta <= 0:
        raise ValueError("need a > 0 and beta > 0")
    return 1.0 / (1.0 + beta * a)


def joint_refl_lt_density(s: float, x: float, y: float) -> float:
    """Joint density of (|B_s|, L_s) from 0: 2(x+y)(2 pi s^3)^{-1/2} e^{-(x+y)^2/2s}."""
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    if x < 0 or y < 0:
        return 0.0
    w = x + y
    return 2.0 * w / math.sqrt(2.0 * math.pi * s**3) * math.exp(-(w * w) / (2.0 * s))


def zeta_lt(beta: float, gamma: float, lam: float) -> float:
    """E_0 e^{-lambda zeta} = beta/(beta + sqrt(2 lambda) + gamma lambda)
    for the lifetime of the (beta, gamma) boundary model; gamma = 0 is the
    elastic case."""
    if beta <= 0 or lam <= 0:
        raise ValueError("need beta > 0 and lambda > 0")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    return beta / (beta + math.sqrt(2.0 * lam) + gamma * lam)


def ls_alpha_potential(alpha: float, gamma: float, x: float) -> float:
    """E_x int_0^inf e^{-alpha t} dL^s_t = e^{-sqrt(2 alpha) x} / (sqrt(2 alpha) + alpha gamma)."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if gamma < 0 or x < 0:
        raise ValueError("need gamma >= 0 and x >= 0")
    k = math.sqrt(2.0 * alpha)
    return math.exp(-k * x) / (k + alpha * gamma)


def sticky_exit_mean(gamma: float, eps: float) -> float:
    """E_0 H_{gamma,eps} = eps^2 + gamma eps: mean exit time of [0, eps) for
    the sticky model started at the boundary."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    return eps * eps + gamma * eps
