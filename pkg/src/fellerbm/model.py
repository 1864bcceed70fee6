"""Wentzell boundary data: normalization, mode classification, residuals.

A boundary condition at 0 for a diffusion generator has the form

    a0 f(0) - b0 f'(0+) + (c0/2) f''(0+) = 0,      a0,b0,c0 >= 0,

and at the right endpoint of an interval the first derivative enters with
the opposite sign (inward normal):

    a1 f(1) + b1 f'(1-) + (c1/2) f''(1-) = 0.

Only the ratios of (a,b,c) matter, so triples are stored normalized to sum
one.  The admissible processes are classified by which coefficients vanish:

    ==========  =================  =======================
    mode        nonzero weights    derived parameters
    ==========  =================  =======================
    Reflecting  b only             --
    Absorbing   c only             --
    Elastic     a, b               beta = a/b
    Sticky      b, c               gamma = c/b
    General     a, b, c            beta = a/b, gamma = c/b
    TrapKill    a, c               beta = a/c
    ==========  =================  =======================

The pure Dirichlet corner (1,0,0) admits no normal process and is rejected.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import AllZero, PureDirichlet

#: a normalized coefficient below this is treated as exactly zero when
#: classifying, to keep the mode stable under rounding of the inputs.
ZERO_TOL = 1e-12


class Side(enum.Enum):
    AT_ZERO = "zero"
    AT_ONE = "one"


class Mode(enum.Enum):
    REFLECTING = "reflecting"
    ABSORBING = "absorbing"
    ELASTIC = "elastic"
    STICKY = "sticky"
    GENERAL = "general"
    TRAP_KILL = "trap_kill"


@dataclass(frozen=True)
class WentzellTriple:
    """Normalized boundary weights (a0, b0, c0) at one endpoint."""

    a0: float
    b0: float
    c0: float
    side: Side = Side.AT_ZERO


@dataclass(frozen=True)
class BoundaryModel:
    """A Wentzell triple together with its process mode and (beta, gamma).

    beta is the killing rate on the local-time scale (elastic/general) or
    the trap-escape-to-cemetery rate (trap-and-kill); gamma the stickiness.
    Whichever is meaningless for the mode is stored as 0.0.
    """

    triple: WentzellTriple
    mode: Mode
    beta: float = 0.0
    gamma: float = 0.0

    @property
    def side(self) -> Side:
        return self.triple.side

    def to_wentzell(self) -> tuple[float, float, float]:
        """Return the normalized (a0, b0, c0)."""
        t = self.triple
        return (t.a0, t.b0, t.c0)

    # -- convenience constructors ------------------------------------

    @staticmethod
    def reflecting(side: Side = Side.AT_ZERO) -> "BoundaryModel":
        return normalize_wentzell(0.0, 1.0, 0.0, side)

    @staticmethod
    def absorbing(side: Side = Side.AT_ZERO) -> "BoundaryModel":
        return normalize_wentzell(0.0, 0.0, 1.0, side)

    @staticmethod
    def elastic(beta: float, side: Side = Side.AT_ZERO) -> "BoundaryModel":
        if beta <= 0:
            raise ValueError("elastic mode needs beta > 0")
        return normalize_wentzell(beta, 1.0, 0.0, side)

    @staticmethod
    def sticky(gamma: float, side: Side = Side.AT_ZERO) -> "BoundaryModel":
        if gamma <= 0:
            raise ValueError("sticky mode needs gamma > 0")
        return normalize_wentzell(0.0, 1.0, gamma, side)

    @staticmethod
    def general(beta: float, gamma: float, side: Side = Side.AT_ZERO) -> "BoundaryModel":
        if beta <= 0 or gamma <= 0:
            raise ValueError("general mode needs beta > 0 and gamma > 0")
        return normalize_wentzell(beta, 1.0, gamma, side)

    @staticmethod
    def trap_kill(beta: float, side: Side = Side.AT_ZERO) -> "BoundaryModel":
        if beta <= 0:
            raise ValueError("trap-and-kill mode needs beta > 0")
        return normalize_wentzell(beta, 0.0, 1.0, side)

    # -- serialization used by the config grammar ---------------------

    def to_config(self) -> dict[str, float | str]:
        a0, b0, c0 = self.to_wentzell()
        return {"mode": self.mode.value, "a0": a0, "b0": b0, "c0": c0}

    @staticmethod
    def from_config(entries: dict) -> "BoundaryModel":
        """Rebuild from either (a0,b0,c0) keys or mode/beta/gamma keys."""
        side = Side(entries.get("side", "zero"))
        if "a0" in entries or "b0" in entries or "c0" in entries:
            return normalize_wentzell(
                float(entries.get("a0", 0.0)),
                float(entries.get("b0", 0.0)),
                float(entries.get("c0", 0.0)),
                side,
            )
        mode = Mode(entries["mode"])
        beta = float(entries.get("beta", 0.0))
        gamma = float(entries.get("gamma", 0.0))
        if mode is Mode.REFLECTING:
            return BoundaryModel.reflecting(side)
        if mode is Mode.ABSORBING:
            return BoundaryModel.absorbing(side)
        if mode is Mode.ELASTIC:
            return BoundaryModel.elastic(beta, side)
        if mode is Mode.STICKY:
            return BoundaryModel.sticky(gamma, side)
        if mode is Mode.GENERAL:
            return BoundaryModel.general(beta, gamma, side)
        return BoundaryModel.trap_kill(beta, side)


def normalize_wentzell(
    a0: float, b0: float, c0: float, side: Side = Side.AT_ZERO
) -> BoundaryModel:
    """Rescale (a0,b0,c0) to sum one and classify the process mode.

    Raises AllZero when the sum vanishes and PureDirichlet for the
    excluded corner (1,0,0).  Coefficients below ZERO_TOL after rescaling
    are treated as absent.
    """
    if a0 < 0 or b0 < 0 or c0 < 0:
        raise ValueError("Wentzell weights must be nonnegative")
    total = a0 + b0 + c0
    if total <= 0:
        raise AllZero("a0 + b0 + c0 must be positive")
    a, b, c = a0 / total, b0 / total, c0 / total
    has_a = a > ZERO_TOL
    has_b = b > ZERO_TOL
    has_c = c > ZERO_TOL
    triple = WentzellTriple(a, b, c, side)

    if has_a and not has_b and not has_c:
        raise PureDirichlet("(1,0,0) admits no normal process at this boundary")
    if has_b and not has_a and not has_c:
        return BoundaryModel(triple, Mode.REFLECTING)
    if has_c and not has_a and not has_b:
        return BoundaryModel(triple, Mode.ABSORBING)
    if has_a and has_b and not has_c:
        return BoundaryModel(triple, Mode.ELASTIC, beta=a / b)
    if has_b and has_c and not has_a:
        return BoundaryModel(triple, Mode.STICKY, gamma=c / b)
    if has_a and has_c and not has_b:
        return BoundaryModel(triple, Mode.TRAP_KILL, beta=a / c)
    return BoundaryModel(triple, Mode.GENERAL, beta=a / b, gamma=c / b)


def wentzell_residual(model: BoundaryModel, f0: float, df0: float, ddf0: float) -> float:
    """Evaluate the boundary form on (f, f', f'') data at the endpoint.

    For a boundary at 0 this is a0*f0 - b0*df0 + (c0/2)*ddf0; at the right
    endpoint the derivative term flips sign.  A function in the generator
    domain returns 0.
    """
    a, b, c = model.to_wentzell()
    sign = -1.0 if model.side is Side.AT_ZERO else 1.0
    return a * f0 + sign * b * df0 + 0.5 * c * ddf0
