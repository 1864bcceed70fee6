"""Closed-form transition measures: density mass, boundary atoms, death mass.

Evaluates p_t(x, .) at t = 1 from two starting points for each mode and
shows how the unit of probability splits between the interior, the
boundary atom at 0, and the cemetery.
"""

from fellerbm.kernels import transition_measure
from fellerbm.model import BoundaryModel

MODELS = [
    BoundaryModel.reflecting(),
    BoundaryModel.elastic(beta=1.0),
    BoundaryModel.sticky(gamma=1.0),
    BoundaryModel.general(beta=1.0, gamma=1.0),
    BoundaryModel.trap_kill(beta=1.0),
    BoundaryModel.absorbing(),
]


def main():
    t = 1.0
    print(f"transition measures at t = {t}")
    print(f"{'mode':<12} {'x':>4} {'interior':>9} {'atom@0':>8} {'dead':>7} {'total':>7}")
    for model in MODELS:
        for x in (0.0, 0.5):
            kwargs = {"absorbing": "stop"} if model.mode.value == "absorbing" else {}
            mu = transition_measure(model, t, x, **kwargs)
            interior = mu.interior_mass()
            atom = mu.atoms.get(0.0, 0.0)
            total = interior + atom
            print(f"{model.mode.value:<12} {x:>4.1f} {interior:>9.4f} "
                  f"{atom:>8.4f} {1 - total:>7.4f} {total:>7.4f}")
    print()
    print("conservative modes (reflecting, sticky, stopped-absorbing) keep")
    print("total mass 1; elastic/general/trap leak mass to the cemetery.")
    print()
    print("sticky atom at the origin as stickiness grows (t = 1, x = 0):")
    for gamma in (0.1, 0.5, 1.0, 2.0, 5.0):
        mu = transition_measure(BoundaryModel.sticky(gamma), t, 0.0)
        print(f"  gamma = {gamma:>4.1f}   atom = {mu.atoms[0.0]:.4f}")


if __name__ == "__main__":
    main()
