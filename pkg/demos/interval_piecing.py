"""A process on [0,1] pieced from half-line copies glued at the endpoints.

Builds one pieced path (elastic at 0, reflecting at 1), prints its
segment record, then runs a small gambler's-ruin experiment: started
from the midpoint with symmetric dynamics, the first boundary visited
should split 50/50.
"""

import numpy as np

from fellerbm.engine import TimeGrid
from fellerbm.interval import build_interval_path, stopped_at_boundary
from fellerbm.model import BoundaryModel, Side

MODEL0 = BoundaryModel.elastic(beta=1.0)
MODEL1 = BoundaryModel.reflecting(side=Side.AT_ONE)


def main():
    grid = TimeGrid(t_max=1.0, n_steps=10_000)
    record = build_interval_path(0.5, MODEL0, MODEL1, grid, seed=3)
    print("one pieced path from x = 0.5:")
    for kind, c in zip(record.segment_kinds, record.crossovers):
        print(f"  {kind.value:<8} enters at t = {c:.4f}")
    if record.path.lifetime is not None:
        print(f"  dies at t = {record.path.lifetime:.4f}")
    print(f"  value range [{record.path.values.min():.4f}, "
          f"{record.path.values.max():.4f}]")
    print()

    n = 2_000
    exit_grid = TimeGrid(t_max=4.0, n_steps=8_000)
    refl0 = BoundaryModel.reflecting()
    hit_one = 0
    valid = 0
    for seed in range(n):
        rec = build_interval_path(0.5, refl0, MODEL1, exit_grid, seed=seed)
        if len(rec.segment_kinds) < 2:
            continue  # never reached a boundary in the window
        stopped = stopped_at_boundary(rec)
        valid += 1
        hit_one += int(stopped.values[-1] >= 0.5)
    frac = hit_one / valid
    se = np.sqrt(0.25 / valid)
    print(f"gambler's ruin from the midpoint over {valid} paths:")
    print(f"  P(first visit is to 1) = {frac:.4f}  (target 0.5, stderr {se:.4f})")


if __name__ == "__main__":
    main()
