"""Reproduce the shipped preset calibration.

* cosine model: the default truth seed is the one in ``0..24`` whose 20%
  quantile is closest to -2.15;
* pendulum: reports the LQR reference gain, where it sits in the gain box,
  the safe fraction of the default grid and the outputs at the start point.

    python3 scripts/calibrate_presets.py
"""

import numpy as np

from fbuq.plants import EXAMPLE1_SEED, FURUTA_INITIAL, FurutaParams, example1_model, example1_plant, furuta_plant
from fbuq.plants.furuta import furuta_reward_constraints, furuta_rollout, lqr_gain

TARGET = -2.15


def main():
    model = example1_model()
    q = {s: float(np.quantile(example1_plant(s, model).values[0], 0.2)) for s in range(25)}
    best = min(q, key=lambda s: abs(q[s] - TARGET))
    print(f"cosine model: closest seed {best} (q20={q[best]:.3f}); shipped seed {EXAMPLE1_SEED}")

    p = FurutaParams()
    K = lqr_gain(p)
    print(f"pendulum: LQR gain {np.round(K, 3).tolist()}, box position {np.round(p.parameter_for(K[0], K[1]), 3).tolist()}")
    plant = furuta_plant(p)
    table = plant.truth_table()
    safe = (table[1] >= 0) & (table[2] >= 0)
    print(f"pendulum: safe fraction {safe.mean():.3f} on {plant.grid.size} points, "
          f"best safe h0 {table[0, safe].max():.3f}")
    h0 = furuta_reward_constraints(furuta_rollout(p, FURUTA_INITIAL))
    near = plant.grid.nearest_index(FURUTA_INITIAL)
    print(f"pendulum: outputs at {FURUTA_INITIAL}: {np.round(h0, 3).tolist()}; "
          f"nearest grid point {plant.grid.points[near].tolist()}: {np.round(table[:, near], 3).tolist()}")


if __name__ == "__main__":
    main()
