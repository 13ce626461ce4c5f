"""Safe gain tuning on the simulated pendulum.

Runs the safe BO loop on the default preset and stores the history, the
final tubes and the trajectories of the initial and recommended gains.

    python3 scripts/furuta_tuning.py --seed 0 --horizon 20
"""

import argparse
import json
from pathlib import Path

from fbuq import io as fio
from fbuq.plants import FURUTA_INITIAL, FURUTA_PRESETS, furuta_model, furuta_plant
from fbuq.safebo import SafeBOConfig, run_safe_bo
from fbuq.sampler import Stream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--horizon", type=int, default=20)
    ap.add_argument("--preset", choices=sorted(FURUTA_PRESETS), default="default")
    ap.add_argument("--out", default="runs/furuta")
    args = ap.parse_args()

    preset = FURUTA_PRESETS[args.preset]
    plant = furuta_plant(preset["params"], points_per_axis=preset["points_per_axis"])
    model = furuta_model(plant, preset["lengthscale"], preset["variance"])
    start = model.grid.nearest_index(FURUTA_INITIAL)
    cfg = SafeBOConfig({1: 0.0, 2: 0.0}, (start,), horizon=args.horizon)

    def progress(state):
        row = state.history[-1]
        print(f"t={state.t:2d} a={model.grid.points[row.index].round(3).tolist()} y0={row.y[0]:.3f} "
              f"|S|={row.n_safe} safe={row.truly_safe}", flush=True)

    state = run_safe_bo(model, plant, cfg, Stream(args.seed), callback=progress)
    out = Path(args.out)
    grid = model.grid
    fio.write_csv(out / "history.csv", fio.history_header(2, 3), fio.history_rows(state.history, grid))
    fio.write_csv(out / "tube_final.csv", fio.tube_header(2), fio.tube_rows(state.tube, grid))
    for name, idx in (("initial", start), ("recommended", state.recommendation)):
        fio.write_csv(out / f"trajectory_{name}.csv", fio.TRAJECTORY_HEADER, fio.trajectory_rows(plant.rollout(idx)))
    rec = state.recommendation
    print(json.dumps({"recommendation": grid.points[rec].tolist(), "true_outputs": plant.truth(rec).tolist(),
                      "initial_outputs": plant.truth(start).tolist()}))


if __name__ == "__main__":
    main()
