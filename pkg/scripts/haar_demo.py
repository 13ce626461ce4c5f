"""Wait-and-judge tubes for a heavy-tailed Haar-wavelet model.

Builds one tube after a single observation at a = 0.1 and one after fifteen
equidistant observations, and writes both with the ground truth.

    python3 scripts/haar_demo.py --out runs/haar
"""

import argparse
from pathlib import Path

import numpy as np

from fbuq import io as fio
from fbuq.certificates import kappa_at
from fbuq.plants import haar_plant
from fbuq.sampler import SCENARIOS, TESTS, Dataset, Stream
from fbuq.tubes import wait_and_judge_tubes


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/haar")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--span", type=float, nargs=2, default=(0.0, 1.0), help="interval of the 15 observations")
    args = ap.parse_args()

    plant = haar_plant()
    model = plant.model
    grid = model.grid
    out = Path(args.out)
    fio.write_csv(out / "truth.csv", ["grid_index", "a0", "h"],
                  ([k, grid.points[k, 0], plant.values[0, k]] for k in range(grid.size)))
    layouts = {"one": [0.1], "fifteen": np.linspace(*args.span, 15)}
    for name, pts in layouts.items():
        idx = [grid.nearest_index([a]) for a in pts]
        y = [plant.query(i, Stream(args.seed).child(TESTS, k)) for k, i in enumerate(idx)]
        data = Dataset(idx, y)
        tube = wait_and_judge_tubes(model, data, 0.1, kappa_at(1e-3, 1), Stream(args.seed).child(SCENARIOS, 1),
                                    keep_batch=False)
        fio.write_csv(out / f"tube_{name}.csv", fio.tube_header(1), fio.tube_rows(tube, grid))
        fio.write_csv(out / f"dataset_{name}.csv", fio.dataset_header(1), fio.dataset_rows(data, grid))
        w = tube.width[0]
        c = tube.certificate
        print(f"{name:>8}: m={c.m} s={c.s} tau={c.tau:.4f} width at data {w[idx].mean():.3f} "
              f"median width {np.median(w):.3f} contains truth {bool(tube.contains(plant.values))}")


if __name__ == "__main__":
    main()
