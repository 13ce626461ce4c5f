"""Classic versus wait-and-judge tubes on the cosine model.

Writes ``tube_classic.csv``, ``tube_wait_and_judge.csv``, the first scenarios
of each batch and both certificates to ``--out``, and prints the widths.

    python3 scripts/example1_tubes.py --out runs/example1 --seed 0
"""

import argparse
from pathlib import Path

import numpy as np

from fbuq import io as fio
from fbuq.certificates import kappa_at
from fbuq.plants import example1_model
from fbuq.sampler import SCENARIOS, Dataset, Stream
from fbuq.tubes import classic_tubes, wait_and_judge_tubes


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs/example1")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--nu", type=float, default=0.1)
    ap.add_argument("--kappa", type=float, default=1e-3)
    ap.add_argument("--a", type=float, default=0.5305305305305306, help="observed parameter")
    ap.add_argument("--y", type=float, default=-0.8, help="observed value")
    args = ap.parse_args()

    model = example1_model()
    grid = model.grid
    data = Dataset([grid.nearest_index([args.a])], [[args.y]])
    kt = kappa_at(args.kappa, 1)
    stream = Stream(args.seed).child(SCENARIOS, 1)
    out = Path(args.out)
    for name, build in (("classic", classic_tubes), ("wait_and_judge", wait_and_judge_tubes)):
        tube = build(model, data, args.nu, kt, stream)
        fio.write_csv(out / f"tube_{name}.csv", fio.tube_header(1), fio.tube_rows(tube, grid))
        fio.write_csv(out / f"scenarios_{name}.csv", fio.scenario_header(1), fio.scenario_rows(tube.batch, grid, 50))
        fio.write_json(out / f"certificate_{name}.json", tube.certificate.to_dict())
        c = tube.certificate
        print(f"{name:>15}: m={c.m:6d} s={c.s:4d} tau={c.tau:.4f} mean width={np.mean(tube.width):.3f}")
    fio.write_csv(out / "dataset.csv", fio.dataset_header(1), fio.dataset_rows(data, grid))


if __name__ == "__main__":
    main()
