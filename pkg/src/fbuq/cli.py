"""Command-line front end.

Subcommands::

    fbuq bounds classic|wj|wj-size|scalar ...   certificate numerics
    fbuq tube --config run.json                 tube CSV + certificate JSON
    fbuq scalar --config run.json               scalar-functional bound JSON
    fbuq safebo --config run.json               safe BO campaign artifacts
    fbuq furuta-rollout --a A1 A2               pendulum trajectory CSV
    fbuq schema-check FILE...                   validate emitted files

A run is configured by one JSON document (see ``CONFIG_SCHEMA``); flags such
as ``--seed`` or ``--method`` override its keys.  Outputs go to ``--out``,
else the config's ``output_dir``, else ``$FBUQ_OUTPUT_DIR``, else
``./fbuq_runs``.  Each run directory receives ``config.json`` (the resolved
configuration) and ``run.json`` (command, seed, package versions).

Exit codes: 0 ok, 2 configuration or argument error, 3 numerical failure,
4 plant failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import math
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import io as fio
from .certificates import (
    TRIALS_AS_WRITTEN,
    TRIALS_JOINT,
    classic_sample_size,
    kappa_at,
    scalar_sample_size,
    wj_sample_size_for,
    wj_solve_tau,
)
from .domain import BasisFamily, build_grid
from .functionals import Functional, check_functional, scalar_bound
from .plants import (
    FURUTA_INITIAL,
    FURUTA_PRESETS,
    example1_initial_index,
    example1_plant,
    furuta_plant,
    furuta_rollout,
    furuta_reward_constraints,
    haar_plant,
)
from .plants.furuta import FurutaParams
from .safebo import PlantError, SafeBOConfig, run_safe_bo
from .sampler import SCENARIOS, CoeffDistribution, Dataset, FunctionModel, NoiseDistribution, Stream
from .tubes import build_tube

log = logging.getLogger("fbuq")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_PLANT = 0, 2, 3, 4
DEFAULT_OUTPUT_DIR = "fbuq_runs"


class ConfigError(ValueError):
    pass


_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_PROB = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}

_BASIS = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["kernel_sections", "trigonometric", "haar"]},
        "size": {"type": ["integer", "null"], "minimum": 1},
        "kernel": {"enum": ["matern32"]},
        "lengthscale": _POS,
        "frequency_step": _NUM,
    },
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "preset": {"enum": ["example1", "haar", "furuta"]},
        "seed": {"type": "integer", "minimum": 0},
        "output_dir": {"type": "string"},
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["grid", "basis"],
            "properties": {
                "grid": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["bounds", "points_per_axis"],
                    "properties": {
                        "bounds": {"type": "array", "minItems": 1,
                                   "items": {"type": "array", "minItems": 2, "maxItems": 2, "items": _NUM}},
                        "points_per_axis": {"type": "array", "minItems": 1,
                                            "items": {"type": "integer", "minimum": 1}},
                    },
                },
                "basis": {"oneOf": [_BASIS, {"type": "array", "minItems": 1, "items": _BASIS}]},
                "prior": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"enum": ["gaussian", "student_t", "uniform"]},
                        "mean": _NUM, "variance": _POS, "dof": _POS, "scale": _POS, "lo": _NUM, "hi": _NUM,
                    },
                },
                "noise": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"enum": ["uniform", "gaussian", "none"]},
                        "delta": _POS, "variance": {"type": "number", "minimum": 0},
                    },
                },
                "num_outputs": {"type": "integer", "minimum": 1},
            },
        },
        "data": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "path": {"type": "string"},
                "points": {"type": "array", "items": {"type": "array", "items": _NUM}},
                "y": {"type": "array", "items": {"type": "array", "items": _NUM}},
            },
        },
        "nu": _PROB,
        "kappa": _PROB,
        "kappa_t": _PROB,
        "t": {"type": "integer", "minimum": 1},
        "method": {"enum": ["classic", "wait_and_judge"]},
        "tube_options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "increase": {"enum": ["jump", "unit"]},
                "reuse": {"type": "boolean"},
                "init": {"enum": ["jump", "one"]},
                "trials": {"enum": [TRIALS_AS_WRITTEN, TRIALS_JOINT]},
                "ridge": {"type": ["number", "null"], "minimum": 0},
            },
        },
        "scenarios_sample": {"type": "integer", "minimum": 0},
        "functional": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["lipschitz", "supremum", "infimum", "integral", "rkhs_norm"]},
                "orientation": {"enum": ["upper", "lower"]},
            },
        },
        "output": {"type": "integer", "minimum": 0},
        "discards": {"type": "integer", "minimum": 0},
        "plant": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "seed": {"type": "integer", "minimum": 0},
                "furuta_preset": {"enum": sorted(FURUTA_PRESETS)},
            },
        },
        "horizon": {"type": "integer", "minimum": 0},
        "thresholds": {"type": "object", "additionalProperties": _NUM,
                       "propertyNames": {"pattern": "^[0-9]+$"}},
        "threshold_quantile": _PROB,
        "initial_safe": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _NUM}},
        "write_tubes": {"type": "boolean"},
        "distance": {"type": "string"},
    },
}


# -- configuration ----------------------------------------------------------

def load_config(path: str | None) -> tuple[dict, Path]:
    if path is None:
        return {}, Path.cwd()
    p = Path(path)
    try:
        cfg = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    validate_config(cfg)
    return cfg, p.resolve().parent


def validate_config(cfg: dict):
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(k) for k in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from exc


def _apply_overrides(cfg: dict, args, keys) -> dict:
    cfg = copy.deepcopy(cfg)
    for key in keys:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    validate_config(cfg)
    return cfg


def _preset_model_spec(preset: str, cfg: dict) -> dict:
    if preset == "example1":
        return {"grid": {"bounds": [[0.0, 1.0]], "points_per_axis": [1000]},
                "basis": {"kind": "trigonometric", "size": 101},
                "prior": {"kind": "gaussian", "mean": 0.0, "variance": 0.1},
                "noise": {"kind": "uniform", "delta": 0.1}, "num_outputs": 1}
    if preset == "haar":
        return {"grid": {"bounds": [[0.0, 1.0]], "points_per_axis": [1000]},
                "basis": {"kind": "haar"},
                "prior": {"kind": "student_t", "dof": 10.0, "scale": 1e-2},
                "noise": {"kind": "gaussian", "variance": 1e-2}, "num_outputs": 1}
    fp = FURUTA_PRESETS[cfg.get("plant", {}).get("furuta_preset", "default")]
    n = fp["points_per_axis"]
    return {"grid": {"bounds": [[0.0, 1.0], [0.0, 1.0]], "points_per_axis": [n, n]},
            "basis": {"kind": "kernel_sections", "lengthscale": fp["lengthscale"]},
            "prior": {"kind": "gaussian", "mean": 0.0, "variance": fp["variance"]},
            "noise": {"kind": "uniform", "delta": 0.05}, "num_outputs": 3}


def resolve_model_spec(cfg: dict) -> dict:
    if "model" in cfg:
        return cfg["model"]
    if "preset" in cfg:
        return _preset_model_spec(cfg["preset"], cfg)
    raise ConfigError("config needs a 'model' section or a 'preset'")


def build_model(spec: dict) -> FunctionModel:
    try:
        grid = build_grid(spec["grid"]["bounds"], spec["grid"]["points_per_axis"])
        bases = spec["basis"] if isinstance(spec["basis"], list) else [spec["basis"]]
        fams = tuple(BasisFamily(**b) for b in bases)
        nout = spec.get("num_outputs", len(fams))
        basis = fams[0] if len(fams) == 1 else fams
        return FunctionModel(grid, basis, CoeffDistribution(**spec.get("prior", {})),
                             NoiseDistribution(**spec.get("noise", {})), nout)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid model: {exc}") from exc


def build_dataset(cfg: dict, model: FunctionModel, base: Path) -> Dataset:
    data = cfg.get("data", {})
    if "path" in data:
        path = Path(data["path"])
        path = path if path.is_absolute() else base / path
        try:
            return fio.read_dataset(path, model.grid, model.num_outputs)
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"cannot load dataset {path}: {exc}") from exc
    pts, ys = data.get("points", []), data.get("y", [])
    if len(pts) != len(ys):
        raise ConfigError("data.points and data.y must have equal length")
    out = Dataset.empty(model.num_outputs)
    for a, y in zip(pts, ys):
        if len(y) != model.num_outputs:
            raise ConfigError("each data.y row needs one value per output")
        try:
            out = out.append(model.grid.index_of(a), y)
        except KeyError as exc:
            raise ConfigError(f"data point {a} is not on the grid") from exc
    return out


def _kappa_t(cfg: dict) -> float:
    if "kappa_t" in cfg:
        return float(cfg["kappa_t"])
    return kappa_at(float(cfg.get("kappa", 1e-3)), int(cfg.get("t", 1)))


def _output_dir(args, cfg: dict, command: str) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    if "output_dir" in cfg:
        return Path(cfg["output_dir"])
    return Path(os.environ.get(fio.OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)) / command


def _write_run_info(out: Path, command: str, cfg: dict, extra: dict | None = None):
    fio.write_json(out / "config.json", cfg)
    info = {"command": command, "seed": cfg.get("seed", 0), "versions": fio.versions()}
    info.update(extra or {})
    fio.write_json(out / "run.json", info)


# -- subcommands ------------------------------------------------------------

def cmd_bounds(args) -> int:
    # --kappa-t wins; otherwise the per-iteration level is derived from --kappa and --t
    kt = args.kappa_t
    if kt is None and args.kappa is not None:
        kt = kappa_at(args.kappa, args.t)
    if args.kind == "classic":
        if args.dim is None or args.nu is None:
            raise ConfigError("bounds classic needs --dim and --nu")
        kt = kappa_at(1e-3, args.t) if kt is None else kt
        m = classic_sample_size(args.dim, args.nu, kt, args.outputs, args.trials)
        out = {"m": m, "dim": args.dim, "nu": args.nu, "kappa_t": kt, "outputs": args.outputs, "trials": args.trials}
    elif args.kind == "wj":
        if args.m is None or args.s is None or kt is None:
            raise ConfigError("bounds wj needs --m, --s and --kappa or --kappa-t")
        out = {"tau": wj_solve_tau(args.m, args.s, kt), "m": args.m, "s": args.s, "kappa_t": kt}
    elif args.kind == "wj-size":
        if args.s is None or args.nu is None or kt is None:
            raise ConfigError("bounds wj-size needs --s, --nu and --kappa or --kappa-t")
        m = wj_sample_size_for(args.s, args.nu, kt)
        out = {"m": m, "s": args.s, "nu": args.nu, "kappa_t": kt, "tau": wj_solve_tau(m, args.s, kt)}
    else:
        if args.nu is None or kt is None:
            raise ConfigError("bounds scalar needs --nu and --kappa or --kappa-t")
        m, p = scalar_sample_size(args.nu, kt, args.discards)
        out = {"m": m, "p": p, "nu": args.nu, "kappa_t": kt, "discards": args.discards}
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK


def _tube_setup(args, keys):
    cfg, base = load_config(args.config)
    cfg = _apply_overrides(cfg, args, keys)
    spec = resolve_model_spec(cfg)
    cfg.setdefault("model", spec)
    model = build_model(spec)
    data = build_dataset(cfg, model, base)
    return cfg, model, data


def cmd_tube(args) -> int:
    cfg, model, data = _tube_setup(args, ("seed", "method", "nu", "kappa", "t"))
    for key, val in (("seed", 0), ("nu", 0.1), ("kappa", 1e-3), ("t", 1), ("method", "wait_and_judge"),
                     ("scenarios_sample", 50)):
        cfg.setdefault(key, val)
    opts = dict(cfg.get("tube_options", {}))
    kt = _kappa_t(cfg)
    stream = Stream(cfg["seed"]).child(SCENARIOS, cfg["t"])
    tube = build_tube(cfg["method"], model, data, cfg["nu"], kt, stream, t=cfg["t"], **opts)
    out = _output_dir(args, cfg, "tube")
    grid = model.grid
    fio.write_csv(out / "tube.csv", fio.tube_header(grid.ndim), fio.tube_rows(tube, grid))
    fio.write_json(out / "certificate.json", tube.certificate.to_dict())
    fio.write_csv(out / "scenarios.csv", fio.scenario_header(grid.ndim),
                  fio.scenario_rows(tube.batch, grid, cfg["scenarios_sample"]))
    fio.write_csv(out / "dataset.csv", fio.dataset_header(grid.ndim), fio.dataset_rows(data, grid))
    _write_run_info(out, "tube", cfg)
    print(json.dumps(tube.certificate.to_dict(), sort_keys=True))
    return EXIT_OK


def cmd_scalar(args) -> int:
    cfg, model, data = _tube_setup(args, ("seed", "nu", "kappa", "t"))
    if "functional" not in cfg:
        raise ConfigError("scalar needs a 'functional' section")
    for key, val in (("seed", 0), ("nu", 0.1), ("kappa", 1e-3), ("t", 1), ("discards", 0), ("output", 0)):
        cfg.setdefault(key, val)
    functional = Functional(cfg["functional"]["kind"], cfg["functional"].get("orientation", "upper"))
    if not 0 <= cfg["output"] < model.num_outputs:
        raise ConfigError("output index out of range")
    try:
        check_functional(model, functional, cfg["output"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    kt = _kappa_t(cfg)
    stream = Stream(cfg["seed"]).child(SCENARIOS, cfg["t"])
    res = scalar_bound(model, data, functional, cfg["nu"], kt, cfg["discards"], stream, cfg["output"])
    if not math.isfinite(res.bound):
        raise FloatingPointError("scalar bound is not finite")
    payload = {**res.to_dict(), "seed": cfg["seed"]}
    out = _output_dir(args, cfg, "scalar")
    fio.write_json(out / "bound.json", payload)
    _write_run_info(out, "scalar", cfg)
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def _build_plant(cfg: dict, model: FunctionModel):
    preset = cfg.get("preset")
    pseed = cfg.get("plant", {}).get("seed")
    if preset == "example1":
        truth_model = build_model(_preset_model_spec("example1", cfg))
        return example1_plant(*(() if pseed is None else (pseed,)), model=truth_model)
    if preset == "haar":
        truth_model = build_model(_preset_model_spec("haar", cfg))
        return haar_plant(*(() if pseed is None else (pseed,)), model=truth_model)
    if preset == "furuta":
        fp = FURUTA_PRESETS[cfg.get("plant", {}).get("furuta_preset", "default")]
        return furuta_plant(fp["params"], model.noise, fp["points_per_axis"])
    raise ConfigError("safebo needs preset example1, haar or furuta")


def _resolve_safebo(cfg: dict, model: FunctionModel, plant) -> tuple[dict, tuple]:
    grid = model.grid
    if getattr(plant, "grid", grid).size != grid.size and cfg.get("preset") == "furuta":
        raise ConfigError("furuta model grid must match the plant grid")
    if cfg.get("preset") in ("example1", "haar") and plant.model.grid.size != grid.size:
        raise ConfigError("model grid must match the plant grid")
    if "thresholds" in cfg:
        thr = {int(k): float(v) for k, v in cfg["thresholds"].items()}
    elif cfg.get("preset") == "furuta":
        thr = {1: 0.0, 2: 0.0}
    else:
        q = cfg.get("threshold_quantile", 0.2)
        thr = {0: float(np.quantile(plant.values[0], q))}
    if "initial_safe" in cfg:
        try:
            init = tuple(grid.index_of(a) for a in cfg["initial_safe"])
        except KeyError as exc:
            raise ConfigError("initial_safe points must be grid points") from exc
    elif cfg.get("preset") == "furuta":
        init = (grid.nearest_index(FURUTA_INITIAL),)
    else:
        margin = 0.5 if cfg.get("preset") == "example1" else 0.3
        init = (example1_initial_index(plant, thr[0], margin=margin),)
    return thr, init


def cmd_safebo(args) -> int:
    cfg, base = load_config(args.config)
    cfg = _apply_overrides(cfg, args, ("seed", "method", "nu", "kappa", "horizon"))
    if getattr(args, "write_tubes", False):
        cfg["write_tubes"] = True
    spec = resolve_model_spec(cfg)
    cfg.setdefault("model", spec)
    model = build_model(spec)
    for key, val in (("seed", 0), ("nu", 0.1), ("kappa", 1e-3), ("method", "wait_and_judge"),
                     ("horizon", 30), ("write_tubes", False), ("distance", "euclidean")):
        cfg.setdefault(key, val)
    plant = _build_plant(cfg, model)
    thr, init = _resolve_safebo(cfg, model, plant)
    cfg["thresholds"] = {str(k): v for k, v in thr.items()}
    cfg["initial_safe"] = [model.grid.points[i].tolist() for i in init]
    try:
        config = SafeBOConfig(thr, init, cfg["horizon"], cfg["nu"], cfg["kappa"], cfg["method"],
                              dict(cfg.get("tube_options", {})), cfg["distance"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _output_dir(args, cfg, "safebo")
    grid = model.grid

    def per_iteration(state):
        if cfg["write_tubes"]:
            fio.write_csv(out / "tubes" / f"tube_{state.t:03d}.csv", fio.tube_header(grid.ndim),
                          fio.tube_rows(state.tube, grid))

    def dump(state, status: str):
        fio.write_csv(out / "history.csv", fio.history_header(grid.ndim, model.num_outputs),
                      fio.history_rows(state.history, grid))
        fio.write_csv(out / "dataset.csv", fio.dataset_header(grid.ndim), fio.dataset_rows(state.dataset, grid))
        flags = [r.truly_safe for r in state.history]
        summary = {
            "status": status,
            "iterations": state.t,
            "evaluations": len(state.history),
            "stopped_early": state.stopped_early,
            "violations": None if any(f is None for f in flags) else int(sum(not f for f in flags)),
            "thresholds": cfg["thresholds"],
        }
        if state.recommendation is not None:
            r = state.recommendation
            summary["recommendation"] = {
                "grid_index": r,
                "a": grid.points[r].tolist(),
                "lower_reward": float(state.tube.lower[0, r]),
                "true_outputs": plant.truth(r).tolist() if hasattr(plant, "truth") else None,
            }
        fio.write_json(out / "recommendation.json", summary)
        _write_run_info(out, "safebo", cfg)
        return summary

    try:
        state = run_safe_bo(model, plant, config, Stream(cfg["seed"]), callback=per_iteration)
    except PlantError as exc:
        if exc.state is not None:
            dump(exc.state, f"plant failure: {exc}")
        raise
    summary = dump(state, "ok")
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def cmd_furuta_rollout(args) -> int:
    fp = FURUTA_PRESETS[args.preset]
    params: FurutaParams = fp["params"]
    try:
        traj = furuta_rollout(params, args.a)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    h = furuta_reward_constraints(traj)
    out = Path(args.out) if args.out else Path(os.environ.get(fio.OUTPUT_DIR_ENV, DEFAULT_OUTPUT_DIR)) / "furuta"
    fio.write_csv(out / "trajectory.csv", fio.TRAJECTORY_HEADER, fio.trajectory_rows(traj))
    payload = {"a": list(args.a), "gains": params.gains(args.a).tolist(), "h": h.tolist(),
               "saturated": traj.saturated, "preset": args.preset}
    fio.write_json(out / "rollout.json", payload)
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def cmd_schema_check(args) -> int:
    bad = 0
    for f in args.files:
        try:
            kind = fio.check_file(f)
            print(f"{f}: ok ({kind})")
        except (fio.SchemaError, OSError) as exc:
            print(f"{f}: {exc}", file=sys.stderr)
            bad += 1
    return EXIT_CONFIG if bad else EXIT_OK


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fbuq", description="Scenario-based uncertainty tubes and safe BO.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("bounds", help="sample sizes and certificate levels")
    b.add_argument("kind", choices=["classic", "wj", "wj-size", "scalar"])
    b.add_argument("--dim", type=int)
    b.add_argument("--nu", type=float)
    b.add_argument("--kappa", type=float)
    b.add_argument("--kappa-t", dest="kappa_t", type=float)
    b.add_argument("--t", type=int, default=1)
    b.add_argument("--outputs", type=int, default=1)
    b.add_argument("--trials", choices=[TRIALS_AS_WRITTEN, TRIALS_JOINT], default=TRIALS_AS_WRITTEN)
    b.add_argument("--m", type=int)
    b.add_argument("--s", type=int)
    b.add_argument("--discards", type=int, default=0)
    b.set_defaults(func=cmd_bounds)

    def run_parser(name, help_, func, method=True, horizon=False):
        q = sub.add_parser(name, help=help_)
        q.add_argument("--config", help="JSON run configuration")
        q.add_argument("--seed", type=int)
        q.add_argument("--nu", type=float)
        q.add_argument("--kappa", type=float)
        q.add_argument("--out", help="output directory")
        if method:
            q.add_argument("--method", choices=["classic", "wait_and_judge"])
        if horizon:
            q.add_argument("--horizon", type=int)
        else:
            q.add_argument("--t", type=int)
        q.set_defaults(func=func)
        return q

    run_parser("tube", "certified tube for a model and dataset", cmd_tube)
    run_parser("scalar", "bound on a scalar functional", cmd_scalar, method=False)
    sb = run_parser("safebo", "safe Bayesian optimization campaign", cmd_safebo, horizon=True)
    sb.add_argument("--write-tubes", action="store_true", help="write one tube CSV per iteration")

    f = sub.add_parser("furuta-rollout", help="simulate one gain parameter")
    f.add_argument("--a", type=float, nargs=2, required=True, metavar=("A1", "A2"))
    f.add_argument("--preset", choices=sorted(FURUTA_PRESETS), default="default")
    f.add_argument("--out")
    f.set_defaults(func=cmd_furuta_rollout)

    s = sub.add_parser("schema-check", help="validate emitted CSV / JSON files")
    s.add_argument("files", nargs="+")
    s.set_defaults(func=cmd_schema_check)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"fbuq: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PlantError as exc:
        print(f"fbuq: {exc}", file=sys.stderr)
        return EXIT_PLANT
    except (np.linalg.LinAlgError, FloatingPointError, OverflowError) as exc:
        print(f"fbuq: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # remaining precondition failures surface from argument values
        print(f"fbuq: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
