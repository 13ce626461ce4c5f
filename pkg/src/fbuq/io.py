"""Run artifacts: atomic CSV / JSON writers and the output-file schemas.

Every CSV starts with a header row; the column sets below are stable and
:func:`check_file` validates any emitted file against them.
"""

from __future__ import annotations

import csv
import io
import json
import os
import platform
import tempfile
from pathlib import Path

import numpy as np

from .certificates import Certificate
from .domain import DomainGrid
from .sampler import Dataset, ScenarioBatch
from .tubes import Tube

__all__ = [
    "OUTPUT_DIR_ENV",
    "write_text_atomic",
    "write_json",
    "write_csv",
    "read_csv",
    "dataset_rows",
    "read_dataset",
    "tube_rows",
    "scenario_rows",
    "history_rows",
    "trajectory_rows",
    "versions",
    "check_file",
    "SchemaError",
]

OUTPUT_DIR_ENV = "FBUQ_OUTPUT_DIR"


class SchemaError(ValueError):
    pass


def _coord_names(ndim: int) -> list[str]:
    return [f"a{k}" for k in range(ndim)]


def write_text_atomic(path, text: str) -> Path:
    """Write ``text`` to a temp file next to ``path`` and rename over it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _jsonable(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Certificate):
        return obj.to_dict()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path, obj) -> Path:
    return write_text_atomic(path, json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def write_csv(path, header: list[str], rows) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return write_text_atomic(path, buf.getvalue())


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file")
    return rows[0], rows[1:]


# -- row builders -----------------------------------------------------------

def dataset_header(ndim: int) -> list[str]:
    return ["t", "i", *_coord_names(ndim), "y"]


def dataset_rows(data: Dataset, grid: DomainGrid):
    """One row per observation ``(t, i)``; ``t`` counts from 1."""
    for k, idx in enumerate(data.indices):
        for i in range(data.num_outputs):
            yield [k + 1, i, *grid.points[idx], float(data.observations[k, i])]


def read_dataset(path, grid: DomainGrid, num_outputs: int) -> Dataset:
    header, rows = read_csv(path)
    coords = _coord_names(grid.ndim)
    if header != dataset_header(grid.ndim):
        raise SchemaError(f"{path}: expected columns {dataset_header(grid.ndim)}")
    table: dict[int, dict] = {}
    for row in rows:
        t, i = int(row[0]), int(row[1])
        a = [float(x) for x in row[2:2 + len(coords)]]
        entry = table.setdefault(t, {"a": a, "y": {}})
        if not np.allclose(entry["a"], a):
            raise SchemaError(f"{path}: observation {t} lists two parameters")
        entry["y"][i] = float(row[-1])
    data = Dataset.empty(num_outputs)
    for t in sorted(table):
        entry = table[t]
        if sorted(entry["y"]) != list(range(num_outputs)):
            raise SchemaError(f"{path}: observation {t} is missing outputs")
        data = data.append(grid.index_of(entry["a"]), [entry["y"][i] for i in range(num_outputs)])
    return data


def tube_header(ndim: int) -> list[str]:
    return ["i", "grid_index", *_coord_names(ndim), "lower", "upper"]


def tube_rows(tube: Tube, grid: DomainGrid):
    for i in range(tube.lower.shape[0]):
        for n in range(grid.size):
            yield [i, n, *grid.points[n], float(tube.lower[i, n]), float(tube.upper[i, n])]


def scenario_header(ndim: int) -> list[str]:
    return ["j", "i", "grid_index", *_coord_names(ndim), "value"]


def scenario_rows(batch: ScenarioBatch, grid: DomainGrid, limit: int = 50):
    for j in range(min(limit, batch.m)):
        for i in range(batch.values.shape[1]):
            for n in range(grid.size):
                yield [j, i, n, *grid.points[n], float(batch.values[j, i, n])]


def history_header(ndim: int, num_outputs: int) -> list[str]:
    return ["t", *_coord_names(ndim), *[f"y{i}" for i in range(num_outputs)],
            "m", "s", "tau", "n_safe", "n_max", "n_exp", "safe", "best_y0"]


def history_rows(history, grid: DomainGrid):
    """History table; ``best_y0`` is the running maximum of the observed reward."""
    best = -np.inf
    for row in history:
        best = max(best, float(row.y[0]))
        c = row.certificate
        yield [row.t, *grid.points[row.index], *[float(v) for v in row.y],
               c.m if c else None, c.s if c else None, c.tau if c else None,
               row.n_safe, row.n_max, row.n_exp, row.truly_safe, best]


TRAJECTORY_HEADER = ["t_e", "theta", "alpha", "theta_dot", "alpha_dot", "u"]


def trajectory_rows(traj):
    for k in range(traj.states.shape[0]):
        yield [k + 1, *[float(v) for v in traj.states[k]], float(traj.inputs[k])]


def versions() -> dict:
    import scipy

    from . import __version__

    return {"fbuq": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


# -- schema checks ----------------------------------------------------------

def _fixed(kind: str):
    # (leading columns, trailing columns) around the coordinate block
    return {
        "dataset": (["t", "i"], ["y"]),
        "tube": (["i", "grid_index"], ["lower", "upper"]),
        "scenarios": (["j", "i", "grid_index"], ["value"]),
        "trajectory": (TRAJECTORY_HEADER, []),
    }[kind]


def _detect(header: list[str]) -> str:
    if header == TRAJECTORY_HEADER:
        return "trajectory"
    if header[:1] == ["t"] and "best_y0" in header:
        return "history"
    if header[:2] == ["t", "i"]:
        return "dataset"
    if header[:2] == ["i", "grid_index"]:
        return "tube"
    if header[:1] == ["j"]:
        return "scenarios"
    raise SchemaError(f"unrecognized header {header}")


def _coords_ok(cols: list[str]) -> bool:
    return len(cols) >= 1 and cols == _coord_names(len(cols))


def check_file(path) -> str:
    """Validate an emitted CSV or JSON file; returns the detected kind.

    Raises :class:`SchemaError` on a malformed file.
    """
    path = Path(path)
    if path.suffix == ".json":
        try:
            json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc})") from exc
        return "json"
    header, rows = read_csv(path)
    kind = _detect(header)
    if kind == "history":
        coords = [c for c in header[1:] if c.startswith("a")]
        ys = [c for c in header if c.startswith("y")]
        if not _coords_ok(coords) or header != history_header(len(coords), len(ys)):
            raise SchemaError(f"{path}: malformed history header")
        numeric = [0, *range(1, 1 + len(coords) + len(ys)), len(header) - 1]
    else:
        lead, trail = _fixed(kind)
        coords = header[len(lead):len(header) - len(trail)]
        if kind != "trajectory" and (not _coords_ok(coords) or header[:len(lead)] != lead
                                     or header[len(header) - len(trail):] != trail):
            raise SchemaError(f"{path}: malformed {kind} header")
        numeric = list(range(len(header)))
    for n, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise SchemaError(f"{path}:{n}: expected {len(header)} fields, got {len(row)}")
        for k in numeric:
            try:
                float(row[k])
            except ValueError as exc:
                raise SchemaError(f"{path}:{n}: column {header[k]!r} is not numeric") from exc
    if kind == "tube":
        lo, hi = header.index("lower"), header.index("upper")
        if any(float(r[lo]) > float(r[hi]) for r in rows):
            raise SchemaError(f"{path}: lower bound above upper bound")
    return kind
