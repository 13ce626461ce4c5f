import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from fbuq import cli
from fbuq import io as fio
from fbuq.certificates import Certificate
from fbuq.domain import build_grid
from fbuq.sampler import Dataset

SMALL_MODEL = {
    "grid": {"bounds": [[0.0, 1.0]], "points_per_axis": [41]},
    "basis": {"kind": "trigonometric", "size": 12},
    "prior": {"kind": "gaussian", "mean": 0.0, "variance": 0.1},
    "noise": {"kind": "uniform", "delta": 0.1},
}


def write_cfg(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# -- bounds -----------------------------------------------------------------

def test_bounds_classic_golden(capsys):
    code, out, _ = run(["bounds", "classic", "--dim", "2000", "--nu", "0.1", "--kappa", "1e-3", "--t", "1"], capsys)
    assert code == 0 and json.loads(out)["m"] == 21403


def test_bounds_wj_hand_value(capsys):
    code, out, _ = run(["bounds", "wj", "--m", "2", "--s", "1", "--kappa-t", "0.1"], capsys)
    assert code == 0 and json.loads(out)["tau"] == pytest.approx(0.017241, abs=1e-6)


def test_bounds_classic_trivial(capsys):
    code, out, _ = run(["bounds", "classic", "--dim", "1", "--nu", "0.5", "--kappa-t", "0.5"], capsys)
    assert code == 0 and json.loads(out)["m"] == 1


def test_bounds_scalar_and_wj_size(capsys):
    code, out, _ = run(["bounds", "scalar", "--nu", "0.1", "--kappa-t", "6.0793e-4", "--discards", "1"], capsys)
    assert code == 0 and (json.loads(out)["m"], json.loads(out)["p"]) == (94, 93)
    code, out, _ = run(["bounds", "wj-size", "--s", "31", "--nu", "0.1", "--kappa-t", "6.0793e-4"], capsys)
    assert code == 0 and json.loads(out)["tau"] >= 0.9


def test_bounds_kappa_and_kappa_t_agree(capsys):
    from fbuq.certificates import kappa_at

    kt = repr(kappa_at(1e-3, 2))
    for kind, extra in (("wj", ["--m", "700", "--s", "31"]), ("scalar", ["--nu", "0.1"])):
        _, a, _ = run(["bounds", kind, *extra, "--kappa", "1e-3", "--t", "2"], capsys)
        _, b, _ = run(["bounds", kind, *extra, "--kappa-t", kt], capsys)
        assert a == b


@pytest.mark.parametrize("argv", [
    ["bounds", "classic", "--nu", "0.1"],
    ["bounds", "wj", "--m", "2"],
    ["bounds", "scalar", "--nu", "0.1"],
    ["bounds", "classic", "--dim", "10", "--nu", "1.5"],
    ["bounds", "nonsense"],
    ["bounds", "classic", "--dim", "x"],
    [],
])
def test_bad_arguments_exit_2(argv, capsys):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2
    assert capsys.readouterr().err


# -- tube / scalar ----------------------------------------------------------

def test_tube_outputs_and_determinism(tmp_path, capsys):
    cfg = {"model": SMALL_MODEL, "data": {"points": [[0.5]], "y": [[0.3]]}, "nu": 0.2, "kappa": 0.05, "seed": 3}
    path = write_cfg(tmp_path, cfg)
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["tube", "--config", path, "--out", str(a)]) == 0
    assert cli.main(["tube", "--config", path, "--out", str(b)]) == 0
    capsys.readouterr()
    names = ["tube.csv", "certificate.json", "scenarios.csv", "dataset.csv", "config.json", "run.json"]
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()
    cert = Certificate.from_dict(json.loads((a / "certificate.json").read_text()))
    assert cert.tau >= 0.8
    rows = list(csv.reader((a / "tube.csv").open(newline="")))
    assert rows[0] == fio.tube_header(1) and len(rows) == 1 + 41
    assert all(float(r[3]) <= float(r[4]) for r in rows[1:])
    resolved = json.loads((a / "config.json").read_text())
    assert resolved["seed"] == 3 and resolved["model"] == SMALL_MODEL
    assert cli.main(["schema-check"] + [str(a / n) for n in names]) == 0


def test_empty_dataset_gives_widest_tube(tmp_path, capsys):
    base = {"model": SMALL_MODEL, "nu": 0.2, "kappa": 0.05, "seed": 1}
    with_data = dict(base, data={"points": [[0.5]], "y": [[0.3]]})
    assert cli.main(["tube", "--config", write_cfg(tmp_path, base, "p.json"), "--out", str(tmp_path / "p")]) == 0
    assert cli.main(["tube", "--config", write_cfg(tmp_path, with_data, "d.json"), "--out", str(tmp_path / "d")]) == 0
    capsys.readouterr()

    def width(d):
        rows = list(csv.reader((tmp_path / d / "tube.csv").open(newline="")))[1:]
        return np.array([float(r[4]) - float(r[3]) for r in rows])

    assert width("p").mean() > width("d").mean()
    assert width("d")[20] < width("p")[20]


def test_dataset_file_roundtrip(tmp_path, capsys):
    grid = build_grid([[0, 1]], [41])
    data = Dataset([3, 20], [[0.1], [-0.4]])
    fio.write_csv(tmp_path / "obs.csv", fio.dataset_header(1), fio.dataset_rows(data, grid))
    back = fio.read_dataset(tmp_path / "obs.csv", grid, 1)
    np.testing.assert_array_equal(back.indices, data.indices)
    np.testing.assert_array_equal(back.observations, data.observations)
    cfg = {"model": SMALL_MODEL, "data": {"path": "obs.csv"}, "nu": 0.3, "kappa": 0.1}
    assert cli.main(["tube", "--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 0
    capsys.readouterr()


def test_seed_flag_overrides_config(tmp_path, capsys):
    cfg = {"model": SMALL_MODEL, "nu": 0.3, "kappa": 0.1, "seed": 1}
    path = write_cfg(tmp_path, cfg)
    cli.main(["tube", "--config", path, "--out", str(tmp_path / "x"), "--seed", "9"])
    capsys.readouterr()
    assert json.loads((tmp_path / "x" / "config.json").read_text())["seed"] == 9


def test_output_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(fio.OUTPUT_DIR_ENV, str(tmp_path / "env"))
    cfg = {"model": SMALL_MODEL, "nu": 0.3, "kappa": 0.1}
    assert cli.main(["tube", "--config", write_cfg(tmp_path, cfg)]) == 0
    capsys.readouterr()
    assert (tmp_path / "env" / "tube" / "tube.csv").exists()


@pytest.mark.parametrize("cfg", [
    {"model": SMALL_MODEL, "unknown_key": 1},
    {"model": SMALL_MODEL, "nu": 1.5},
    {"model": SMALL_MODEL, "data": {"points": [[0.512]], "y": [[0.0]]}},
    {"model": SMALL_MODEL, "data": {"points": [[0.5]], "y": []}},
    {"model": dict(SMALL_MODEL, basis={"kind": "spline"})},
    {"nu": 0.1},
])
def test_config_errors_exit_2(tmp_path, cfg, capsys):
    code, _, err = run(["tube", "--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")], capsys)
    assert code == 2 and err


def test_unreadable_config_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["tube", "--config", str(bad)], capsys)[0] == 2
    assert run(["tube", "--config", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_numerical_failure_exits_3(tmp_path, monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise np.linalg.LinAlgError("matrix is singular")

    monkeypatch.setattr(cli, "build_tube", boom)
    cfg = {"model": SMALL_MODEL, "nu": 0.3, "kappa": 0.1}
    assert run(["tube", "--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "o")], capsys)[0] == 3


def test_scalar_command(tmp_path, capsys):
    cfg = {"model": SMALL_MODEL, "data": {"points": [[0.5]], "y": [[0.3]]}, "nu": 0.5, "kappa_t": 0.5,
           "functional": {"kind": "supremum"}}
    code, out, _ = run(["scalar", "--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "s")], capsys)
    payload = json.loads(out)
    assert code == 0 and payload["m"] == 1 and payload["p"] == 1
    assert set(payload) >= {"functional", "m", "p", "bound", "nu", "kappa_t", "seed"}
    assert json.loads((tmp_path / "s" / "bound.json").read_text()) == payload
    lip = dict(cfg, functional={"kind": "lipschitz"}, nu=0.1, kappa=1e-3)
    lip.pop("kappa_t")
    code, out, _ = run(["scalar", "--config", write_cfg(tmp_path, lip, "l.json"), "--out", str(tmp_path / "l")], capsys)
    assert code == 0 and 0 < json.loads(out)["bound"] < np.inf


def test_scalar_rkhs_norm_with_trig_basis_rejected(tmp_path, capsys):
    cfg = {"model": SMALL_MODEL, "functional": {"kind": "rkhs_norm"}}
    assert run(["scalar", "--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "s")], capsys)[0] == 2


# -- safebo -----------------------------------------------------------------

SAFEBO_CFG = {"preset": "example1", "horizon": 3, "nu": 0.2, "kappa": 0.05, "seed": 1,
              "model": {**SMALL_MODEL, "grid": {"bounds": [[0.0, 1.0]], "points_per_axis": [1000]},
                        "basis": {"kind": "trigonometric", "size": 101}}}


def test_safebo_zero_horizon(tmp_path, capsys):
    cfg = dict(SAFEBO_CFG, horizon=0)
    code, out, _ = run(["safebo", "--config", write_cfg(tmp_path, cfg), "--out", str(tmp_path / "r")], capsys)
    assert code == 0
    rows = list(csv.reader((tmp_path / "r" / "history.csv").open(newline="")))
    assert len(rows) == 2 and rows[1][0] == "0"


def test_safebo_artifacts(tmp_path, capsys):
    out = tmp_path / "r"
    code, stdout, _ = run(["safebo", "--config", write_cfg(tmp_path, SAFEBO_CFG), "--out", str(out),
                           "--write-tubes"], capsys)
    assert code == 0
    summary = json.loads((out / "recommendation.json").read_text())
    assert summary["status"] == "ok" and summary["violations"] == 0
    hist = list(csv.DictReader((out / "history.csv").open(newline="")))
    best = [float(r["best_y0"]) for r in hist]
    assert best == sorted(best)
    tubes = sorted((out / "tubes").glob("tube_*.csv"))
    assert len(tubes) == 3
    files = [out / "history.csv", out / "dataset.csv", out / "recommendation.json", *tubes]
    assert cli.main(["schema-check", *map(str, files)]) == 0
    capsys.readouterr()


class _Broken:
    def __init__(self, inner):
        self.inner, self.calls = inner, 0

    def truth(self, idx):
        return self.inner.truth(idx)

    def query(self, idx, stream):
        self.calls += 1
        if self.calls > 2:
            raise IOError("encoder disconnected")
        return self.inner.query(idx, stream)

    def __getattr__(self, name):
        return getattr(self.inner, name)


def test_plant_failure_exits_4_with_partial_history(tmp_path, monkeypatch, capsys):
    real = cli._build_plant
    monkeypatch.setattr(cli, "_build_plant", lambda cfg, model: _Broken(real(cfg, model)))
    out = tmp_path / "r"
    code, _, err = run(["safebo", "--config", write_cfg(tmp_path, SAFEBO_CFG), "--out", str(out)], capsys)
    assert code == 4 and "encoder" in err
    rows = list(csv.reader((out / "history.csv").open(newline="")))
    assert len(rows) == 1 + 2
    assert json.loads((out / "recommendation.json").read_text())["status"].startswith("plant failure")


# -- furuta / schema --------------------------------------------------------

def test_furuta_rollout_command(tmp_path, capsys):
    code, out, _ = run(["furuta-rollout", "--a", "0.23", "0.40", "--out", str(tmp_path / "f")], capsys)
    payload = json.loads(out)
    assert code == 0 and 0 <= payload["h"][0] <= 1 and payload["h"][1] >= 0
    rows = list(csv.reader((tmp_path / "f" / "trajectory.csv").open(newline="")))
    assert rows[0] == fio.TRAJECTORY_HEADER and len(rows) == 1001
    assert cli.main(["schema-check", str(tmp_path / "f" / "trajectory.csv")]) == 0
    assert run(["furuta-rollout", "--a", "1.5", "0.4", "--out", str(tmp_path / "g")], capsys)[0] == 2


def test_schema_check_rejects_bad_files(tmp_path, capsys):
    bad = tmp_path / "tube.csv"
    fio.write_csv(bad, fio.tube_header(1), [[0, 0, 0.0, 1.0, 0.5]])  # lower > upper
    wrong = tmp_path / "other.csv"
    wrong.write_text("x,y\n1,2\n")
    ragged = tmp_path / "history.csv"
    ragged.write_text(",".join(fio.history_header(1, 1)) + "\r\n1,2\r\n")
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    for f in (bad, wrong, ragged, broken, tmp_path / "missing.csv"):
        assert run(["schema-check", str(f)], capsys)[0] == 2


def test_csv_quoting_and_atomic_write(tmp_path):
    path = tmp_path / "q.csv"
    fio.write_csv(path, ["a", "b"], [["x,y", 'say "hi"'], [1.5, True]])
    raw = path.read_bytes()
    assert b'"x,y"' in raw and b'"say ""hi"""' in raw and raw.count(b"\r\n") == 3
    assert fio.read_csv(path)[1] == [["x,y", 'say "hi"'], ["1.5", "1"]]
    assert not list(tmp_path.glob("*.tmp*"))


def test_console_script_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "fbuq.cli", "bounds", "scalar", "--nu", "0.5", "--kappa-t", "0.5"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["m"] == 1
