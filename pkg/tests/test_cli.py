import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from fejer_torus.cli import main, parse_schedule
from fejer_torus.funcspace import CylinderGrid, TrigPoly, write_grid
from fejer_torus.index_core import Schedule

CHAR11 = {"type": "trigpoly", "terms": [{"index": {"1": 1, "2": 1}, "re": 1, "im": 0}]}


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def read_csv(path):
    return list(csv.reader(path.read_text().splitlines()))


def test_parse_schedule():
    assert parse_schedule("cube") == Schedule.cube()
    assert parse_schedule("regular:2.5") == Schedule.regular(2.5)
    assert parse_schedule("dregular:1,2/3:2") == Schedule.dregular([[1, 2], [3]], 2.0)
    assert parse_schedule('{"kind": "dregular", "blocks": [[1], [2]], "lambda": 1.0}') == Schedule.dregular([[1], [2]])


def test_kernel_table(tmp_path):
    out = tmp_path / "k.csv"
    assert main(["kernel-table", "--kind", "fejer", "--l", "2", "--grid", "8", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["t", "value"] and len(rows) == 9
    assert float(rows[1][1]) == 3.0
    assert np.mean([float(r[1]) for r in rows[1:]]) == pytest.approx(1.0, abs=1e-12)


def test_fourier(tmp_path):
    fn = write_json(tmp_path / "f.json", {"type": "spike", "eps": {"1": 0.1}})
    out = tmp_path / "c.csv"
    assert main(["fourier", "--function", fn, "--p", "1", "--degree", "2", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["n_1", "re", "im"] and len(rows) == 6
    one = next(r for r in rows[1:] if r[0] == "1")
    assert float(one[1]) == pytest.approx(0.93549, abs=1e-5)


def test_fejer(tmp_path):
    fn = write_json(tmp_path / "f.json", CHAR11)
    pts = tmp_path / "pts.csv"
    pts.write_text("0,0\n0.25,0.5\n")
    out = tmp_path / "m.csv"
    assert main(["fejer", "--function", fn, "--p", "2", "--nmax", "3", "--points", str(pts), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["p", "N_1", "N_2", "x_1", "x_2", "re_sigma", "im_sigma", "abs_err"]
    last = rows[-2]  # cube (3, 3) at the origin
    assert last[:3] == ["2", "3", "3"] and float(last[5]) == pytest.approx(9 / 16)
    assert float(last[7]) == pytest.approx(7 / 16)


def test_converge_exit_codes_and_determinism(tmp_path):
    cfg = {"function": CHAR11, "schedule": {"kind": "cube"}, "p_max": 2, "n_max": 15,
           "points": 5, "seed": 3, "tolerance": 0.2}
    path = write_json(tmp_path / "cfg.json", cfg)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["converge", "--config", path, "--out", str(a)]) == 0
    assert main(["converge", "--config", path, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.csv.meta.json").exists()
    cfg["tolerance"] = 1e-3
    path = write_json(tmp_path / "cfg.json", cfg)
    assert main(["converge", "--config", path, "--out", str(a), "--format", "json"]) == 2
    assert json.loads(a.read_text())["converged"] is False


def test_converge_grid_function(tmp_path):
    g = CylinderGrid.from_function(TrigPoly.character([1, 1]), (16, 16))
    write_grid(g, tmp_path / "samples.bin")
    cfg = {"function": {"type": "grid", "file": "samples.bin", "sizes": [16, 16]},
           "p_max": 2, "n_max": 7, "points": [[0.0, 0.0]], "tolerance": 0.3}
    path = write_json(tmp_path / "cfg.json", cfg)
    assert main(["converge", "--config", path, "--out", str(tmp_path / "o.csv")]) == 0
    last = read_csv(tmp_path / "o.csv")[-1]
    assert float(last[4]) == pytest.approx(1 - (7 / 8) ** 2, abs=1e-6)


def test_adversarial(tmp_path):
    fn = write_json(tmp_path / "f.json", CHAR11)
    pts = tmp_path / "pts.csv"
    pts.write_text("0,0\n")
    out = tmp_path / "adv.json"
    assert main(["adversarial", "--function", fn, "--p", "2", "--nmax", "5", "--points", str(pts),
                 "--out", str(out), "--format", "json"]) == 0
    report = json.loads(out.read_text())
    assert report["points"][0]["worst_error"] == 1.0
    assert main(["adversarial", "--function", fn, "--nmax", "5", "--npoints", "3", "--out", str(tmp_path / "a.csv")]) == 0
    assert len(read_csv(tmp_path / "a.csv")) == 4


def test_tensor_sim(tmp_path):
    cfg = {"factors": [{"factor": {"grid": 16}, "net": {"kind": "fejer", "degrees": [0, 1, 3, 7]}}] * 2,
           "function": CHAR11, "tolerance": 0.3}
    path = write_json(tmp_path / "t.json", cfg)
    out = tmp_path / "t.jsonl"
    assert main(["tensor-sim", "--config", path, "--out", str(out)]) == 0
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert lines[0]["max_error"] == pytest.approx(1.0)
    assert lines[-1]["max_error"] == pytest.approx(1 - (7 / 8) ** 2, abs=1e-9)
    assert main(["tensor-sim", "--config", path, "--tolerance", "1e-3", "--out", str(out)]) == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "fejer_torus", "kernel-table", "--kind", "dirichlet",
                           "--l", "1", "--grid", "4"], capture_output=True, text=True, check=True)
    assert proc.stdout.splitlines()[1] == "0.0,3.0"
