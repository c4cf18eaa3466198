import csv
import json
import subprocess
import sys

import pytest

from invoreduce.cli import main
from invoreduce.opalgebra import InvOperator


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", ["reflect", "heat", "biharm"])
def test_reduce_matches_golden(name, programs_dir, golden_dir, capsys):
    code, out, _ = run(["reduce", programs_dir / f"{name}.inv", "--op", "L"], capsys)
    assert code == 0
    assert out == (golden_dir / f"reduce_{name}.json").read_text()
    doc = json.loads(out)
    assert doc["pure_pde"] is True
    RL = InvOperator.from_json_obj(doc["RL"])
    assert all(not P for P in RL.components[1:])


def test_reduce_out_file_is_byte_identical(programs_dir, tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert run(["reduce", programs_dir / "heat.inv", "--op", "L", "--out", p], capsys)[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_compose(programs_dir, capsys):
    code, out, _ = run(["compose", programs_dir / "rotation3.inv", "--left", "Rc", "--right", "L"], capsys)
    assert code == 0
    RL = InvOperator.from_json_obj(json.loads(out))
    # D_{v.Av.A^2v} + Id with v = (1, 0): -y1^2 y2 - y1 y2^2 + 1
    assert {a: str(c) for a, c in RL.components[0].terms.items()} == {(2, 1): "-1", (1, 2): "-1", (0, 0): "1"}
    assert not RL.components[1] and not RL.components[2]


def test_commute_exit_codes(programs_dir, capsys):
    code, out, _ = run(["commute", programs_dir / "rotation3.inv", "--left", "L", "--right", "R"], capsys)
    assert code == 1 and json.loads(out)["zero"] is False
    code, out, _ = run(["commute", programs_dir / "rotation3_fixed.inv", "--left", "L", "--right", "R"], capsys)
    assert code == 0 and json.loads(out)["zero"] is True


def test_find_reducer(programs_dir, capsys):
    code, out, _ = run(["find-reducer", programs_dir / "rotation3.inv", "--op", "L", "--max-degree", "2"], capsys)
    first, rest = out.split("\n", 1)
    assert code == 0 and first == "nullspace dimension: 1"
    doc = json.loads(rest)
    assert all(not P for P in InvOperator.from_json_obj(doc["RL"]).components[1:])
    code, out, _ = run(["find-reducer", programs_dir / "rotation3.inv", "--op", "L", "--max-degree", "1"], capsys)
    assert code == 1 and out.splitlines() == ["nullspace dimension: 0", "none"]


def test_input_errors_exit_2(programs_dir, tmp_path, capsys):
    bad = tmp_path / "bad.inv"
    bad.write_text("dim 2\nL = D[1]\n")
    code, _, err = run(["reduce", bad, "--op", "L"], capsys)
    assert code == 2 and err.strip() == f"{bad}:2:5: dimension mismatch: D has 1 indices, dim is 2"
    assert run(["reduce", tmp_path / "missing.inv", "--op", "L"], capsys)[0] == 2
    with pytest.raises(SystemExit):
        main(["reduce", str(programs_dir / "reflect.inv"), "--op", "Nope"])
    with pytest.raises(SystemExit) as info:
        main(["greens", "eval", "--grid", "12by4", "--out", str(tmp_path / "g.csv")])
    assert info.value.code == 2


def test_bessel_zeros_csv(tmp_path, capsys):
    out = tmp_path / "z.csv"
    assert run(["bessel", "zeros", "--nmax", "2", "--mmax", "3", "--out", out], capsys)[0] == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 9 and rows[0]["n"] == "0" and rows[0]["m"] == "1"
    assert float(rows[0]["mu"]) == pytest.approx(2.404825557695773, abs=1e-14)
    assert float(rows[3]["mu"]) == pytest.approx(3.8317059702075125, abs=1e-14)


@pytest.mark.parametrize("model", ["heat-disk", "biharm"])
def test_greens_eval_csv_and_sidecar(model, tmp_path, capsys):
    out = tmp_path / "g.csv"
    argv = ["greens", "eval", "--model", model, "--nmax", "4", "--mmax", "4", "--grid", "6x8", "--out", out]
    assert run(argv, capsys)[0] == 0
    rows = list(csv.reader(out.open()))
    assert len(rows) == 1 + 6 * 8
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["model"] == model and meta["jacobian"] is True and meta["grid"]["nr"] == 6
    first = out.read_bytes()
    assert run(argv, capsys)[0] == 0
    assert out.read_bytes() == first


def test_version_via_module():
    res = subprocess.run([sys.executable, "-m", "invoreduce", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("invoreduce ")


@pytest.mark.slow
def test_verify_defaults(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run(["verify", "--out", out], capsys)[0] == 0
    rep = json.loads(out.read_text())
    assert rep["l2_relative"] <= 5e-2
    assert rep["metadata"]["source"] == "bump"


@pytest.mark.slow
def test_verify_threshold_controls_exit(capsys):
    code, out, _ = run(["verify", "--grid", "16x32", "--nmax", "6", "--mmax", "6", "--threshold", "1e-9"], capsys)
    assert code == 1 and json.loads(out)["l2_relative"] > 1e-9
