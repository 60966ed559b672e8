import csv
import json
import subprocess
import sys

from phytozoo.cli import main

TYPE2_SINGLE = ["--h", "1", "--beta", "1", "--r", "0.5", "--theta", "0.25", "--c", "0.25"]
TYPE2_BISTABLE = ["--h", "1", "--beta", "3.7", "--r", "0.5", "--theta", "0.25", "--c", "4"]
TYPE3_BISTABLE = ["--h", "2", "--beta", "6.7", "--r", "0.5", "--theta", "0.25", "--c", "8"]


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestFixedPoints:
    def test_text(self, capsys):
        code, out, _ = run(["fp", *TYPE2_SINGLE], capsys)
        assert code == 0
        line = next(l for l in out.splitlines() if l.startswith("Eminus"))
        assert "u=0.87689" in line and line.endswith("Attractive")

    def test_json_schema(self, capsys, tmp_path):
        path = tmp_path / "fp.json"
        assert run(["fp", *TYPE3_BISTABLE, "--format", "json", "--out", str(path)], capsys)[0] == 0
        doc = json.loads(path.read_text())
        assert set(doc) >= {"params", "fixed_points", "regime"}
        classes = {p["label"]: p["class"] for p in doc["fixed_points"]}
        assert classes["Eminus"] == "Attractive" and classes["Eplus"] == "Saddle"
        for pt in doc["fixed_points"]:
            assert set(pt) >= {"label", "u", "v", "p", "q", "lambda", "class"}
            assert len(pt["lambda"]) == 2 and all(set(z) == {"re", "im"} for z in pt["lambda"])

    def test_csv(self, capsys, tmp_path):
        path = tmp_path / "fp.csv"
        run(["fp", *TYPE2_BISTABLE, "--format", "csv", "--out", str(path)], capsys)
        rows = read_csv(path)
        assert rows[0][:5] == ["label", "u", "v", "p", "q"]
        assert [r[0] for r in rows[1:]] == ["E0", "E1", "Eminus", "Eplus"]

    def test_negative_beta(self, capsys):
        code, _, err = run(["fp", "--h", "1", "--beta", "-1", "--r", "0.5", "--theta", "0.25", "--c", "0.25"], capsys)
        assert code == 2 and "beta" in err and "positive" in err

    def test_missing_param(self, capsys):
        code, _, err = run(["fp", "--h", "1", "--beta", "1", "--r", "0.5", "--theta", "0.25"], capsys)
        assert code == 2 and "--c" in err


class TestSimulate:
    def test_csv_and_verdict(self, capsys, tmp_path):
        path = tmp_path / "traj.csv"
        code, out, _ = run(["simulate", *TYPE2_SINGLE, "--u0", "0.4", "--v0", "0.8", "--out", str(path)], capsys)
        assert code == 0
        assert out.splitlines()[-1].startswith("verdict=ConvergedTo(Eminus) steps=")
        rows = read_csv(path)
        assert rows[0] == ["n", "u", "v"] and rows[1] == ["0", "0.40000000000000002", "0.80000000000000004"]

    def test_closed_curve(self, capsys):
        argv = ["simulate", "--h", "2", "--beta", "11", "--r", "0.5", "--theta", "0.25", "--c", "11.1",
                "--u0", "0.36", "--v0", "4.3", "--steps", "10000"]
        code, out, _ = run(argv, capsys)
        assert code == 0 and out.splitlines()[-1] == "verdict=InvariantCurve steps=10000"

    def test_zero_steps(self, capsys):
        assert run(["simulate", *TYPE2_SINGLE, "--u0", "0.4", "--v0", "0.8", "--steps", "0"], capsys)[0] == 2

    def test_missing_target(self, capsys):
        assert run(["simulate", *TYPE2_SINGLE, "--u0", "0.4", "--v0", "0.8", "--target", "Eplus"], capsys)[0] == 3

    def test_unwritable(self, capsys, tmp_path):
        bad = tmp_path / "missing" / "t.csv"
        assert run(["simulate", *TYPE2_SINGLE, "--u0", "0.4", "--v0", "0.8", "--out", str(bad)], capsys)[0] == 4


class TestClassifyParams:
    def test_type2(self, capsys):
        code, out, _ = run(["classify-params", *TYPE2_SINGLE], capsys)
        assert code == 0 and "(a1)" in out and "uhat-" in out
        assert "[PASS] Eminus attracts the region below the prey nullcline" in out

    def test_high_mortality(self, capsys):
        _, out, _ = run(["classify-params", "--h", "1", "--beta", "1", "--r", "1.2", "--theta", "0.25", "--c", "1"], capsys)
        assert "subclasses: (b1)" in out

    def test_type3_checklist(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        argv = ["classify-params", "--h", "2", "--beta", "3", "--r", "0.5", "--theta", "0.25", "--c", "2",
                "--format", "json", "--out", str(path)]
        assert run(argv, capsys)[0] == 0
        doc = json.loads(path.read_text())
        block = next(b for b in doc["checklists"] if b["name"] == "Eminus attracts N1 and N2")
        assert block["holds"]
        items = {i["hypothesis"]: i["pass"] for i in block["items"]}
        assert items["r + theta <= 1"] and items["c <= 27/4"]

    def test_samples(self, capsys):
        _, out, _ = run(["classify-params", *TYPE2_SINGLE, "--samples", "200", "--seed", "1"], capsys)
        assert "M1: 0 of 200" in out


class TestDataCommands:
    def test_sweep(self, capsys, tmp_path):
        out = tmp_path / "s.csv"
        argv = ["sweep", "--h", "2", "--param", "c", "--from", "11.0", "--to", "11.5", "--steps", "50",
                "--beta", "11", "--r", "0.5", "--theta", "0.25", "--out", str(out)]
        assert run(argv, capsys)[0] == 0
        assert read_csv(out)[0] == ["param", "u_minus", "p", "q", "class"]
        side = json.loads((tmp_path / "s.json").read_text())
        (cross,) = side["crossings"]
        assert 11.1 < cross["value"] < 11.3
        assert side["config"]["q_tol"] == 1e-9

    def test_basin(self, capsys, tmp_path):
        out = tmp_path / "b.csv"
        assert run(["basin", *TYPE2_BISTABLE, "--out", str(out)], capsys)[0] == 0
        rows = read_csv(out)
        assert rows[0] == ["u", "v_star"]
        assert min(abs(float(v) - 0.521718) for _, v in rows[1:]) <= 0.05
        side = json.loads((tmp_path / "b.json").read_text())
        assert side["config"]["max_steps"] == 100_000 and side["config"]["v_tol"] == 1e-6

    def test_basin_not_bistable(self, capsys, tmp_path):
        assert run(["basin", *TYPE2_SINGLE, "--out", str(tmp_path / "b.csv")], capsys)[0] == 3

    def test_portrait_and_determinism(self, capsys, tmp_path):
        grid = ["--grid", "0.05:0.95:4,0.1:3:3", "--steps", "20000"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(["portrait", *TYPE2_BISTABLE, *grid, "--out", str(a)], capsys)
        run(["portrait", *TYPE2_BISTABLE, *grid, "--out", str(b), "--workers", "2"], capsys)
        assert a.read_bytes() == b.read_bytes()
        assert read_csv(a)[0] == ["u", "v", "verdict"] and len(read_csv(a)) == 13

    def test_portrait_json(self, capsys, tmp_path):
        out = tmp_path / "p.json"
        run(["portrait", *TYPE2_SINGLE, "--grid", "0.35:0.45:1,0.75:0.85:1", "--format", "json", "--out", str(out)], capsys)
        doc = json.loads(out.read_text())
        assert doc["columns"] == ["u", "v", "verdict"] and doc["rows"][0][2] == "ConvergedTo(Eminus)"

    def test_bad_grid(self, capsys, tmp_path):
        assert run(["portrait", *TYPE2_SINGLE, "--grid", "0:1:2", "--out", str(tmp_path / "p.csv")], capsys)[0] == 2

    def test_sweep_repeatable(self, capsys, tmp_path):
        argv = ["sweep", *TYPE2_SINGLE, "--param", "beta", "--from", "0.95", "--to", "1.05", "--steps", "11"]
        run([*argv, "--out", str(tmp_path / "x.csv")], capsys)
        run([*argv, "--out", str(tmp_path / "y.csv")], capsys)
        assert (tmp_path / "x.csv").read_bytes() == (tmp_path / "y.csv").read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "phytozoo", "fp", *TYPE2_SINGLE], capture_output=True, text=True)
    assert proc.returncode == 0 and "Eminus" in proc.stdout
