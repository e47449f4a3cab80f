import json
import math
import subprocess
import sys

import pytest

from embezzle import cli
from embezzle.cli import SWEEP_COLUMNS, main, read_sweep, validate_sweep_rows

BELL = {"kind": "schmidt", "coeffs": [0.7071067811865476, 0.7071067811865476]}
PRODUCT = {"kind": "schmidt", "coeffs": [1.0]}


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


class TestReport:
    def test_bell_n2(self, capsys, state_file):
        code, out = run(capsys, "report", "--n", "2", "--target", state_file(BELL))
        assert code == 0
        doc = json.loads(out.out)
        assert doc["fidelity"] == pytest.approx(0.8047379, abs=1e-7)
        assert doc["violations"] == []
        for field in ("n", "m", "eq4_bound", "sum_omega_sq", "delta", "eq6_bound", "fannes_floor",
                      "target_entropy_bits", "epsilon_implied"):
            assert field in doc

    def test_seventeen_digits(self, capsys, state_file):
        _, out = run(capsys, "report", "--n", "2", "--target", state_file(BELL))
        assert '"fidelity": 0.80473785412436516' in out.out

    def test_product_target(self, capsys, state_file):
        code, out = run(capsys, "report", "--n", "4", "--target", state_file(PRODUCT))
        doc = json.loads(out.out)
        assert code == 0 and doc["fidelity"] == 1.0 and doc["delta"] == 0.0

    def test_n1_refused(self, capsys, state_file):
        code, out = run(capsys, "report", "--n", "1", "--target", state_file(BELL))
        assert code == 2
        assert "bounds undefined for n<2" in out.err

    def test_violation_exit_code(self, capsys, state_file, monkeypatch):
        real = cli.protocol.bound_report

        def corrupted(n, phi, **kw):
            rep = real(n, phi, **kw)
            return type(rep)(**{**rep.to_dict(), "delta": rep.eq6_bound + 1.0})

        monkeypatch.setattr(cli.protocol, "bound_report", corrupted)
        code, out = run(capsys, "report", "--n", "16", "--target", state_file(BELL))
        assert code == 1
        assert "delta <= eq6_bound" in out.err

    def test_bad_file(self, capsys, state_file):
        code, out = run(capsys, "report", "--n", "4", "--target", state_file({"kind": "schmidt", "coeffs": [0.5]}))
        assert code == 2 and "not normalized" in out.err


class TestSweep:
    def test_csv_rows_and_header(self, capsys, state_file, tmp_path):
        out = tmp_path / "s.csv"
        code, _ = run(capsys, "sweep", "--target", state_file(BELL), "--n", "256,4,16", "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(SWEEP_COLUMNS)
        rows = read_sweep(out)
        assert [r["n"] for r in rows] == [4, 16, 256]
        assert all(r["fidelity"] >= r["eq4_bound"] for r in rows)

    def test_geometric_powers_of_two(self, capsys, state_file, tmp_path):
        out = tmp_path / "s.csv"
        argv = ["sweep", "--target", state_file(BELL), "--n-start", "4", "--n-factor", "2", "--n-count", "19",
                "--out", str(out)]
        assert run(capsys, *argv)[0] == 0
        rows = read_sweep(out)
        assert [r["n"] for r in rows] == [2**k for k in range(2, 21)]
        for k, r in zip(range(2, 21), rows):
            assert r["fidelity"] >= 1 - 1 / k

    def test_product_target_column(self, capsys, state_file, tmp_path):
        out = tmp_path / "p.csv"
        run(capsys, "sweep", "--target", state_file(PRODUCT), "--n", "2,3,1000", "--out", str(out))
        assert all(r["fidelity"] == 1.0 for r in read_sweep(out))

    def test_deterministic_bytes(self, capsys, state_file, tmp_path):
        target = state_file({"kind": "schmidt", "coeffs": [math.sqrt(0.6), math.sqrt(0.3), math.sqrt(0.1)]})
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "sweep", "--target", target, "--n", "2,50,7000", "--out", str(a))
        run(capsys, "sweep", "--target", target, "--n", "2,50,7000", "--out", str(b), "--jobs", "3")
        assert a.read_bytes() == b.read_bytes()

    def test_jsonl_and_bounds_only(self, capsys, state_file, tmp_path):
        out = tmp_path / "s.jsonl"
        code, _ = run(capsys, "sweep", "--target", state_file(BELL), "--n", f"16,{2**41}", "--out", str(out),
                      "--format", "jsonl")
        assert code == 0
        rows = [json.loads(line) for line in out.read_text().splitlines()]
        assert list(rows[0]) == list(SWEEP_COLUMNS)
        assert rows[1]["fidelity"] is None and rows[1]["eq4_bound"] == pytest.approx(1 - 1 / 41)

    def test_rows_revalidate(self, capsys, state_file, tmp_path):
        out = tmp_path / "s.csv"
        run(capsys, "sweep", "--target", state_file(BELL), "--n", "2,3,5,8,13", "--out", str(out))
        rows = read_sweep(out)
        assert validate_sweep_rows(rows) == []
        rows[2]["delta"] = 5.0
        assert validate_sweep_rows(rows) == [(5, "delta <= eq6_bound")]

    def test_failure_leaves_no_partial_file(self, capsys, state_file, tmp_path, monkeypatch):
        out = tmp_path / "s.csv"

        def boom(report):
            raise RuntimeError("row failed")

        monkeypatch.setattr(cli, "_row", boom)
        with pytest.raises(RuntimeError):
            main(["sweep", "--target", state_file(BELL), "--n", "4", "--out", str(out)])
        assert list(tmp_path.glob("*.csv")) == []
        assert list(tmp_path.glob(".sweep-*")) == []

    @pytest.mark.parametrize(
        "extra",
        [["--n", "1,4"], ["--n-start", "4", "--n-factor", "2"], ["--n-start", "4", "--n-factor", "2", "--n-count",
                                                                  "10001"]],
    )
    def test_bad_specs(self, capsys, state_file, tmp_path, extra):
        code, _ = run(capsys, "sweep", "--target", state_file(BELL), "--out", str(tmp_path / "x.csv"), *extra)
        assert code == 2


class TestTrump:
    def files(self, state_file, *probs):
        return [state_file({"kind": "schmidt", "coeffs": [math.sqrt(p) for p in ps]}) for ps in probs]

    def test_catalysis(self, capsys, state_file):
        x, y, c = self.files(state_file, [0.4, 0.4, 0.1, 0.1], [0.5, 0.25, 0.25], [0.6, 0.4])
        code, out = run(capsys, "trump", "--x", x, "--y", y, "--catalyst", c)
        doc = json.loads(out.out)
        assert code == 0
        assert doc["trumped"] is True and doc["majorized"] is False
        assert doc["majorization_witness"] == 2
        assert doc["trumping_witness"] is None

    def test_identical(self, capsys, state_file):
        x, c = self.files(state_file, [0.5, 0.3, 0.2], [0.7, 0.3])
        doc = json.loads(run(capsys, "trump", "--x", x, "--y", x, "--catalyst", c)[1].out)
        assert doc["trumped"] is True

    def test_trivial_catalyst(self, capsys, state_file):
        x, y, c = self.files(state_file, [0.4, 0.4, 0.1, 0.1], [0.5, 0.25, 0.25], [1.0])
        doc = json.loads(run(capsys, "trump", "--x", x, "--y", y, "--catalyst", c)[1].out)
        assert doc["trumped"] == doc["majorized"] is False


class TestMinRankAndSelftest:
    def test_min_rank(self, capsys):
        code, out = run(capsys, "min-rank", "--epsilon", "0.25", "--m", "2")
        doc = json.loads(out.out)
        assert code == 0 and doc["n"] == 17 and doc["qubit_pairs"] == 4

    def test_min_rank_huge(self, capsys):
        doc = json.loads(run(capsys, "min-rank", "--epsilon", "0.01", "--m", "2")[1].out)
        assert doc["n"] == 2**100 + 1 and doc["exceeds_int64"] is True

    def test_min_rank_bad_epsilon(self, capsys):
        assert run(capsys, "min-rank", "--epsilon", "1.5", "--m", "2")[0] == 2

    def test_usage_error(self, capsys):
        assert run(capsys, "report")[0] == 2


def test_module_entry_point(tmp_path):
    target = tmp_path / "t.json"
    target.write_text(json.dumps(BELL))
    proc = subprocess.run(
        [sys.executable, "-m", "embezzle", "report", "--n", "2", "--target", str(target)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["m"] == 2
