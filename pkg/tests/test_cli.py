import io
import json
import subprocess
import sys

import pytest

from qsp import curve_for, outcome_probability_bought, read_curve_csv
from qsp.cli import main
from qsp.lattice import load
from qsp.pricing import schedule_from_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def sample_csv(tmp_path):
    path = tmp_path / "sample.csv"
    path.write_text("i,p\n0,0.2\n1,0.4\n2,0.8\n")
    return str(path)


class TestModel:
    def test_single_value(self, capsys):
        assert run(capsys, "model", "--y", "0.5", "--n", "3") == (0, "0.5\n", "")

    def test_single_csv_and_json(self, capsys):
        code, out, _ = run(capsys, "--format", "csv", "model", "--y", "0.4", "--n", "100",
                           "--i", "10")
        assert code == 0
        assert out.splitlines()[0] == "y,n,i,p"
        assert float(out.splitlines()[1].split(",")[3]) == outcome_probability_bought(0.4, 100, 10)
        code, out, _ = run(capsys, "model", "--y", "0.4", "--n", "100", "--format", "json")
        assert json.loads(out)["p"] == outcome_probability_bought(0.4, 100, 0)

    def test_range_table(self, capsys):
        code, out, _ = run(capsys, "model", "--y", "0.4", "--n", "100", "--i-range", "0..60")
        assert code == 0
        lines = [ln for ln in out.splitlines() if not ln.startswith("#")]
        assert lines[0] == "i,p,dp"
        rows = [ln.split(",") for ln in lines[1:]]
        assert len(rows) == 61 and rows[0][2] == ""
        for i, p, dp in rows:
            assert float(p) == outcome_probability_bought(0.4, 100, int(i))
        curve = read_curve_csv(io.StringIO(
            "i,p\n" + "\n".join(f"{i},{p}" for i, p, _ in rows[:41])))
        assert curve == curve_for(0.4, 100, 40)

    def test_domain_error(self, capsys):
        code, out, err = run(capsys, "model", "--y", "1.2", "--n", "10")
        assert code == 2 and out == "" and "y" in err

    def test_bad_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["model", "--y", "0.5"])
        assert exc.value.code == 2


class TestPrice:
    def test_worked_example(self, capsys, sample_csv):
        code, out, _ = run(capsys, "price", sample_csv, "--k2", "0.1")
        assert code == 0
        assert out.splitlines() == ["i,c", "1,0.4", "2,2.4"]
        assert schedule_from_csv(out).prices == (0.4, 2.4)

    def test_linear_i_max(self, capsys):
        code, out, _ = run(capsys, "price", "linear:0.01,0.2,80", "--k2", "0.0005",
                           "--v", "100")
        assert code == 0
        assert "# i_max=5" in out.splitlines()

    def test_trace(self, capsys, sample_csv):
        code, out, _ = run(capsys, "price", sample_csv, "--k2", "0.1", "--v", "3", "--trace")
        assert code == 0
        body = [ln for ln in out.splitlines() if not ln.startswith("#")]
        assert body[0] == "i,c,gain,bought"
        assert body[1].endswith(",1") and body[2].endswith(",0")

    def test_json(self, capsys, sample_csv):
        code, out, _ = run(capsys, "price", sample_csv, "--k2", "0.1", "--v", "3",
                           "--format", "json", "--trace")
        doc = json.loads(out)
        assert doc["i_max"] == doc["i_stop"] == 1
        assert [r["c"] for r in doc["rows"]] == [0.4, 2.4]

    def test_bound_violation(self, capsys, sample_csv):
        code, out, err = run(capsys, "price", sample_csv, "--k2", "0.3", "--v", "4")
        assert code == 2 and out == ""
        assert "(1 - p(0))/V = 0.2" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "price", str(tmp_path / "nope.csv"), "--k2", "0.1")
        assert code == 1 and err

    def test_bad_curve_file(self, capsys, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("i,p\n0,0.5\n1,0.4\n")
        code, _, err = run(capsys, "price", str(path), "--k2", "0.1")
        assert code == 2 and "row 3" in err

    def test_unknown_demo(self, capsys):
        code, _, err = run(capsys, "price", "demo:nope", "--k2", "0.1")
        assert code == 2 and "linear" in err


class TestAnalyze:
    def test_constant_case(self, capsys):
        code, out, _ = run(capsys, "analyze", "linear:0.01,0,100", "--k2", "0.0005",
                           "--imax", "10")
        doc = json.loads(out)
        assert code == 0
        assert doc["total_direct"] == pytest.approx(11, rel=1e-12)
        assert doc["total_closed"] == pytest.approx(11, rel=1e-12)
        assert doc["a_avg"] == pytest.approx(0.01) and doc["b_avg"] == pytest.approx(1e-4)

    def test_granularity_block(self, capsys):
        code, out, _ = run(capsys, "analyze", "linear:0.01,0,100", "--k2", "0.001",
                           "--v-list", "10,20,30,45")
        gran = json.loads(out)["granularity"]
        assert gran["optimal"] is True and gran["min_diff"] == 1

    def test_csv_report(self, capsys):
        code, out, _ = run(capsys, "--format", "csv", "analyze", "demo:logistic",
                           "--k2", "0.001", "--v", "300")
        fields = dict(ln.split(",", 1) for ln in out.splitlines()[1:])
        assert code == 0 and fields["regime"] == "bounded-below"

    def test_sweep(self, capsys):
        code, out, _ = run(capsys, "analyze", "linear:0.01,0,100", "--v-list", "10,20,30,45",
                           "--sweep-log", "1e-5", "1e-2", "7", "--format", "csv")
        assert code == 0
        assert "# optimal_k2_range=0.001,0.001" in out
        body = [ln for ln in out.splitlines() if not ln.startswith("#")]
        assert body[0].startswith("k2,feasible") and len(body) == 8

    def test_needs_v_or_imax(self, capsys):
        assert run(capsys, "analyze", "linear:0.01,0,100", "--k2", "0.001")[0] == 2


class TestLattice:
    FLAGS = ["--y-step", "0.1", "--y-count", "11", "--n-max", "20", "--i-cap", "11"]

    def test_build_query_export(self, capsys, tmp_path):
        path = str(tmp_path / "grid.qspl")
        assert run(capsys, "lattice", "build", path, *self.FLAGS)[0] == 0
        assert load(path).values.shape == (11, 20, 12)
        code, out, _ = run(capsys, "lattice", "query", path, "--y", "0.3", "--n", "17",
                           "--i", "4")
        _, model_out, _ = run(capsys, "model", "--y", "0.3", "--n", "17", "--i", "4")
        assert code == 0 and out == model_out
        code, out, _ = run(capsys, "lattice", "export", path)
        assert out.splitlines()[0] == "y,n,i,p" and len(out.splitlines()) == 11 * 20 * 12 + 1

    def test_off_grid_query(self, capsys, tmp_path):
        path = str(tmp_path / "grid.qspl")
        run(capsys, "lattice", "build", path, *self.FLAGS)
        code, _, err = run(capsys, "lattice", "query", path, "--y", "0.35", "--n", "5",
                           "--i", "1")
        assert code == 2 and "nearest" in err

    def test_corrupt_file_is_runtime_error(self, capsys, tmp_path):
        path = tmp_path / "grid.qspl"
        run(capsys, "lattice", "build", str(path), *self.FLAGS)
        blob = bytearray(path.read_bytes())
        blob[64] ^= 0xFF
        path.write_bytes(bytes(blob))
        code, _, err = run(capsys, "lattice", "export", str(path))
        assert code == 1 and "checksum" in err

    def test_full_scale_refused(self, capsys, tmp_path):
        code, _, err = run(capsys, "lattice", "build", str(tmp_path / "big.qspl"))
        assert code == 2 and "allow" in err
        assert not (tmp_path / "big.qspl").exists()


class TestPlotData:
    def test_fig5(self, capsys, tmp_path):
        code, out, _ = run(capsys, "plotdata", "5", "--out-dir", str(tmp_path))
        assert code == 0 and len(out.splitlines()) == 3
        half = (tmp_path / "fig5_y0.50.csv").read_text().splitlines()
        assert any(ln.startswith("#") and "reconstructed" in ln for ln in half)
        rows = [ln.split(",") for ln in half if not ln.startswith("#")][1:]
        assert len(rows) == 1000
        ps = [float(p) for _, p in rows]
        assert all(abs(p - 0.5) <= 1e-12 for p in ps[0::2])
        assert all(p < 0.5 for p in ps[1::2])

    def test_fig6(self, capsys, tmp_path):
        run(capsys, "plotdata", "6", "--out-dir", str(tmp_path))
        files = sorted(tmp_path.glob("fig6_*.csv"))
        assert len(files) == 9
        lines = (tmp_path / "fig6_y0.40.csv").read_text().splitlines()
        body = [ln.split(",") for ln in lines if not ln.startswith("#")]
        assert body[0] == ["i", "p"] and len(body) == 62
        assert float(body[11][1]) == outcome_probability_bought(0.4, 100, 10)
        # rows up to saturation form a valid curve
        assert read_curve_csv(io.StringIO("\n".join(lines[:2 + 51 + 1]))).n == 50

    def test_fig10_reference_column(self, capsys, tmp_path):
        run(capsys, "plotdata", "10", "--out-dir", str(tmp_path))
        text = (tmp_path / "fig10_early-saturating.csv").read_text().splitlines()
        body = [ln for ln in text if not ln.startswith("#")]
        assert body[0] == "i_max,total_cost,m_p2_bound,m_i2_ref"
        last = [float(v) for v in body[-1].split(",")]
        assert last[1] <= last[2] and last[3] > 10 * last[1]

    def test_env_out_dir(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("QSP_OUT_DIR", str(tmp_path))
        assert run(capsys, "plotdata", "4")[0] == 0
        assert len(list(tmp_path.glob("fig4_*.csv"))) == 6

    def test_unknown_figure(self, capsys, tmp_path):
        code, _, err = run(capsys, "plotdata", "1", "--out-dir", str(tmp_path))
        assert code == 2 and "4, 5, 6, 7, 9, 10" in err


class TestDeterminism:
    def test_seeded_random_curve(self, capsys):
        argv = ["price", "random:30", "--k2", "0.001", "--seed", "7"]
        first = run(capsys, *argv)[1]
        assert run(capsys, *argv)[1] == first
        assert run(capsys, *argv[:-1], "8")[1] != first

    def test_plot_files_byte_identical(self, capsys, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run(capsys, "plotdata", "9", "--out-dir", str(a))
        run(capsys, "plotdata", "9", "--out-dir", str(b))
        for f in a.iterdir():
            assert f.read_bytes() == (b / f.name).read_bytes()

    def test_out_flag(self, capsys, tmp_path, sample_csv):
        dest = tmp_path / "sched.csv"
        assert run(capsys, "price", sample_csv, "--k2", "0.1", "--out", str(dest))[1] == ""
        assert schedule_from_csv(dest.read_text()).prices == (0.4, 2.4)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qsp", "model", "--y", "0.5", "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "0.5\n"
    proc = subprocess.run([sys.executable, "-m", "qsp", "model", "--y", "2", "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
