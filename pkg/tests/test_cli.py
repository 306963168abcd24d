import csv
import io
import re
import subprocess
import sys

import numpy as np
import pytest

from womlab.cli import main
from womlab.sweep import read_table


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestSolve:
    def test_fig1(self, capsys):
        code, out, _ = run(capsys, "solve", "--preset", "fig1")
        assert code == 0
        table = rows(out)
        assert len(table) == 2
        assert [r["stable"] for r in table] == ["false", "true"]
        assert float(table[1]["q"]) == pytest.approx(0.82734478593, rel=1e-9)

    def test_byte_stable(self, capsys, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(capsys, "solve", "--out", str(a))
        run(capsys, "solve", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()
        assert re.search(r"\d\.\d{16}", a.read_text())

    def test_no_trade(self, capsys):
        code, out, _ = run(capsys, "solve", "--s", "0.5")
        assert code == 0 and out.strip() == "NO-TRADE-ONLY"

    def test_full_diffusion(self, capsys):
        code, out, _ = run(capsys, "solve", "--full-diffusion", "--delta", "0.5")
        assert code == 0 and len(rows(out)) == 1

    @pytest.mark.parametrize("argv", [["--s", "2"], ["--delta", "1"], ["--kmax", "0"],
                                      ["--dist-csv", "/nonexistent.csv"]])
    def test_bad_input(self, capsys, argv):
        code, _, err = run(capsys, "solve", *argv)
        assert code == 2 and "error" in err

    def test_single_friend_is_numerical_failure(self, capsys):
        code, _, _ = run(capsys, "solve", "--kmax", "1")
        assert code == 1

    def test_config_precedence(self, capsys, tmp_path):
        cfg = tmp_path / "m.cfg"
        cfg.write_text("# market\ns = 0.5\ndelta = 0.9\n")
        code, out, _ = run(capsys, "solve", "--config", str(cfg))
        assert out.strip() == "NO-TRADE-ONLY"
        code, out, _ = run(capsys, "solve", "--config", str(cfg), "--s", "0.05")
        assert len(rows(out)) == 2

    def test_bad_config(self, capsys, tmp_path):
        cfg = tmp_path / "m.cfg"
        cfg.write_text("nonsense\n")
        assert run(capsys, "solve", "--config", str(cfg))[0] == 2

    def test_dist_csv(self, capsys, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("k,t_k\n2,1\n")
        code, out, _ = run(capsys, "solve", "--dist-csv", str(path), "--delta", "0.5", "--s", "0.01")
        assert code == 0 and len(rows(out)) >= 1


class TestSweep:
    def test_preset_fig3(self, capsys, tmp_path):
        out = tmp_path / "fig3.csv"
        code, _, _ = run(capsys, "sweep", "--preset", "fig3", "--out", str(out))
        assert code == 0
        header, data = read_table(out)
        assert header == ["gamma", "e_price"]
        assert data.shape == (41, 2)
        assert np.all(np.diff(data[:, 1]) < 0)
        svg = (tmp_path / "fig3.svg").read_text()
        assert svg.count('id="series-') == 1

    def test_svg_deterministic(self, capsys, tmp_path):
        for name in ("a", "b"):
            run(capsys, "sweep", "--variable", "s", "--lo", "0.01", "--hi", "0.05", "--steps", "5",
                "--outputs", "q,e_price", "--out", str(tmp_path / f"{name}.csv"))
        a = (tmp_path / "a.svg").read_bytes()
        assert a == (tmp_path / "b.svg").read_bytes()
        assert a.count(b'id="series-') == 2
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_no_figure(self, capsys, tmp_path):
        run(capsys, "sweep", "--variable", "s", "--lo", "0.01", "--hi", "0.05", "--steps", "3",
            "--out", str(tmp_path / "x.csv"), "--no-figure")
        assert not (tmp_path / "x.svg").exists()

    def test_no_equilibrium_rows(self, capsys, tmp_path):
        out = tmp_path / "s.csv"
        run(capsys, "sweep", "--variable", "s", "--lo", "0.05", "--hi", "0.5", "--steps", "2",
            "--outputs", "q", "--out", str(out), "--no-figure")
        table = rows(out.read_text())
        assert table[1]["q"] == "NA" and table[1]["status"] == "no-equilibrium"

    @pytest.mark.parametrize("argv", [["--variable", "s"], ["--variable", "s", "--lo", "1", "--hi", "0"],
                                      ["--variable", "s", "--lo", "0", "--hi", "1", "--outputs", "bogus"],
                                      ["--preset", "fig3", "--variable", "s"]])
    def test_bad_sweeps(self, capsys, tmp_path, argv):
        assert run(capsys, "sweep", *argv, "--out", str(tmp_path / "x.csv"))[0] == 2

    @pytest.mark.parametrize("preset,col", [("fig1", "q"), ("fig8", "w")])
    def test_curve_presets(self, capsys, tmp_path, preset, col):
        out = tmp_path / f"{preset}.csv"
        assert run(capsys, "sweep", "--preset", preset, "--out", str(out))[0] == 0
        assert read_table(out)[0] == [col, "benefit", "cost"]


class TestPlot:
    def test_empty_rows(self, capsys, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("gamma,e_price\n")
        assert run(capsys, "plot", str(path), str(tmp_path / "e.svg"))[0] == 2

    def test_two_columns(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("x,a,b\n0,1,2\n1,2,3\n2,NA,5\n")
        assert run(capsys, "plot", str(path), str(tmp_path / "t.svg"))[0] == 0
        assert (tmp_path / "t.svg").read_text().count('id="series-') == 2

    def test_png(self, capsys, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("x,a\n0,1\n1,2\n")
        assert run(capsys, "plot", str(path), str(tmp_path / "t.png"))[0] == 0
        assert (tmp_path / "t.png").read_bytes()[:4] == b"\x89PNG"


class TestVerify:
    ARGS = ("verify", "--samples", "200000", "--replications", "200")

    def test_pass_and_repeat(self, capsys, tmp_path):
        out = tmp_path / "v.csv"
        code, text, _ = run(capsys, *self.ARGS, "--out", str(out))
        assert code == 0
        assert "FAIL" not in text and text.count("PASS") == 14
        first = out.read_bytes()
        run(capsys, *self.ARGS, "--out", str(out))
        assert out.read_bytes() == first
        assert (tmp_path / "v.json").exists()
        assert (tmp_path / "v.svg").read_text().count('id="series-') == 2

    def test_tampered(self, capsys):
        code, text, err = run(capsys, "verify", "--q-offset", "0.1")
        assert code == 1
        assert re.search(r"^FAIL indifference", text, re.M)

    def test_offset_out_of_range(self, capsys):
        assert run(capsys, *self.ARGS, "--q-offset", "0.5")[0] == 2


class TestAsym:
    def test_fig8(self, capsys):
        code, out, _ = run(capsys, "asym", "--preset", "fig8")
        assert code == 0
        table = rows(out)
        assert any(r["khat"] == "3" and r["stable"] == "true" for r in table)

    def test_boundary(self, capsys):
        _, out, _ = run(capsys, "asym", "--preset", "fig8", "--s", "0.031")
        assert any(r["regime"] == "boundary" for r in rows(out))


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "womlab", "solve", "--s", "0.5"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "NO-TRADE-ONLY"


def test_missing_command():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
