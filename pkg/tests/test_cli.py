"""Command-line surface: flags, file outputs, and exit-code mapping."""

import json

import numpy as np
import pytest

from paircat.cli import main
from paircat.presets import preset_text


def invoke(*argv):
    return main(list(argv))


class TestQuad:
    def test_preset_to_file(self, tmp_path):
        out = tmp_path / "p.csv"
        code = invoke("quad", "--preset", "fig2b", "--out", str(out), "--format", "csv")
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "# nodes: 321 x 321"
        assert "xi=1 q=5" in lines[3]
        assert lines[4] == "x,y,p"

    def test_flags_to_stdout(self, capsys):
        code = invoke("quad", "--xi", "0", "--q", "0", "--phi", "0")
        assert code == 0
        head = capsys.readouterr().out.splitlines()[:4]
        assert head[0].startswith("# grid:")
        assert "norm_estimate: 1" in head[2].replace("0.99999999999999", "1")

    def test_matrix_format_shape(self, tmp_path):
        out = tmp_path / "m.dat"
        code = invoke(
            "quad", "--xi", "1", "--q", "0", "--phi", "pi/2",
            "--grid", "-8:8:41", "--out", str(out),
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 4 + 41
        assert len(lines[4].split()) == 41

    def test_clipped_grid_exits_2(self, tmp_path):
        code = invoke(
            "quad", "--xi", "7", "--q", "2", "--phi", "0",
            "--grid", "-4:4:50", "--out", str(tmp_path / "x.dat"),
        )
        assert code == 2

    def test_missing_state_flags_exit_1(self):
        assert invoke("quad", "--xi", "1") == 1

    def test_print_config_exact(self, capsys):
        code = invoke("quad", "--preset", "fig1a", "--print-config")
        assert code == 0
        assert capsys.readouterr().out == preset_text("fig1a")

    def test_negative_q_relabeled(self, tmp_path):
        out_a = tmp_path / "a.dat"
        out_b = tmp_path / "b.dat"
        assert invoke("quad", "--xi", "1", "--q", "-2", "--phi", "0",
                      "--out", str(out_a)) == 0
        assert invoke("quad", "--xi", "1", "--q", "2", "--phi", "0",
                      "--out", str(out_b)) == 0
        assert "q=2" in out_a.read_text().splitlines()[3]


class TestEvolve:
    def test_preset_writes_csv_and_manifest(self, tmp_path):
        out = tmp_path / "s.csv"
        code = invoke("evolve", "--preset", "fig4-caption", "--out", str(out))
        assert code == 0
        header = out.read_text().splitlines()[0]
        assert header.startswith("lambda_t,alpha,inversion")
        manifest = json.loads((tmp_path / "s.manifest.json").read_text())
        assert manifest["config"]["q"] == 1
        assert "wall_seconds" in manifest

    def test_missing_out_exits_1(self, capsys):
        assert invoke("evolve", "--preset", "fig5a") == 1
        assert "usage" in capsys.readouterr().err

    def test_config_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("xi = 1\nq = 1\nphi = pi/2\nt_max = 2\nsamples = 9\n")
        out = tmp_path / "series.csv"
        assert invoke("evolve", "--config", str(cfg), "--out", str(out)) == 0
        assert len(out.read_text().splitlines()) == 10

    def test_bad_config_exits_1(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("samples = 1\nunknown = 3\n")
        assert invoke("evolve", "--config", str(cfg), "--out", str(tmp_path / "o")) == 1

    def test_missing_config_file_exits_3(self, tmp_path):
        assert invoke(
            "evolve", "--config", str(tmp_path / "absent.cfg"),
            "--out", str(tmp_path / "o.csv"),
        ) == 3

    def test_sweep_writes_per_point_files(self, tmp_path):
        cfg = tmp_path / "sw.cfg"
        cfg.write_text(
            "q = 1\nphi = pi/2\nt_max = 2\nsamples = 9\nsweep = xi: 1, 2\n"
        )
        out = tmp_path / "sw.csv"
        assert invoke("evolve", "--config", str(cfg), "--out", str(out)) == 0
        assert (tmp_path / "sw.xi-1.csv").exists()
        assert (tmp_path / "sw.xi-2.csv").exists()
        assert (tmp_path / "sw.xi-1.manifest.json").exists()

    def test_json_export(self, tmp_path):
        out = tmp_path / "s.csv"
        jout = tmp_path / "s.json"
        cfg = tmp_path / "run.cfg"
        cfg.write_text("xi = 1\nq = 1\nphi = 0\nt_max = 1\nsamples = 5\n")
        assert invoke(
            "evolve", "--config", str(cfg), "--out", str(out), "--json", str(jout)
        ) == 0
        payload = json.loads(jout.read_text())
        assert "lambda_t" in payload and "manifest" in payload

    def test_threads_do_not_change_bytes(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        cfg = tmp_path / "run.cfg"
        cfg.write_text("xi = 5\nq = 1\nphi = pi/2\nt_max = 3\nsamples = 31\n")
        assert invoke("evolve", "--config", str(cfg), "--out", str(a),
                      "--threads", "1") == 0
        assert invoke("evolve", "--config", str(cfg), "--out", str(b),
                      "--threads", "4") == 0
        assert a.read_bytes() == b.read_bytes()


class TestSelftest:
    def test_list(self, capsys):
        assert invoke("selftest", "--list") == 0
        out = capsys.readouterr().out
        assert "oracle-equivalence" in out
        assert "eigenstate-residuals" in out


class TestReport:
    def test_raster_report(self, tmp_path):
        out = tmp_path / "rep"
        assert invoke("report", "--preset", "fig1a", "--out", str(out)) == 0
        assert (out / "fig1a.dat").exists()
        assert (out / "fig1a.png").stat().st_size > 1000

    def test_series_report(self, tmp_path):
        out = tmp_path / "rep"
        assert invoke("report", "--preset", "fig4-caption", "--out", str(out)) == 0
        assert (out / "fig4-caption.csv").exists()
        assert (out / "fig4-caption.manifest.json").exists()
        assert (out / "fig4-caption.png").stat().st_size > 1000


class TestTopLevel:
    def test_no_command_exits_1(self):
        assert invoke() == 1

    def test_unknown_flag_exits_1(self):
        assert invoke("quad", "--nope") == 1

    def test_bad_threads_exit_1(self):
        assert invoke("quad", "--xi", "1", "--q", "0", "--phi", "0",
                      "--threads", "0") == 1
