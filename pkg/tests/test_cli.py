import json
import subprocess
import sys

import pytest

from omring.cli import run, serialize
from omring import get_preset, build_bare, sweep

EXPECTED_HEADER = ("omega,omega_norm,T_R,T_L,R_R,R_L,"
                   "S_R_th,S1,S2,S_R_vac,S_R_out,isolation_db")

GOOD_CONFIG = """
omega_m  = 5.0
kappa_ex = 1.0
delta_0  = 5.0
j_s      = 0.1
j_m      = 0.01
gamma_0  = 5e-4
gamma_in = 5e-8
g_r      = 0.1+0j
n_th     = 1e5
"""

UNSTABLE_CONFIG = """
omega_m  = 0.1
kappa_ex = 1.0
delta_0  = 0.1
j_s      = 1.0
j_m      = 0.0002
gamma_0  = 1e-5
gamma_in = 1e-9
g_r      = 0.01+0j
n_th     = 1e5
"""


def read_stderr_json(capsys):
    err = capsys.readouterr().err.strip()
    return json.loads(err.splitlines()[-1])


class TestRunContract:
    def test_preset_csv_with_sidecar(self, tmp_path, capsys):
        out = tmp_path / "fig2_two.csv"
        code = run(["--preset", "fig2_two", "--format", "csv",
                    "--output", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == EXPECTED_HEADER
        assert len(lines) > 4000
        sidecar = json.loads((tmp_path / "fig2_two.csv.config.json").read_text())
        assert sidecar["preset"] == "fig2_two"
        assert sidecar["config"]["omega_m"] == 5.0
        assert sidecar["config"]["g_l_mode"] == "derived"
        assert sidecar["stable"] == {"bare": True}

    def test_values_have_full_precision(self, tmp_path):
        out = tmp_path / "x.csv"
        run(["--preset", "fig2_one", "--point", "omega=omega_m",
             "--output", str(out)])
        row = out.read_text().splitlines()[1].split(",")
        t_r = float(row[2])
        assert format(t_r, ".17g") == row[2]

    def test_point_mode_amplifies(self, tmp_path):
        out = tmp_path / "pt.csv"
        code = run(["--preset", "fig4_two", "--point", "omega=omega_m-J_m",
                    "--output", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2            # header + one row
        t_r = float(lines[1].split(",")[2])
        assert t_r > 1.0

    def test_point_symbols(self, tmp_path):
        for expr in ("omega_m", "omega_m+J_m", "4.995", "omega = omega_m - J_m"):
            assert run(["--preset", "fig2_two", "--point", expr,
                        "--output", str(tmp_path / "p.csv")]) == 0

    def test_unknown_config_key_exit_3(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text(GOOD_CONFIG + "\nj_z = 1.0\n")
        assert run(["--config", str(bad)]) == 3
        err = read_stderr_json(capsys)
        assert err["error"] == "config"
        assert "j_z" in err["message"]

    def test_unknown_preset_exit_3(self, capsys):
        assert run(["--preset", "fig9"]) == 3

    def test_missing_source_exit_3(self, capsys):
        assert run(["--format", "csv"]) == 3

    def test_unstable_exit_2_and_override(self, tmp_path, capsys):
        cfgfile = tmp_path / "hot.cfg"
        cfgfile.write_text(UNSTABLE_CONFIG)
        assert run(["--config", str(cfgfile), "--point", "omega_m"]) == 2
        err = read_stderr_json(capsys)
        assert err["error"] == "unstable"
        out = tmp_path / "hot.csv"
        assert run(["--config", str(cfgfile), "--point", "omega_m",
                    "--allow-unstable", "--output", str(out)]) == 0

    def test_numerical_failure_exit_4(self, tmp_path, capsys):
        # undamped mechanical mode probed exactly on resonance
        cfgfile = tmp_path / "sing.cfg"
        cfgfile.write_text("omega_m = 5.0\nkappa_ex = 1.0\ndelta_0 = 5.0\n"
                           "g_r = 0+0j\ngamma_in = 0\n")
        code = run(["--config", str(cfgfile), "--point", "omega_m",
                    "--allow-unstable"])
        assert code == 4
        err = read_stderr_json(capsys)
        assert err["error"] == "numerical"
        assert err["omega"] == 5.0

    def test_byte_identical_reruns(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(["--preset", "fig2_two", "--output", str(a)])
        run(["--preset", "fig2_two", "--output", str(b)])
        assert a.read_bytes() == b.read_bytes()
        sa = (tmp_path / "a.csv.config.json").read_bytes()
        sb = (tmp_path / "b.csv.config.json").read_bytes()
        assert sa == sb

    def test_json_format(self, tmp_path):
        out = tmp_path / "fig2.json"
        code = run(["--preset", "fig2_two", "--format", "json", "--point",
                    "omega_m", "--output", str(out)])
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["preset"] == "fig2_two"
        assert doc["results"]["bare"]["columns"][:2] == ["omega", "omega_norm"]
        assert len(doc["results"]["bare"]["rows"]) == 1

    def test_grid_override(self, tmp_path):
        out = tmp_path / "g.csv"
        # `=` form keeps argparse from reading the leading minus as a flag
        code = run(["--preset", "fig2_two", "--grid=-30:-10:101:gamma_m",
                    "--output", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 102
        first = float(lines[1].split(",")[1])
        assert first == pytest.approx(-30.0)

    def test_bad_grid_exit_3(self, capsys):
        assert run(["--preset", "fig2_two", "--grid", "1:2"]) == 3
        assert run(["--preset", "fig2_two", "--grid", "1:2:10:parsec"]) == 3

    def test_supermode_columns(self, tmp_path):
        out = tmp_path / "sm.csv"
        run(["--preset", "fig2_two", "--basis", "supermode", "--point",
             "omega_m", "--output", str(out)])
        header = out.read_text().splitlines()[0]
        assert "S_plus" in header and "S_minus" in header
        assert "S1" not in header.split(",")

    def test_both_bases_combined(self, tmp_path):
        out = tmp_path / "both.csv"
        code = run(["--preset", "fig2_two", "--basis", "both", "--point",
                    "omega_m-J_m", "--output", str(out)])
        assert code == 0
        header = out.read_text().splitlines()[0].split(",")
        assert header[:12] == EXPECTED_HEADER.split(",")
        assert "T_R_sm" in header and "S_plus" in header

    def test_dump_matrices(self, tmp_path):
        out = tmp_path / "d.csv"
        run(["--preset", "fig2_two", "--point", "omega_m",
             "--dump-matrices", "--output", str(out)])
        doc = json.loads((tmp_path / "d.csv.matrices.json").read_text())
        m = doc["bare"]["m"]
        assert len(m) == 8 and len(m[0]) == 8 and len(m[0][0]) == 2
        assert len(doc["bare"]["input_map"]) == 8
        ids = [ch["id"] for ch in doc["bare"]["channels"]]
        assert "mech_common" in ids

    def test_verify_report(self, tmp_path):
        out = tmp_path / "v.csv"
        code = run(["--preset", "fig2_two", "--point", "omega_m",
                    "--verify", "--output", str(out)])
        assert code == 0
        doc = json.loads((tmp_path / "v.csv.verify.json").read_text())
        assert doc["bare"]["stable"] is True
        assert doc["bare"]["lyapunov_residual"] < 1e-7
        assert doc["bare"]["parseval_max_mismatch"] < 1e-3
        assert doc["basis_consistency_max_dev"] < 0.01

    def test_outdir_env_override(self, tmp_path, monkeypatch):
        monkeypatch.setenv("OMRING_OUTDIR", str(tmp_path))
        assert run(["--preset", "fig2_one", "--point", "omega_m",
                    "--output", "sub/point.csv"]) == 0
        assert (tmp_path / "sub" / "point.csv").exists()

    def test_signal_injection(self, tmp_path):
        quiet = tmp_path / "q.csv"
        loud = tmp_path / "l.csv"
        run(["--preset", "fig2_two", "--point", "omega_m-J_m", "--output", str(quiet)])
        run(["--preset", "fig2_two", "--point", "omega_m-J_m", "--signal",
             "right", "--output", str(loud)])
        col = EXPECTED_HEADER.split(",").index("S_R_out")
        s_quiet = float(quiet.read_text().splitlines()[1].split(",")[col])
        s_loud = float(loud.read_text().splitlines()[1].split(",")[col])
        assert s_loud > s_quiet


class TestGoldenRegression:
    # frozen reference output; a numerics-affecting change must regenerate
    # these files deliberately (the diff is the acknowledgment)
    @pytest.mark.parametrize("name", ["fig2_two", "fig4_two"])
    def test_serialized_output_matches_golden_file(self, name):
        from pathlib import Path
        cfg = get_preset(name).config
        points = [cfg.omega_m + f * cfg.j_m for f in (-1.0, -0.5, 0.0, 0.5, 1.0)]
        bundle = sweep(build_bare(cfg), cfg, points)
        golden = Path(__file__).parent / "golden" / f"{name}_points.csv"
        assert serialize(bundle, "csv") == golden.read_bytes()


class TestSerialize:
    def test_empty_grid_header_only(self):
        cfg = get_preset("fig2_two").config
        bundle = sweep(build_bare(cfg), cfg, [])
        data = serialize(bundle, "csv").decode()
        assert data == EXPECTED_HEADER + "\n"

    def test_single_point_single_row(self):
        cfg = get_preset("fig2_two").config
        bundle = sweep(build_bare(cfg), cfg, [cfg.omega_m])
        lines = serialize(bundle, "csv").decode().splitlines()
        assert len(lines) == 2

    def test_json_mirrors_columns(self):
        cfg = get_preset("fig2_two").config
        bundle = sweep(build_bare(cfg), cfg, [cfg.omega_m])
        doc = json.loads(serialize(bundle, "json").decode())
        assert doc["columns"] == list(EXPECTED_HEADER.split(","))
        assert len(doc["rows"][0]) == len(doc["columns"])


def test_console_entry_point_smoke(tmp_path):
    out = tmp_path / "smoke.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "omring", "--preset", "fig2_one",
         "--point", "omega=omega_m", "--output", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert out.read_text().splitlines()[0] == EXPECTED_HEADER
