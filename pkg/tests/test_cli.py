import subprocess
import sys

import numpy as np
import pytest

from floquet_cg import cli
from floquet_cg.cli import ConfigError, main, parse_config, read_csv, run, to_csv
from floquet_cg.models import CIRCULAR, BlochSeries

SMALL = """
preset = fig2
[run]
methods = exact, dcg, pcg, bms, bmu
tmax = 2
points = 9
"""


def test_preset_expansion_and_override():
    cfg = parse_config("preset = fig4\nbath.beta = 2   # colder\n[run]\npoints = 5\n")
    assert cfg.scenario.kind == CIRCULAR
    assert cfg.scenario.bath.beta == 2.0
    assert cfg.scenario.p == 0.5
    assert cfg.points == 5 and cfg.tmax == 20.0
    assert cfg.methods == ("dcg", "pcg", "bms", "bmu")


def test_full_config_without_preset():
    text = """
[scenario]
kind = circular
omega = 2
p = 0.5+0.1i
rho0 = 0, 0, 1
[bath]
gamma0 = 0.05
omega_c = 15
beta = 0.1
[run]
methods = cg:tau=0.5, longterm
tmax = 1
"""
    cfg = parse_config(text)
    assert cfg.scenario.p == 0.5 + 0.1j
    assert cfg.points == 200
    assert cfg.t_grid[-1] == 1.0


@pytest.mark.parametrize(
    "text,msg",
    [
        ("preset = fig2\n[run]\nmethods = ,\n", "at least one method"),
        ("preset = fig2\n[bath]\ncolour = red\n", "line 3: unknown key bath.colour"),
        ("preset = fig4\n[run]\nmethods = exact\n", "only available"),
        ("preset = fig2\n[run]\npoints = 1\n", "points must be >= 2"),
        ("preset = fig2\n[run]\ntmax = -1\n", "tmax must be > 0"),
        ("preset = fig2\n[run]\nmethods = bms, bms\n", "duplicates"),
        ("preset = fig2\n[bath]\nbeta = 1\nbeta = 2\n", "duplicate key"),
        ("preset = fig9\n", "unknown preset"),
        ("[scenario]\nkind = circular\n", "missing required key"),
        ("preset = fig2\n[scenario]\nrho0 = 1, 0\n", "three components"),
        ("preset = fig2\n[scenario]\nomega = fast\n", "not a valid float"),
        ("preset = fig2\n[other]\n", "unknown section"),
        ("tmax = 3\n", "outside of a section"),
        ("preset = fig2\n[bath]\nbeta = 0\n", "bath:"),
        ("preset = fig2\n[scenario]\nexact_floquet = maybe\n", "not a boolean"),
    ],
)
def test_config_errors(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config(text)


def test_csv_round_trip_exact():
    t = np.linspace(0, 1, 4)
    s = BlochSeries(t, np.cos(t) / 3, np.sin(t) / 3, np.full_like(t, 1 / 7), "bms")
    back = read_csv(to_csv([s]))["bms"]
    for a, b in zip(back, (s.t, s.x, s.y, s.z)):
        assert np.array_equal(a, b)
    with pytest.raises(Exception):
        read_csv("a,b\n")


def test_run_deterministic_and_consistent(tmp_path):
    cfg = parse_config(SMALL)
    out = tmp_path / "a.csv"
    csv1, report, failures = run(cfg, out)
    csv2, _, _ = run(cfg)
    assert not failures
    assert csv1 == csv2 == out.read_bytes().decode()
    assert (tmp_path / "a.csv.report.txt").read_text() == report
    data = read_csv(csv1)
    assert sorted(data) == ["bms", "bmu", "dcg", "exact", "pcg"]
    for k in range(1, 4):
        assert np.array_equal(data["bms"][k], data["bmu"][k])
        assert np.max(np.abs(data["dcg"][k] - data["exact"][k])) < 1e-3
    assert "bms vs bmu: |dsx| = 0.000000e+00" in report


def test_dcg_pcg_meet_at_period(tmp_path):
    text = "preset = fig2\n[run]\nmethods = dcg, pcg\ntmax = 0.6283185307179586\npoints = 2\n"
    data = read_csv(run(parse_config(text))[0])
    for k in range(1, 4):
        assert abs(data["dcg"][k][-1] - data["pcg"][k][-1]) < 1e-9


def test_main_run_and_relative_paths(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(SMALL + "output = res.csv\n")
    assert main(["run", "--config", str(cfg)]) == 0
    assert (tmp_path / "res.csv").exists()
    assert (tmp_path / "res.csv.report.txt").exists()
    # stdout mode
    cfg.write_text(SMALL)
    assert main(["run", "--config", str(cfg)]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("t,method,sx,sy,sz\n")
    assert "pairwise max deviations" in captured.err


def test_main_errors(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("preset = fig2\n[bath]\nwhat = 1\n")
    assert main(["run", "--config", str(bad)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_method_failure_exit_code(tmp_path, monkeypatch):
    from floquet_cg.config import ConsistencyError

    real = cli.simulate

    def flaky(sc, method, t):
        if method == "pcg":
            raise ConsistencyError("forced")
        return real(sc, method, t)

    monkeypatch.setattr(cli, "simulate", flaky)
    cfg = parse_config(SMALL)
    csv_text, report, failures = run(cfg)
    assert list(failures) == ["pcg"]
    assert "pcg" not in read_csv(csv_text)
    assert "failed methods" in report
    path = tmp_path / "c.cfg"
    path.write_text(SMALL)
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o.csv")]) == 1


def test_list_presets(capsys):
    assert main(["list-presets"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert [line.split()[0] for line in out] == ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "circular_fast", "circular_slow"]


def test_verify_preset(capsys):
    assert main(["verify", "--preset", "fig4"]) == 0
    out = capsys.readouterr().out
    assert "fig4: PASS" in out and "[FAIL]" not in out


def test_verify_unknown_preset():
    with pytest.raises(SystemExit):
        main(["verify", "--preset", "fig9"])


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "floquet_cg", "list-presets"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("fig2")
