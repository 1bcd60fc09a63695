import subprocess
import sys

import numpy as np
import pytest

from gatrack import cli
from gatrack.checks import CHECKS
from gatrack.errors import NumericFailure
from gatrack.sim import PLOT_FILES


def simulate(tmp_path, *extra):
    return cli.main(["simulate", "--out", str(tmp_path / "run"), *extra])


def test_flip_run_writes_outputs(tmp_path, capsys):
    assert simulate(tmp_path, "--scenario", "flip", "--t-end", "0.3") == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "rms_xi_err" in out and "bound_violations  0" in out
    files = {p.name for p in (tmp_path / "run").iterdir()}
    assert files == set(PLOT_FILES) | {"telemetry.csv"}
    lines = (tmp_path / "run" / "telemetry.csv").read_text().splitlines()
    assert len(lines) == 302


def test_flags_reach_the_config(tmp_path):
    args = cli.build_parser().parse_args(
        ["simulate", "--scenario", "rhodonea", "--dt", "0.002", "--t-end", "1", "--seed", "5",
         "--wind", "off", "--drag", "on", "--wind-coupling", "direct-force"])
    cfg = cli.resolve_config(args)
    assert (cfg.dt, cfg.t_end, cfg.disturbance.dryden.seed) == (0.002, 1.0, 5)
    assert not cfg.disturbance.wind and cfg.disturbance.drag
    assert cfg.disturbance.coupling.value == "direct-force"


def test_seed_flag_changes_telemetry(tmp_path):
    for seed in ("1", "2"):
        assert cli.main(["simulate", "--scenario", "flip", "--t-end", "0.1", "--seed", seed,
                         "--out", str(tmp_path / seed)]) == 0
    a = (tmp_path / "1" / "telemetry.csv").read_bytes()
    b = (tmp_path / "2" / "telemetry.csv").read_bytes()
    assert a != b


@pytest.mark.parametrize("argv", [
    ["simulate"],
    ["simulate", "--scenario", "loop"],
    ["simulate", "--scenario", "flip", "--wind", "maybe"],
    ["simulate", "--scenario", "flip", "--dt", "0.5"],
    ["simulate", "--scenario", "flip", "--seed", "-3"],
    ["simulate", "--scenario", "custom"],
    ["simulate", "--scenario", "flip", "--trajectory", "x.csv"],
    ["simulate", "--scenario", "flip", "--config", "/nonexistent.toml"],
    ["bench-rotate", "--n", "0"],
    ["frobnicate"],
])
def test_usage_errors_exit_1(argv):
    # argparse failures raise SystemExit; configuration failures return the code
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == cli.EXIT_USAGE


def test_config_scenario_mismatch(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('scenario = "rhodonea"\nt_end = 0.1\n')
    assert cli.main(["simulate", "--scenario", "flip", "--config", str(cfg)]) == cli.EXIT_USAGE
    assert simulate(tmp_path, "--scenario", "rhodonea", "--config", str(cfg)) == cli.EXIT_OK


def test_custom_trajectory(tmp_path, capsys):
    t = np.linspace(0.0, 2.0, 41)
    x = 0.5 * (1 - np.cos(np.pi * t / 2.0))  # starts and ends at rest
    path = tmp_path / "traj.csv"
    path.write_text("t,x,y,z\n" + "".join(f"{a},{b},0,-1\n" for a, b in zip(t, x)))
    assert simulate(tmp_path, "--scenario", "custom", "--trajectory", str(path)) == cli.EXIT_OK
    rows = np.loadtxt(tmp_path / "run" / "telemetry.csv", delimiter=",", skiprows=1)
    assert rows[-1, 0] == pytest.approx(2.0)
    assert capsys.readouterr().out.count("scenario          custom") == 1


def test_invariant_violation_exit_2(tmp_path):
    t = np.linspace(0.0, 1.0, 11)
    path = tmp_path / "traj.csv"
    path.write_text("t,x,y,z\n" + "".join(f"{a},0,0,-1\n" for a in t))
    cfg = tmp_path / "c.toml"
    cfg.write_text(f'scenario = "custom"\nt_end = 2.0\n[trajectory]\nkind = "custom"\n'
                   f'file = "{path.name}"\n')
    assert simulate(tmp_path, "--scenario", "custom", "--config", str(cfg)) == cli.EXIT_INVARIANT


def test_numeric_failure_exit_3(tmp_path, monkeypatch):
    import gatrack.sim

    def boom(cfg, strict=True):
        raise NumericFailure("non-finite telemetry", 7, "x")

    monkeypatch.setattr(gatrack.sim, "run_scenario", boom)
    assert simulate(tmp_path, "--scenario", "flip") == cli.EXIT_NUMERIC


def test_bench_rotate(capsys):
    assert cli.main(["bench-rotate", "--n", "20000", "--chunk", "5000"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "sandwich" in out and "matrix" in out


def test_check_subcommand(capsys):
    assert cli.main(["check"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert out.count("[PASS]") == len(CHECKS)


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "gatrack", "simulate", "--scenario", "flip",
                          "--t-end", "0.05", "--out", str(tmp_path / "m")],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "m" / "position.csv").exists()
