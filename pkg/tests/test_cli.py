"""Command-line driver: subcommands, overrides, file outputs, exit codes."""

import csv

import pytest

from mecsim.cli import main

TRACE_HEADER = ("slot,device,queue_bits,arrival_bits,H_linear,f_hz,p_tx_w,"
                "alpha,D_l_bits,D_r_bits,P_total_w")


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_writes_summary_and_echo(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--override", "T=40", "--out-dir", str(out)])
    assert rc == 0
    assert "avg_power_w=" in capsys.readouterr().out
    rows = _rows(out / "summary.csv")
    assert len(rows) == 1
    assert rows[0]["policy"] == "lyapunov"
    assert rows[0]["horizon_slots"] == "40"
    echo = (out / "config_echo.yaml").read_text()
    assert "horizon_slots: 40" in echo
    assert not (out / "trace.csv").exists()


def test_run_trace_has_pinned_header(tmp_path):
    out = tmp_path / "out"
    rc = main(["run", "--override", "T=7", "--trace", "--out-dir", str(out)])
    assert rc == 0
    lines = (out / "trace.csv").read_text().splitlines()
    assert lines[0].startswith("# config_hash=")
    assert "seed=1" in lines[0]
    assert lines[1] == TRACE_HEADER
    assert len(lines) == 2 + 7 * 5  # comment + header + slot*device rows


def test_identical_invocations_are_byte_identical(tmp_path):
    args = ["run", "--override", "T=40", "--trace"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--out-dir", str(a)]) == 0
    assert main(args + ["--out-dir", str(b)]) == 0
    for name in ("summary.csv", "trace.csv", "config_echo.yaml"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_overrides_and_seed_flag(tmp_path):
    out = tmp_path / "out"
    rc = main(["run", "--override", "T=5", "--override", "N=3",
               "--override", "device.A_max_kbits=2.0", "--seed", "9",
               "--out-dir", str(out)])
    assert rc == 0
    row = _rows(out / "summary.csv")[0]
    assert row["seed"] == "9"
    assert "avg_queue_bits_2" in row and "avg_queue_bits_3" not in row
    echo = (out / "config_echo.yaml").read_text()
    assert "A_max_kbits: 2.0" in echo


def test_override_accepts_dotless_exponents(tmp_path):
    # YAML alone would read '2e9' as a string
    out = tmp_path / "out"
    rc = main(["run", "--override", "V=2e9", "--override", "T=5",
               "--out-dir", str(out)])
    assert rc == 0
    assert _rows(out / "summary.csv")[0]["V_bits2_per_W"] == "2000000000.0"


def test_run_loads_packaged_presets(tmp_path):
    rc = main(["run", "--config", "fig4_a8k_n5", "--override", "T=5",
               "--out-dir", str(tmp_path / "p1")])
    assert rc == 0
    rc = main(["run", "--config", "fig4_a4k_n10.yaml", "--override", "T=5",
               "--out-dir", str(tmp_path / "p2")])
    assert rc == 0
    row = _rows(tmp_path / "p2" / "summary.csv")[0]
    assert "avg_queue_bits_9" in row


def test_sweep_outputs(tmp_path, capsys):
    out = tmp_path / "sweep"
    rc = main(["sweep", "--override", "T=30", "--v-list", "1e8,1e9",
               "--seeds", "2", "--gnuplot", "--out-dir", str(out)])
    assert rc == 0
    assert "wrote" in capsys.readouterr().out
    rows = _rows(out / "sweep.csv")
    assert len(rows) == 4
    assert [r["seed"] for r in rows] == ["1", "2", "1", "2"]
    avg = _rows(out / "sweep_avg.csv")
    assert len(avg) == 2
    assert avg[0]["seeds"] == "2"
    assert "sweep_avg.csv" in (out / "sweep.gp").read_text()


def test_sweep_accepts_log_grid(tmp_path):
    out = tmp_path / "sweep"
    rc = main(["sweep", "--override", "T=10", "--v-list", "log:1e8:1e9:3",
               "--policy", "static_equal", "--out-dir", str(out)])
    assert rc == 0
    assert len(_rows(out / "sweep_avg.csv")) == 3


def test_compare_outputs(tmp_path):
    out = tmp_path / "cmp"
    rc = main(["compare", "--override", "T=20", "--v-list", "1e9",
               "--out-dir", str(out)])
    assert rc == 0
    rows = _rows(out / "compare.csv")
    assert [r["policy"] for r in rows] == ["local_only", "lyapunov"]


def test_verify_battery_passes(tmp_path, capsys):
    rc = main(["verify", "--instances", "4", "--out-dir", str(tmp_path)])
    out = capsys.readouterr().out
    assert rc == 0
    assert out.count("PASS") == 5
    assert "all checks passed" in out


@pytest.mark.parametrize("args", [
    ["run", "--config", "no_such_preset"],
    ["run", "--override", "T"],
    ["run", "--override", "nonsense=1"],
    ["run", "--override", "system.bogus_knob=1"],
    ["sweep", "--v-list", "log:0:1e9:3"],
    ["sweep", "--v-list", "abc"],
    ["compare", "--policy", "lyapunov"],
    ["compare", "--policy", "lyapunov,greedy"],
])
def test_config_errors_exit_one(tmp_path, capsys, args):
    rc = main(args + ["--out-dir", str(tmp_path / "x"), "--override", "T=5"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_unknown_policy_message_lists_names(tmp_path, capsys):
    rc = main(["compare", "--policy", "lyapunov,greedy", "--override", "T=5",
               "--out-dir", str(tmp_path / "x")])
    assert rc == 1
    assert "local_only, lyapunov, static_equal" in capsys.readouterr().err


def test_unwritable_out_dir_exits_two(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory\n")
    rc = main(["run", "--override", "T=5", "--out-dir", str(blocker)])
    assert rc == 2
    assert "error" in capsys.readouterr().err
