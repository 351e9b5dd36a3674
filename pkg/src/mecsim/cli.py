"""Experiment driver: single runs, control-weight sweeps, policy
comparisons, and ad-hoc solver certification.

All outputs are plain CSV (plus an optional gnuplot script) with no
timestamps or environment-dependent content, so identical invocations
produce byte-identical files.  Exit codes: 0 success, 1 configuration
error, 2 runtime/solver error.
"""

from __future__ import annotations

import argparse
import copy
import csv
import os
import sys
from importlib.resources import files
from typing import Optional, Sequence

import numpy as np
import yaml

from mecsim.baselines import POLICIES, make_policy
from mecsim.controller import (
    bandwidth_allocation,
    cpu_frequency,
    marginal_rate,
    solve_offloading,
    transmit_power,
)
from mecsim.model import (
    ConfigError,
    ParsedConfig,
    parse_config,
    pathloss,
    remote_departure,
)
from mecsim.oracle import (
    fd_marginal_rate,
    grid_bandwidth,
    grid_cpu_frequency,
    grid_offloading,
    grid_tx_power,
    offloading_grid_slack,
)
from mecsim.simulator import SimulationError, Simulator, summarize

__all__ = ["main"]

_OVERRIDE_ALIASES = {
    "V": ("system", "V_bits2_per_W"),
    "T": ("system", "horizon_slots"),
    "N": ("system", "num_devices"),
    "seed": ("system", "seed"),
}

_DEFAULT_V_LIST = "log:1e6:5e9:20"


# ---------------------------------------------------------------------------
# config loading
# ---------------------------------------------------------------------------

def _read_config_text(path: Optional[str]) -> str:
    presets = files("mecsim").joinpath("configs")
    if path is None:
        return presets.joinpath("default.yaml").read_text()
    if os.path.exists(path):
        with open(path) as fh:
            return fh.read()
    # bare preset names resolve to packaged configs
    name = path if path.endswith(".yaml") else path + ".yaml"
    res = presets.joinpath(name)
    if res.is_file():
        return res.read_text()
    raise ConfigError("--config", f"no such file or packaged preset: {path}")


def _apply_override(raw: dict, key: str, value_text: str) -> None:
    value = yaml.safe_load(value_text)
    if isinstance(value, str):
        # YAML reads dotless exponents like '2e9' as strings; every config
        # scalar is numeric, so prefer the numeric reading when it exists
        try:
            value = float(value)
        except ValueError:
            pass
    if key in _OVERRIDE_ALIASES:
        block, field = _OVERRIDE_ALIASES[key]
        raw.setdefault(block, {})[field] = value
        return
    if "." not in key:
        raise ConfigError(key, "override key must be an alias (V, T, N, seed) "
                               "or take the form system.X / device.X")
    block, field = key.split(".", 1)
    if block == "system":
        raw.setdefault("system", {})[field] = value
    elif block == "device":
        dev = raw.get("devices")
        if isinstance(dev, list):
            for entry in dev:
                entry[field] = value
        elif isinstance(dev, dict):
            dev[field] = value
        else:
            raise ConfigError("devices", "cannot apply device override: "
                                         "missing devices block")
    else:
        raise ConfigError(key, "override block must be 'system' or 'device'")


def _resize_devices(raw: dict) -> None:
    # an N override may leave a device list with the wrong length; replicate
    # a uniform fleet, refuse to guess for a heterogeneous one
    n = raw.get("system", {}).get("num_devices")
    dev = raw.get("devices")
    if not isinstance(n, int) or not isinstance(dev, list) or len(dev) == n:
        return
    if all(entry == dev[0] for entry in dev):
        raw["devices"] = [copy.deepcopy(dev[0]) for _ in range(n)]
    else:
        raise ConfigError(
            "num_devices",
            f"cannot resize a heterogeneous device list from {len(dev)} to {n}")


def _load_config(args) -> ParsedConfig:
    raw = yaml.safe_load(_read_config_text(args.config))
    for item in args.override or []:
        if "=" not in item:
            raise ConfigError("--override", f"expected KEY=VALUE, got {item!r}")
        key, _, val = item.partition("=")
        _apply_override(raw, key.strip(), val.strip())
    if args.seed is not None:
        raw.setdefault("system", {})["seed"] = args.seed
    _resize_devices(raw)
    return parse_config(raw)


def _reparse_with(parsed: ParsedConfig, v: Optional[float] = None,
                  seed: Optional[int] = None) -> ParsedConfig:
    raw = copy.deepcopy(parsed.raw)
    if v is not None:
        raw["system"]["V_bits2_per_W"] = float(v)
    if seed is not None:
        raw["system"]["seed"] = int(seed)
    return parse_config(raw)


def _parse_v_list(text: str) -> list[float]:
    if text.startswith("log:"):
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError("--v-list",
                              "log form is log:START:STOP:COUNT")
        start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
        if start <= 0 or stop <= 0 or count < 1:
            raise ConfigError("--v-list", "log endpoints must be positive")
        return [float(x) for x in np.geomspace(start, stop, count)]
    try:
        vs = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError("--v-list", f"could not parse {text!r}") from None
    if not vs:
        raise ConfigError("--v-list", "list is empty")
    return vs


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: str, rows: Sequence[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(rows[0].keys())
        for row in rows:
            writer.writerow([_fmt(v) for v in row.values()])


def _write_trace(path: str, result) -> None:
    tr = result.trace
    t_total, n = tr.queue_bits.shape
    with open(path, "w", newline="") as fh:
        fh.write(f"# config_hash={result.config_digest} seed={result.seed}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["slot", "device", "queue_bits", "arrival_bits",
                         "H_linear", "f_hz", "p_tx_w", "alpha", "D_l_bits",
                         "D_r_bits", "P_total_w"])
        for t in range(t_total):
            for i in range(n):
                writer.writerow([
                    t, i,
                    _fmt(float(tr.queue_bits[t, i])),
                    _fmt(float(tr.arrival_bits[t, i])),
                    _fmt(float(tr.gain_linear[t, i])),
                    _fmt(float(tr.freq_hz[t, i])),
                    _fmt(float(tr.tx_power_w[t, i])),
                    _fmt(float(tr.bw_frac[t, i])),
                    _fmt(float(tr.local_bits[t, i])),
                    _fmt(float(tr.remote_bits[t, i])),
                    _fmt(float(tr.total_power_w[t])),
                ])


def _write_config_echo(path: str, parsed: ParsedConfig) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(parsed.raw, fh, sort_keys=True)


def _write_gnuplot(path: str, data_csv: str) -> None:
    # columns of the *_avg.csv files:
    # 1 policy, 2 V, 3 seeds, 4 avg_power_w, 5 sum_avg_queue_bits,
    # 6 delay_slots, 7 delay_ms, 8 max_final_queue_ratio
    name = os.path.basename(data_csv)
    lines = [
        "set datafile separator ','",
        "set key top left",
        "set logscale x",
        "set xlabel 'control weight V (bits^2/W)'",
        "set terminal pngcairo size 900,600",
        "set output 'power_vs_v.png'",
        "set ylabel 'average power (W)'",
        f"plot '{name}' skip 1 using 2:4 with linespoints title 'avg power'",
        "set output 'queue_vs_v.png'",
        "set ylabel 'sum of average queues (bits)'",
        f"plot '{name}' skip 1 using 2:5 with linespoints title 'avg backlog'",
        "unset logscale x",
        "set output 'power_vs_delay.png'",
        "set xlabel 'execution delay (ms)'",
        "set ylabel 'average power (W)'",
        f"plot '{name}' skip 1 using 7:4 with linespoints title 'tradeoff'",
        "",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines))


def _run_one(parsed: ParsedConfig, policy_name: str, trace: bool = False):
    policy = make_policy(policy_name, parsed.system, parsed.devices)
    sim = Simulator.from_parsed(parsed, policy)
    return sim.run(trace=trace)


def _sweep_rows(parsed: ParsedConfig, policy_names: Sequence[str],
                v_list: Sequence[float], seeds: Sequence[int]):
    rows = []
    groups = {}
    for policy_name in policy_names:
        for v in v_list:
            group = []
            for seed in seeds:
                res = _run_one(_reparse_with(parsed, v=v, seed=seed),
                               policy_name)
                rows.append(res.to_row())
                group.append(res)
            groups[(policy_name, v)] = summarize(group)
    rows.sort(key=lambda r: (r["policy"], r["V_bits2_per_W"], r["seed"]))
    avg_rows = [groups[k] for k in sorted(groups)]
    return rows, avg_rows


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    parsed = _load_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    result = _run_one(parsed, args.policy or "lyapunov", trace=args.trace)
    _write_csv(os.path.join(args.out_dir, "summary.csv"), [result.to_row()])
    _write_config_echo(os.path.join(args.out_dir, "config_echo.yaml"), parsed)
    if args.trace:
        _write_trace(os.path.join(args.out_dir, "trace.csv"), result)
    print(f"avg_power_w={result.avg_power_w:.9g} "
          f"delay_ms={result.delay_ms:.9g}")
    return 0


def _seed_list(parsed: ParsedConfig, count: int) -> list[int]:
    base = parsed.system.rng_seed
    return [base + k for k in range(count)]


def cmd_sweep(args) -> int:
    parsed = _load_config(args)
    v_list = _parse_v_list(args.v_list or _DEFAULT_V_LIST)
    seeds = _seed_list(parsed, args.seeds)
    policy = args.policy or "lyapunov"
    make_policy(policy, parsed.system, parsed.devices)  # fail fast on name
    os.makedirs(args.out_dir, exist_ok=True)
    rows, avg_rows = _sweep_rows(parsed, [policy], v_list, seeds)
    sweep_path = os.path.join(args.out_dir, "sweep.csv")
    _write_csv(sweep_path, rows)
    avg_path = os.path.join(args.out_dir, "sweep_avg.csv")
    _write_csv(avg_path, avg_rows)
    _write_config_echo(os.path.join(args.out_dir, "config_echo.yaml"), parsed)
    if args.gnuplot:
        _write_gnuplot(os.path.join(args.out_dir, "sweep.gp"), avg_path)
    print(f"wrote {sweep_path} ({len(rows)} rows) and {avg_path} "
          f"({len(avg_rows)} rows)")
    return 0


def cmd_compare(args) -> int:
    parsed = _load_config(args)
    names = [p.strip() for p in (args.policy or "lyapunov,local_only").split(",")
             if p.strip()]
    if len(names) < 2:
        raise ConfigError("--policy",
                          "compare needs at least two comma-separated "
                          f"policies out of: {', '.join(sorted(POLICIES))}")
    for name in names:
        make_policy(name, parsed.system, parsed.devices)  # fail fast
    v_list = _parse_v_list(args.v_list or _DEFAULT_V_LIST)
    seeds = _seed_list(parsed, args.seeds)
    os.makedirs(args.out_dir, exist_ok=True)
    rows, avg_rows = _sweep_rows(parsed, names, v_list, seeds)
    cmp_path = os.path.join(args.out_dir, "compare.csv")
    _write_csv(cmp_path, rows)
    avg_path = os.path.join(args.out_dir, "compare_avg.csv")
    _write_csv(avg_path, avg_rows)
    _write_config_echo(os.path.join(args.out_dir, "config_echo.yaml"), parsed)
    if args.gnuplot:
        _write_gnuplot(os.path.join(args.out_dir, "compare.gp"), avg_path)
    print(f"wrote {cmp_path} ({len(rows)} rows) and {avg_path} "
          f"({len(avg_rows)} rows)")
    return 0


def cmd_verify(args) -> int:
    parsed = _load_config(args)
    sys_ = parsed.system
    dev = parsed.devices[0]
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    n_inst = args.instances
    tau, w, n0 = sys_.slot_len, sys_.bandwidth, sys_.noise_psd
    kappa, eps = sys_.switched_cap, sys_.eps_bw
    base_gain = pathloss(sys_, dev.distance)
    failures = 0

    def report(ok: bool, label: str, detail: str) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
        if not ok:
            failures += 1

    def rand_inst(n: int):
        q = 10.0 ** rng.uniform(2.0, 6.0, n)
        h = base_gain * rng.exponential(1.0, n)
        v = 10.0 ** rng.uniform(6.0, 10.0)
        return q, h, v

    # frequency closed form vs dense grid
    worst = 0.0
    ok = True
    for _ in range(n_inst):
        q, _, v = rand_inst(1)
        f_star = float(cpu_frequency(q[0], v, tau, kappa, dev.cycles_per_bit,
                                     dev.f_max))
        f_grid, obj_grid = grid_cpu_frequency(q[0], v, tau, kappa,
                                              dev.cycles_per_bit, dev.f_max)
        obj_star = v * kappa * f_star ** 3 - q[0] * tau * f_star / dev.cycles_per_bit
        worst = max(worst, obj_star - obj_grid)
        ok = ok and obj_star <= obj_grid + 1e-12 * abs(obj_grid)
    report(ok, "cpu_frequency", f"dominates {n_inst} frequency grids "
                                f"(worst objective gap {worst:.3e})")

    # power closed form vs dense grid
    worst = 0.0
    ok = True
    for _ in range(n_inst):
        q, h, v = rand_inst(1)
        alpha = float(rng.uniform(eps, 1.0))
        p_star = float(transmit_power(q[0], alpha, h[0], v, tau, w, n0,
                                      dev.p_max))
        _, obj_grid = grid_tx_power(q[0], alpha, h[0], v, tau, w, n0,
                                    dev.p_max)
        obj_star = v * p_star - q[0] * remote_departure(alpha, p_star, h[0],
                                                        w, tau, n0)
        worst = max(worst, obj_star - obj_grid)
        ok = ok and obj_star <= obj_grid + 1e-12 * max(1.0, abs(obj_grid))
    report(ok, "transmit_power", f"dominates {n_inst} power grids "
                                 f"(worst objective gap {worst:.3e})")

    # marginal rate vs central finite difference
    worst = 0.0
    ok = True
    for _ in range(n_inst):
        q, h, _ = rand_inst(1)
        alpha = float(rng.uniform(0.05, 0.95))
        p = float(rng.uniform(0.01, dev.p_max))
        fd = fd_marginal_rate(alpha, p, h[0], w, tau, n0)
        mr = float(marginal_rate(alpha, p, h[0], w, tau, n0))
        rel = abs(mr - fd) / max(abs(fd), 1e-300)
        worst = max(worst, rel)
        ok = ok and rel < 1e-4
    report(ok, "marginal_rate", f"matches finite differences on {n_inst} "
                                f"points (worst relative error {worst:.3e})")

    # bandwidth allocation vs simplex grid at fixed powers
    worst = 0.0
    ok = True
    for _ in range(max(1, n_inst // 10)):
        n = int(rng.integers(2, 4))
        q, h, _v = rand_inst(n)
        p = rng.uniform(0.05, dev.p_max, n)
        alpha, _, _ = bandwidth_allocation(q, p, h, w, tau, n0, eps)
        val = float(np.sum(q * remote_departure(alpha, p, h, w, tau, n0)))
        _, val_grid = grid_bandwidth(q, p, h, w, tau, n0, eps,
                                     alpha_step=2e-3)
        slack = offloading_grid_slack(q, h, np.full(n, dev.p_max), w, tau,
                                      n0, eps, 2e-3)
        gap = val_grid - val
        worst = max(worst, gap - slack)
        ok = ok and val >= val_grid - slack - 1e-6 * abs(val_grid)
    report(ok, "bandwidth_allocation",
           "within grid slack of simplex enumeration "
           f"(worst excess {worst:.3e})")

    # joint power/bandwidth solver vs simplex grid with exact per-point power
    worst = 0.0
    ok = True
    for _ in range(max(1, n_inst // 10)):
        n = int(rng.integers(1, 4))
        q, h, v = rand_inst(n)
        p, alpha, _ = solve_offloading(q, h, v, tau, w, n0, dev.p_max, eps)
        obj = float(v * np.sum(p)
                    - np.sum(q * remote_departure(alpha, p, h, w, tau, n0)))
        _, _, obj_grid = grid_offloading(q, h, v, tau, w, n0,
                                         np.full(n, dev.p_max), eps,
                                         alpha_step=5e-3)
        slack = offloading_grid_slack(q, h, np.full(n, dev.p_max), w, tau,
                                      n0, eps, 5e-3)
        ok = ok and obj <= obj_grid + 1e-6 * abs(obj_grid) + 1e-9
        ok = ok and obj_grid <= obj + slack + 1e-6 * abs(obj)
        worst = max(worst, abs(obj - obj_grid))
    report(ok, "solve_offloading",
           f"agrees with joint grids (worst objective gap {worst:.3e})")

    print("verification: " + ("all checks passed" if failures == 0
                              else f"{failures} check(s) failed"))
    return 0 if failures == 0 else 2


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="config YAML path or packaged preset "
                                      "name (default: packaged default)")
    sub.add_argument("--seed", type=int, help="override the config seed")
    sub.add_argument("--override", action="append", metavar="KEY=VALUE",
                     help="config override; aliases V, T, N, seed or dotted "
                          "system.X / device.X keys")
    sub.add_argument("--out-dir", default="out",
                     help="directory for output files (default: out)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mecsim",
        description="Slotted-time simulator and online controller for "
                    "multi-user mobile-edge computing power/delay tradeoffs")
    subs = parser.add_subparsers(dest="command", required=True)

    p_run = subs.add_parser("run", help="single run with summary output")
    _add_common(p_run)
    p_run.add_argument("--policy", choices=sorted(POLICIES),
                       help="policy name (default: lyapunov)")
    p_run.add_argument("--trace", action="store_true",
                       help="also write the per-slot trace CSV")
    p_run.set_defaults(func=cmd_run)

    p_sweep = subs.add_parser("sweep",
                              help="sweep the control weight V over seeds")
    _add_common(p_sweep)
    p_sweep.add_argument("--policy", choices=sorted(POLICIES),
                         help="policy name (default: lyapunov)")
    p_sweep.add_argument("--v-list",
                         help="comma list of V values or log:START:STOP:COUNT "
                              f"(default: {_DEFAULT_V_LIST})")
    p_sweep.add_argument("--seeds", type=int, default=1, metavar="N",
                         help="number of consecutive seeds (default: 1)")
    p_sweep.add_argument("--gnuplot", action="store_true",
                         help="emit a gnuplot script next to the CSVs")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = subs.add_parser("compare",
                            help="sweep several policies into one file")
    _add_common(p_cmp)
    p_cmp.add_argument("--policy",
                       help="comma-separated policy names "
                            "(default: lyapunov,local_only)")
    p_cmp.add_argument("--v-list",
                       help="comma list of V values or log:START:STOP:COUNT "
                            f"(default: {_DEFAULT_V_LIST})")
    p_cmp.add_argument("--seeds", type=int, default=1, metavar="N",
                       help="number of consecutive seeds (default: 1)")
    p_cmp.add_argument("--gnuplot", action="store_true",
                       help="emit a gnuplot script next to the CSVs")
    p_cmp.set_defaults(func=cmd_compare)

    p_ver = subs.add_parser("verify",
                            help="run the solver certification battery")
    _add_common(p_ver)
    p_ver.add_argument("--instances", type=int, default=100,
                       help="random instances per check (default: 100)")
    p_ver.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SimulationError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
