"""Command-line front end: run experiments, write deterministic artifacts.

Subcommands:

- ``scenarios``: run the four sharing kinds over common drops, emit one
  SINR CDF and one rate CDF CSV per kind plus a summary JSON.
- ``sweep``: density sweep of the configured scenario, emit the sweep CSV
  (and a JSON with the fitted scaling exponent).
- ``gap``: blind vs brute-force coordinated association on small random
  instances, emit per-instance results.
- ``analytic``: print the closed-form scaling table for the config.

Exit codes: 0 ok, 2 config error, 3 runtime error, 4 instance-size error.
Every artifact embeds spec_revision, config_hash and master_seed; given
the same config and seed, artifacts are byte-identical run to run.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from json import dumps
from pathlib import Path

import numpy as np

from .allocation import InstanceSizeError
from .analytic import ScalingInputs
from .analytic import summary as analytic_summary
from .config import (SPEC_REVISION, ConfigError, ExperimentConfig, config_hash,
                     default_config, load_config)
from .experiment import ALLOCATORS, run_gap, run_scenarios
from .metrics import cdf, percentile, run_sweep
from .scenario import SCENARIO_KINDS


def _fmt(v) -> str:
    return str(float(v))


def _header_lines(cfg: ExperimentConfig) -> list[str]:
    return [
        f"# spec_revision={SPEC_REVISION}",
        f"# config_hash={config_hash(cfg)}",
        f"# master_seed={cfg.master_seed}",
    ]


def _write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_cdf_csv(path: Path, cfg: ExperimentConfig, values) -> None:
    """CSV of an empirical CDF: columns value,cum_prob (one row per sample)."""
    v = np.sort(np.asarray(values, dtype=float), kind="stable")
    n = len(v)
    lines = _header_lines(cfg) + ["value,cum_prob"]
    lines += [f"{_fmt(v[i])},{_fmt((i + 1) / n)}" for i in range(n)]
    _write_text(path, "\n".join(lines) + "\n")


def write_sweep_csv(path: Path, cfg: ExperimentConfig, sweep) -> None:
    lines = _header_lines(cfg) + ["density_bs_km2,median_rate_bps,p05_rate_bps,outage_fraction"]
    for i in range(len(sweep.densities)):
        lines.append(",".join(_fmt(x) for x in (
            sweep.densities[i], sweep.median_rate_bps[i],
            sweep.p05_rate_bps[i], sweep.outage_fraction[i])))
    _write_text(path, "\n".join(lines) + "\n")


def write_gap_csv(path: Path, cfg: ExperimentConfig, rows) -> None:
    lines = _header_lines(cfg) + ["instance_id,blind_sum_rate_bps,ub_sum_rate_bps,gap_percent"]
    for r in rows:
        lines.append(f"{r.instance_id},{_fmt(r.blind_sum_rate_bps)},"
                     f"{_fmt(r.ub_sum_rate_bps)},{_fmt(r.gap_percent)}")
    _write_text(path, "\n".join(lines) + "\n")


def write_summary_json(path: Path, cfg: ExperimentConfig, payload: dict) -> None:
    doc = {
        "spec_revision": SPEC_REVISION,
        "config_hash": config_hash(cfg),
        "master_seed": cfg.master_seed,
        **payload,
    }
    _write_text(path, dumps(doc, sort_keys=True, indent=2) + "\n")


PLOT_SCRIPT = """\
#!/usr/bin/env python3
\"\"\"Plot any artifacts found next to this script (requires matplotlib).\"\"\"
import glob
import os.path

import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))

def load(path):
    return np.genfromtxt(path, delimiter=",", names=True, comments="#")

for metric in ("sinr", "rate"):
    files = sorted(glob.glob(os.path.join(here, f"cdf_{metric}_*.csv")))
    if files:
        plt.figure()
        for f in files:
            d = load(f)
            kind = os.path.basename(f)[len(f"cdf_{metric}_"):-len(".csv")]
            plt.step(d["value"], d["cum_prob"], where="post", label=kind)
        plt.xlabel("SINR (dB)" if metric == "sinr" else "rate (bit/s)")
        if metric == "rate":
            plt.xscale("log")
        plt.ylabel("empirical CDF")
        plt.legend()
        plt.savefig(os.path.join(here, f"cdf_{metric}.png"), dpi=150)

sweep = os.path.join(here, "sweep.csv")
if os.path.exists(sweep):
    d = load(sweep)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.loglog(d["density_bs_km2"], d["median_rate_bps"], "o-", label="median")
    ax1.loglog(d["density_bs_km2"], d["p05_rate_bps"], "s-", label="5%")
    ax1.set_xlabel("BS density (km$^{-2}$)")
    ax1.set_ylabel("rate (bit/s)")
    ax1.legend()
    ax2.plot(d["density_bs_km2"], d["outage_fraction"], "o-")
    ax2.set_xlabel("BS density (km$^{-2}$)")
    ax2.set_ylabel("outage fraction")
    fig.savefig(os.path.join(here, "sweep.png"), dpi=150)

gap = os.path.join(here, "gap.csv")
if os.path.exists(gap):
    d = load(gap)
    plt.figure()
    plt.hist(d["gap_percent"], bins=30)
    plt.xlabel("coordination gap (%)")
    plt.ylabel("instances")
    plt.savefig(os.path.join(here, "gap.png"), dpi=150)
"""


def _parse_densities(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"--densities: {exc}") from None
    if not values or any(d <= 0 for d in values):
        raise ConfigError("--densities: need a comma-separated list of positive numbers")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmwshare",
        description="Monte Carlo simulator for spectrum, infrastructure and "
                    "access sharing in multi-operator mmWave networks")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, artifacts=True):
        p.add_argument("--config", metavar="PATH", help="JSON experiment config")
        p.add_argument("--seed", type=int, metavar="U64", help="override master_seed")
        p.add_argument("--drops", type=int, metavar="N", help="override drop count")
        if artifacts:
            p.add_argument("--out", metavar="DIR", default="results",
                           help="output directory (default: results)")
            p.add_argument("--emit-plot-script", action="store_true",
                           help="also write a generic plotting script")

    p = sub.add_parser("scenarios", help="compare the four sharing scenarios")
    common(p)
    p.add_argument("--scenario", choices=SCENARIO_KINDS,
                   help="run a single kind instead of all four")
    p.add_argument("--allocator", choices=ALLOCATORS, default="blind")

    p = sub.add_parser("sweep", help="density sweep of the configured scenario")
    common(p)
    p.add_argument("--scenario", choices=SCENARIO_KINDS,
                   help="override the configured scenario kind")
    p.add_argument("--densities", default="5,10,20,30,50,80",
                   help="comma-separated BS densities per km^2")
    p.add_argument("--allocator", choices=ALLOCATORS, default="blind")

    p = sub.add_parser("gap", help="blind vs coordinated upper bound on small instances")
    common(p)

    p = sub.add_parser("analytic", help="print the closed-form scaling table")
    common(p, artifacts=False)
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else default_config()
    try:
        if args.seed is not None:
            cfg = replace(cfg, master_seed=args.seed)
        if args.drops is not None:
            cfg = replace(cfg, drops=args.drops)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.emit_plot_script:
        _write_text(out / "plot_results.py", PLOT_SCRIPT)
    return out


def cmd_scenarios(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    kinds = (args.scenario,) if args.scenario else SCENARIO_KINDS
    results = run_scenarios(cfg, kinds, args.allocator)
    summary = {}
    for kind, res in results.items():
        write_cdf_csv(out / f"cdf_sinr_{kind}.csv", cfg, res.sinr_db)
        write_cdf_csv(out / f"cdf_rate_{kind}.csv", cfg, res.rate_bps)
        summary[kind] = {
            "median_rate_bps": res.median_rate_bps,
            "p05_rate_bps": res.p05_rate_bps,
            "median_sinr_db": res.median_sinr_db,
            "outage_fraction": res.outage_fraction,
            "n_ue_samples": int(len(res.rate_bps)),
            "drops": res.drops,
        }
        print(f"{kind}: median rate {res.median_rate_bps / 1e6:.1f} Mb/s, "
              f"outage {res.outage_fraction:.3f}")
    write_summary_json(out / "summary.json", cfg, {"scenarios": summary})
    return 0


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if args.scenario:
        cfg = replace(cfg, scenario=replace(cfg.scenario, kind=args.scenario))
    densities = _parse_densities(args.densities)
    out = _outdir(args)
    # with --allocator ub, any realistic density exceeds the search limits
    # and the run exits with the instance-size code
    sweep = run_sweep(cfg, densities, allocator=args.allocator)
    write_sweep_csv(out / "sweep.csv", cfg, sweep)
    write_summary_json(out / "sweep.json", cfg, {
        "densities_bs_km2": list(sweep.densities),
        "mean_rate_bps": list(sweep.mean_rate_bps),
        "fitted_exponent": sweep.fitted_exponent,
    })
    print(f"sweep over {len(densities)} densities, "
          f"fitted exponent {sweep.fitted_exponent:.3f}")
    return 0


def cmd_gap(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    rows = run_gap(cfg, n_instances=cfg.drops)
    write_gap_csv(out / "gap.csv", cfg, rows)
    gaps = [r.gap_percent for r in rows]
    median_gap = percentile(cdf(gaps), 0.5)
    write_summary_json(out / "gap.json", cfg, {
        "instances": len(rows),
        "median_gap_percent": median_gap,
        "max_gap_percent": max(gaps),
        "dominance_violations": sum(
            1 for r in rows if r.ub_sum_rate_bps < r.blind_sum_rate_bps),
    })
    print(f"{len(rows)} instances, median gap {median_gap:.2f}%")
    return 0


def cmd_analytic(args) -> int:
    cfg = _load(args)
    area = cfg.region.area_km2
    scn = cfg.scenario
    inputs = ScalingInputs(
        rho=cfg.bs_density_per_km2,
        M=scn.num_operators,
        W_hz=scn.total_bandwidth_hz,
        N_UE=max(1, round(cfg.ue_density_per_km2 * area)),
        N_BS=max(1, round(cfg.bs_density_per_km2 * area)),
        alpha_pl=cfg.channel.pl_exponent_nlos,
        A_c_km2=cfg.channel.hard_coverage_area_km2,
    )
    for key, value in analytic_summary(inputs).items():
        print(f"{key:<40} {value}")
    return 0


_COMMANDS = {"scenarios": cmd_scenarios, "sweep": cmd_sweep,
             "gap": cmd_gap, "analytic": cmd_analytic}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InstanceSizeError as exc:
        print(f"instance size error: {exc}", file=sys.stderr)
        return 4
    except Exception as exc:   # runtime failures map to a distinct code
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
