"""Command-line entry point.

Subcommands: scatter, marchenko, kernel, apply, hnorm, verify <sub>, report.
Shared flags: --config PATH, --cache DIR, --jobs N, --seed U64. Outputs are
RFC-4180 CSV tables, JSON manifests and little-endian float64 binaries.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .pipeline import ConfigError, ExperimentConfig, run, run_verify


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jostkit",
                                description="1D scattering calculus and verification harness")
    p.add_argument("--config", required=True, help="experiment INI file")
    p.add_argument("--cache", default=None, help="cache directory")
    p.add_argument("--jobs", type=int, default=None, help="worker hint (recorded)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed override")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("scatter", help="Jost solve + scattering coefficients")
    sub.add_parser("marchenko", help="Marchenko kernels and weighted bounds")
    sub.add_parser("kernel", help="assemble a dyadic block kernel")
    sub.add_parser("apply", help="apply the configured multiplier to a test vector")
    sub.add_parser("hnorm", help="Hoermander norm of the configured multiplier")
    pv = sub.add_parser("verify", help="run a verification check")
    pv.add_argument("check", choices=["wl2", "decay", "weak11", "cz", "besov", "tails"])
    sub.add_parser("report", help="collect verdicts into manifest.json")
    sub.add_parser("run", help="full pipeline: scatter, marchenko, kernel, verify")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ExperimentConfig.load(args.config)
        if args.cache is not None:
            config.cache_dir = args.cache
        if args.seed is not None:
            config.seed = args.seed
        if args.jobs is not None:
            config.jobs = args.jobs
        return _dispatch(args, config)
    except ConfigError as exc:
        print(json.dumps(exc.payload()), file=sys.stderr)
        return 2
    except Exception as exc:           # runtime failure: machine-readable too
        print(json.dumps({"code": "runtime_error", "message": str(exc)}), file=sys.stderr)
        return 1


def _dispatch(args, config: ExperimentConfig) -> int:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.command == "run":
        manifest = run(config)
        print(json.dumps({"ok": True, "verdicts": manifest["verdicts"],
                          "stage_seconds": manifest["stage_seconds"]}))
        return 0
    if args.command == "scatter":
        run(config, stages=("scatter",))
        print(json.dumps({"ok": True, "outputs": ["scattering.csv", "scattering.json"]}))
        return 0
    if args.command == "marchenko":
        run(config, stages=("marchenko",))
        print(json.dumps({"ok": True, "outputs": ["marchenko_bounds_n0.csv",
                                                  "marchenko_bounds_n1.csv"]}))
        return 0
    if args.command == "kernel":
        run(config, stages=("kernel",))
        print(json.dumps({"ok": True}))
        return 0
    if args.command == "apply":
        V = config.potential()
        mu = config.multiplier()
        from .speccalc import apply_multiplier

        x = V.x
        f = np.exp(-x * x)
        u, rep = apply_multiplier(mu, V, f, (config.j_lo, config.j_hi))
        _write_apply_csv(out / "apply.csv", x, f, u)
        (out / "apply.json").write_text(json.dumps(rep, indent=1))
        print(json.dumps({"ok": True, "completeness_defect":
                          rep["window_completeness_defect"]}))
        return 0
    if args.command == "hnorm":
        from .speccalc import hoermander_norm

        res = hoermander_norm(config.multiplier(), s=1.0)
        payload = {"norm": res["norm"],
                   "per_t": res["per_t"].tolist(), "t_grid": res["t_grid"].tolist()}
        (out / "hnorm.json").write_text(json.dumps(payload, indent=1))
        print(json.dumps({"ok": True, "norm": res["norm"]}))
        return 0
    if args.command == "verify":
        V = config.potential()
        verdicts = run_verify(config, V, out, which=args.check)
        print(json.dumps({"ok": True, "verdicts": verdicts}))
        return 0 if all(v["pass"] for v in verdicts) else 1
    if args.command == "report":
        verdicts = []
        for f in sorted(out.glob("verify_*.json")):
            verdicts.append(json.loads(f.read_text()))
        (out / "manifest.json").write_text(json.dumps(
            {"verdicts": verdicts}, indent=1, sort_keys=True))
        print(json.dumps({"ok": True, "n_verdicts": len(verdicts)}))
        return 0
    raise ConfigError("bad_command", f"unknown command {args.command!r}")


def _write_apply_csv(path, x, f, u):
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "f", "re_u", "im_u"])
        for i in range(len(x)):
            w.writerow([repr(float(x[i])), repr(float(f[i])),
                        repr(float(np.real(u[i]))), repr(float(np.imag(u[i])))])


if __name__ == "__main__":
    raise SystemExit(main())
