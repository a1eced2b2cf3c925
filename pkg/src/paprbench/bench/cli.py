"""Command line interface: run, sweep and reproduce experiments.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .config import ConfigError, parse_config, parse_sweep
from .figures import FIGURES, figure_runs, gnuplot_script
from .runner import run_experiment, write_csv


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="papr-bench",
        description="Monte-Carlo CCDF experiments for OFDM PAPR reduction techniques",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the master seed")
    common.add_argument("--symbols", type=int, default=None, help="override the symbol count")
    common.add_argument("--workers", type=int, default=None,
                        help="worker processes (default 1; PAPR_BENCH_THREADS overrides)")

    p_run = sub.add_parser("run", parents=[common], help="run a single experiment config")
    p_run.add_argument("config", help="TOML experiment file")
    p_run.add_argument("--out", default=None, help="output CSV path (overrides config)")

    p_sweep = sub.add_parser("sweep", parents=[common], help="expand and run a sweep config")
    p_sweep.add_argument("config", help="TOML experiment file with a [sweep] table")
    p_sweep.add_argument("--out", default=None, help="output directory for the CSV set")

    p_rep = sub.add_parser("reproduce", parents=[common],
                           help="run a built-in benchmark figure experiment set")
    p_rep.add_argument("figure", choices=sorted(FIGURES), help="which figure to reproduce")
    p_rep.add_argument("--out", default=".", help="output directory")
    return parser


def _workers(args) -> int:
    env = os.environ.get("PAPR_BENCH_THREADS")
    if env is not None:
        return max(1, int(env))
    if args.workers is not None:
        return max(1, args.workers)
    return 1


def _apply_overrides(cfg, args):
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    if args.symbols is not None:
        cfg = replace(cfg, n_symbols=args.symbols)
    return cfg


def _emit(cfg, workers, out_path):
    result = run_experiment(cfg, workers=workers)
    write_csv(result, out_path)
    crossing = result.papr_at.get(1e-3)
    print(
        f"{out_path}: {cfg.technique} N={cfg.n_subcarriers} "
        f"symbols={cfg.n_symbols} mean={result.mean_papr_db:.3f} dB "
        f"papr@1e-3={crossing:.3f} dB ({result.wall_time_s:.1f}s)"
    )
    return out_path


def _cmd_run(args) -> int:
    with open(args.config) as fh:
        cfg = parse_config(fh.read())
    cfg = _apply_overrides(cfg, args)
    out = args.out or cfg.output or "ccdf.csv"
    path = _emit(cfg, _workers(args), out)
    gnuplot_script([path], [cfg.technique], f"CCDF: {cfg.technique}",
                   os.path.splitext(path)[0] + ".gp")
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        children = parse_sweep(fh.read())
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    paths, labels = [], []
    for label, cfg in children:
        cfg = _apply_overrides(cfg, args)
        # children share one config-level output key, so name files per label
        out = os.path.join(outdir, f"sweep_{label.replace('=', '')}.csv")
        paths.append(_emit(cfg, _workers(args), out))
        labels.append(label)
    gnuplot_script(paths, labels, "CCDF sweep", os.path.join(outdir, "sweep.gp"))
    return 0


def _cmd_reproduce(args) -> int:
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    seed = 1 if args.seed is None else args.seed
    symbols = 10_000 if args.symbols is None else args.symbols
    paths, labels = [], []
    for label, cfg in figure_runs(args.figure, seed=seed, symbols=symbols, outdir=outdir):
        paths.append(_emit(cfg, _workers(args), cfg.output))
        labels.append(label)
    gnuplot_script(paths, labels, f"CCDF: {args.figure}",
                   os.path.join(outdir, f"{args.figure}.gp"))
    return 0


_COMMANDS = {"run": _cmd_run, "sweep": _cmd_sweep, "reproduce": _cmd_reproduce}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


def console_main():
    sys.exit(main())
