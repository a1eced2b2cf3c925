"""Built-in experiment sets reproducing the four benchmark figures.

Each figure expands to a list of labeled experiment configs with a shared
master seed, one output CSV per curve, plus a gnuplot script that plots the
set on a log-probability axis.
"""
from __future__ import annotations

import os
from dataclasses import replace

from .config import ExperimentConfig

#: default symbol count for the reproduction runs
DEFAULT_SYMBOLS = 10_000


def _base(n, technique, params, seed, symbols) -> ExperimentConfig:
    from .config import build_config

    return build_config(
        technique, n, params, oversampling=4, n_symbols=symbols, master_seed=seed
    )


def fig2(seed=1, symbols=DEFAULT_SYMBOLS):
    """Unmodified OFDM for N in {64 .. 1024}."""
    return [
        (f"baseline_n{n}", _base(n, "none", {}, seed, symbols))
        for n in (64, 128, 256, 512, 1024)
    ]


def fig3(seed=1, symbols=DEFAULT_SYMBOLS):
    """SLM at N=256 for U in {2, 4, 6, 8, 16} against the unmodified baseline."""
    runs = [("baseline", _base(256, "none", {}, seed, symbols))]
    for u in (2, 4, 6, 8, 16):
        runs.append(
            (f"slm_u{u}", _base(256, "slm", {"u_count": u, "alphabet": "pm1", "seed": 101}, seed, symbols))
        )
    return runs


def fig4(seed=1, symbols=DEFAULT_SYMBOLS):
    """OPS at N=256, N_p=16 for M in {4, 8, 16}.

    The reference curve is the same system transmitting the first
    Walsh-Hadamard pilot sequence on every symbol (M=1: no selection freedom),
    which is what a conventional fixed-pilot transmitter does.
    """
    runs = [("fixed_pilots", _base(256, "ops", {"n_pilots": 16, "m_count": 1}, seed, symbols))]
    for m in (4, 8, 16):
        runs.append(
            (f"ops_m{m}", _base(256, "ops", {"n_pilots": 16, "m_count": m}, seed, symbols))
        )
    return runs


def fig5(seed=1, symbols=DEFAULT_SYMBOLS):
    """SAP at N=256 with alpha=1.55, sweeping the predistorted-symbol budget."""
    runs = [("baseline", _base(256, "none", {}, seed, symbols))]
    for l_count in (8, 16, 32):
        runs.append(
            (
                f"sap_a1.55_l{l_count}",
                _base(256, "sap", {"alpha": 1.55, "l_count": l_count}, seed, symbols),
            )
        )
    return runs


FIGURES = {"fig2": fig2, "fig3": fig3, "fig4": fig4, "fig5": fig5}


def figure_runs(name: str, seed=1, symbols=DEFAULT_SYMBOLS, outdir="."):
    """Labeled configs for one figure, with output paths under ``outdir``."""
    if name not in FIGURES:
        raise ValueError(f"unknown figure {name!r} (choose from {sorted(FIGURES)})")
    runs = FIGURES[name](seed=seed, symbols=symbols)
    labeled = []
    for label, cfg in runs:
        out = os.path.join(outdir, f"{name}_{label}.csv")
        labeled.append((label, replace(cfg, output=out)))
    return labeled


def gnuplot_script(csv_paths, labels, title: str, out_path: str) -> str:
    """Text of a gnuplot script plotting the given CCDF CSVs together."""
    lines = [
        f'set title "{title}"',
        'set xlabel "PAPR threshold (dB)"',
        'set ylabel "CCDF  Prob(PAPR > threshold)"',
        "set logscale y",
        "set yrange [1e-4:1]",
        "set grid",
        "set key bottom left",
        "set datafile separator ','",
    ]
    plots = [
        f'"{os.path.basename(path)}" using 1:2 with lines title "{label}"'
        for path, label in zip(csv_paths, labels)
    ]
    lines.append("plot \\\n    " + ", \\\n    ".join(plots))
    text = "\n".join(lines) + "\n"
    with open(out_path, "w") as fh:
        fh.write(text)
    return text
