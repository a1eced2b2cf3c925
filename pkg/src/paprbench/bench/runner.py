"""Monte-Carlo experiment runner with a deterministic worker pool.

Symbol ``i`` of a run draws its bits from a generator seeded by
``(master_seed, i)`` only, so results are bit-identical for any worker
count and unchanged when more symbols are appended.
"""
from __future__ import annotations

import multiprocessing
import time
from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from ..clipping import ClipConfig, clip_and_filter
from ..core import (
    CcdfCurve,
    FreqSymbols,
    ccdf_estimate,
    idft,
    papr,
    papr_at_probability,
    qpsk_map,
)
from ..ops import embed_data, hadamard_set, ops_select, pilot_grid, pilot_time_signals
from ..pts import partition, pts_exhaustive, pts_iterative
from ..sap import SapConfig, sap_predistort
from ..slm import generate_bank, slm_select
from ..tr import reserved_tones, tr_iterative
from .config import ExperimentConfig

#: probabilities summarized in every run result
SUMMARY_PROBS = (1e-1, 1e-2, 1e-3)


@dataclass(frozen=True, eq=False)
class RunResult:
    curve: CcdfCurve
    mean_papr_db: float
    max_papr_db: float
    papr_at: dict
    aggregates: dict
    config: dict
    wall_time_s: float
    papr_values_db: np.ndarray = field(repr=False, default=None)


class _Technique:
    """One prepared technique instance; applied per symbol inside workers."""

    aggregate_keys: tuple = ()

    def __init__(self, cfg: ExperimentConfig):
        self.n = cfg.n_subcarriers
        self.oversampling = cfg.oversampling

    def bits_per_symbol(self) -> int:
        return 2 * self.n

    def symbol_papr(self, bits) -> tuple[float, dict]:
        raise NotImplementedError


class _NoneTechnique(_Technique):
    def symbol_papr(self, bits):
        report = papr(idft(qpsk_map(bits), self.oversampling))
        return report.papr_db, {}


class _ClippingTechnique(_Technique):
    aggregate_keys = ("iterations",)

    def __init__(self, cfg):
        super().__init__(cfg)
        self.clip_cfg = ClipConfig(
            clip_ratio_db=cfg.params["clip_ratio_db"],
            oversampling=cfg.oversampling,
            iterations=cfg.params["iterations"],
        )

    def symbol_papr(self, bits):
        signal, peaks = clip_and_filter(qpsk_map(bits), self.clip_cfg)
        report = papr(signal)
        return report.papr_db, {"iterations": float(len(peaks))}


class _SlmTechnique(_Technique):
    aggregate_keys = ("candidates",)

    def __init__(self, cfg):
        super().__init__(cfg)
        self.bank = generate_bank(
            cfg.params["u_count"], cfg.n_subcarriers, cfg.params["alphabet"], cfg.params["seed"]
        )

    def symbol_papr(self, bits):
        _, chosen, report = slm_select(qpsk_map(bits), self.bank, self.oversampling)
        return report.papr_db, {"candidates": float(report.aux["candidates"])}


class _PtsTechnique(_Technique):
    aggregate_keys = ("candidates",)

    def __init__(self, cfg):
        super().__init__(cfg)
        self.part = partition(
            cfg.n_subcarriers, cfg.params["v_count"], cfg.params["scheme"], cfg.params["seed"]
        )
        self.w = cfg.params["w_alphabet"]
        search = cfg.params["search"]
        if search not in ("exhaustive", "iterative"):
            raise ValueError(f"unknown PTS search mode {search!r}")
        self.search = search

    def symbol_papr(self, bits):
        fn = pts_exhaustive if self.search == "exhaustive" else pts_iterative
        _, _, report = fn(qpsk_map(bits), self.part, self.w, self.oversampling)
        return report.papr_db, {"candidates": float(report.aux["candidates"])}


class _TrTechnique(_Technique):
    aggregate_keys = ("iterations",)

    def __init__(self, cfg):
        super().__init__(cfg)
        self.tones = reserved_tones(
            cfg.n_subcarriers, cfg.params["r_count"], cfg.params["placement"], cfg.params["seed"]
        )
        self.target_db = cfg.params["target_db"]
        self.max_iters = cfg.params["max_iters"]
        self.cap = cfg.params["cap"]

    def bits_per_symbol(self):
        return 2 * (self.n - self.tones.r_count)

    def symbol_papr(self, bits):
        data = qpsk_map(bits).values
        values = np.zeros(self.n, dtype=np.complex128)
        values[self.tones.data_mask()] = data
        freq = FreqSymbols(values, self.n)
        _, _, report = tr_iterative(
            freq, self.tones, self.oversampling, self.target_db, self.max_iters, self.cap
        )
        return report.papr_db, {"iterations": float(report.aux["iterations"])}


class _SapTechnique(_Technique):
    aggregate_keys = ("scaled",)

    def __init__(self, cfg):
        super().__init__(cfg)
        self.sap_cfg = SapConfig(
            alpha=cfg.params["alpha"],
            l_count=cfg.params["l_count"],
            p_exponent=cfg.params["p_exponent"],
            threshold_db=cfg.params["threshold_db"],
            k_cap=cfg.params["k_cap"],
        )

    def symbol_papr(self, bits):
        _, _, report = sap_predistort(qpsk_map(bits), self.sap_cfg, self.oversampling)
        return report.papr_db, {"scaled": float(report.aux["scaled"])}


class _OpsTechnique(_Technique):
    aggregate_keys = ("candidates",)

    def __init__(self, cfg):
        super().__init__(cfg)
        grid = pilot_grid(cfg.n_subcarriers, cfg.params["n_pilots"])
        self.pset = hadamard_set(cfg.n_subcarriers, grid, cfg.params["m_count"])
        self.pilot_time = pilot_time_signals(self.pset, cfg.oversampling)

    def bits_per_symbol(self):
        return 2 * (self.n - self.pset.grid.n_pilots)

    def symbol_papr(self, bits):
        data = embed_data(qpsk_map(bits).values, self.pset.grid)
        _, _, report = ops_select(data, self.pset, self.oversampling, self.pilot_time)
        return report.papr_db, {"candidates": float(report.aux["candidates"])}


_TECHNIQUE_CLASSES = {
    "none": _NoneTechnique,
    "clipping": _ClippingTechnique,
    "slm": _SlmTechnique,
    "pts": _PtsTechnique,
    "tr": _TrTechnique,
    "sap": _SapTechnique,
    "ops": _OpsTechnique,
}


def build_technique(cfg: ExperimentConfig) -> _Technique:
    return _TECHNIQUE_CLASSES[cfg.technique](cfg)


def _symbol_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(master_seed), int(index)])


def _run_chunk(tech: _Technique, master_seed: int, start: int, stop: int):
    n_bits = tech.bits_per_symbol()
    values = np.empty(stop - start)
    sums = {key: 0.0 for key in tech.aggregate_keys}
    for i in range(start, stop):
        bits = _symbol_rng(master_seed, i).integers(0, 2, n_bits)
        papr_db, aux = tech.symbol_papr(bits)
        values[i - start] = papr_db
        for key in sums:
            sums[key] += aux[key]
    return start, values, sums


def _chunk_star(args):
    return _run_chunk(*args)


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> RunResult:
    """Run the configured Monte-Carlo campaign and aggregate its CCDF."""
    t0 = time.perf_counter()
    tech = build_technique(cfg)
    n_sym = cfg.n_symbols
    workers = max(1, min(int(workers), n_sym))

    if workers == 1:
        chunks = [_run_chunk(tech, cfg.master_seed, 0, n_sym)]
    else:
        kernels.warmup()  # compile before forking so children inherit machine code
        bounds = np.linspace(0, n_sym, workers + 1).astype(int)
        jobs = [
            (tech, cfg.master_seed, int(a), int(b))
            for a, b in zip(bounds[:-1], bounds[1:])
            if b > a
        ]
        with multiprocessing.get_context().Pool(workers) as pool:
            chunks = pool.map(_chunk_star, jobs)

    chunks.sort(key=lambda c: c[0])
    values = np.concatenate([c[1] for c in chunks])
    sums = {key: 0.0 for key in tech.aggregate_keys}
    for _, _, chunk_sums in chunks:
        for key in sums:
            sums[key] += chunk_sums[key]

    curve = ccdf_estimate(values, cfg.thresholds())
    aggregates = {f"mean_{key}": sums[key] / n_sym for key in sorted(sums)}
    result = RunResult(
        curve=curve,
        mean_papr_db=float(values.mean()),
        max_papr_db=float(values.max()),
        papr_at={p: papr_at_probability(curve, p) for p in SUMMARY_PROBS},
        aggregates=aggregates,
        config=cfg.describe(),
        wall_time_s=time.perf_counter() - t0,
        papr_values_db=values,
    )
    return result


def _format_value(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(result: RunResult, path):
    """Emit the CCDF as CSV with a commented summary block before the header.

    Volatile fields (wall time) are excluded so identical experiments always
    produce identical bytes.
    """
    lines = []
    for key, value in result.config.items():
        lines.append(f"# {key}: {_format_value(value)}")
    lines.append(f"# mean_papr_db: {_format_value(result.mean_papr_db)}")
    lines.append(f"# max_papr_db: {_format_value(result.max_papr_db)}")
    for prob in sorted(result.papr_at, reverse=True):
        lines.append(f"# papr_at_{prob:g}_db: {_format_value(result.papr_at[prob])}")
    for key in sorted(result.aggregates):
        lines.append(f"# {key}: {_format_value(result.aggregates[key])}")
    lines.append("threshold_db,ccdf")
    for t, p in zip(result.curve.thresholds_db, result.curve.probabilities):
        lines.append(f"{t:.17g},{p:.17g}")
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write result to {path}: {exc}") from exc


def read_csv(path) -> CcdfCurve:
    """Parse a CSV written by :func:`write_csv` back into a curve."""
    thresholds = []
    probs = []
    n_symbols = 0
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                if line.startswith("# n_symbols:"):
                    n_symbols = int(line.split(":", 1)[1])
                continue
            if line.startswith("threshold_db"):
                continue
            t, p = line.split(",")
            thresholds.append(float(t))
            probs.append(float(p))
    return CcdfCurve(np.array(thresholds), np.array(probs), n_symbols)
