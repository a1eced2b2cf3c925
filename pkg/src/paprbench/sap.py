"""Metric-guided amplitude predistortion.

Each frequency symbol's contribution to the large time-domain peaks is scored
by the angle it makes with those peaks; symbols that oppose the peaks get a
positive metric and the strongest of them are scaled up, which flattens the
envelope without moving any constellation decision boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    FreqSymbols,
    PaprReport,
    TimeSignal,
    centered_freqs,
    idft,
    papr_linear_of,
)


@dataclass(frozen=True)
class SapConfig:
    alpha: float = 1.55
    l_count: int = 16
    p_exponent: float = 2.0
    threshold_db: float = 6.0  # peak set: samples above mean power + threshold_db
    k_cap: int = 8  # at most this many peak samples enter the metric

    def __post_init__(self):
        if self.alpha <= 1.0:
            raise ValueError("scaling factor must exceed 1")
        if self.l_count < 1:
            raise ValueError("need l_count >= 1")
        if self.k_cap < 1:
            raise ValueError("need k_cap >= 1")


@dataclass(frozen=True, eq=False)
class MetricVector:
    """Per-subcarrier peak-opposition score; higher means scaling helps more."""

    mu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mu", np.ascontiguousarray(self.mu, dtype=np.float64))
        if not np.all(np.isfinite(self.mu)):
            raise ValueError("metric values must be finite")


def peak_sample_set(samples: np.ndarray, threshold_db: float, k_cap: int) -> np.ndarray:
    """Indices of samples above mean power + threshold_db, capped to the k_cap largest.

    Falls back to the single largest sample when nothing clears the threshold.
    """
    power = np.abs(samples) ** 2
    cut = power.mean() * 10.0 ** (threshold_db / 10.0)
    idx = np.nonzero(power > cut)[0]
    if idx.size == 0:
        return np.array([int(np.argmax(power))], dtype=np.int64)
    if idx.size > k_cap:
        keep = np.argsort(power[idx], kind="stable")[-k_cap:]
        idx = idx[np.sort(keep)]
    return idx.astype(np.int64)


def sap_metric(freq: FreqSymbols, signal: TimeSignal, cfg: SapConfig) -> MetricVector:
    """Score every subcarrier by its weighted opposition to the peak samples."""
    peaks = peak_sample_set(signal.samples, cfg.threshold_db, cfg.k_cap)
    freqs = centered_freqs(freq.n_subcarriers).astype(np.int64)
    mu = kernels.sap_metric_accumulate(
        signal.samples, peaks, freq.values, freqs, float(cfg.p_exponent)
    )
    return MetricVector(mu)


def sap_predistort(
    freq: FreqSymbols, cfg: SapConfig, oversampling: int = 4
) -> tuple[TimeSignal, FreqSymbols, PaprReport]:
    """Scale up to ``l_count`` positively scored symbols by alpha and resynthesize.

    Phases are preserved, so a minimum-distance detector decides exactly as it
    would for the original symbol.  When no metric is positive the symbol
    passes through unchanged.
    """
    signal = idft(freq, oversampling)
    metric = sap_metric(freq, signal, cfg)
    order = np.argsort(metric.mu, kind="stable")[::-1][: cfg.l_count]
    selected = np.sort(order[metric.mu[order] > 0.0])

    if selected.size == 0:
        report = PaprReport(
            papr_linear=papr_linear_of(signal.samples),
            technique="sap",
            aux={"scaled": 0, "scaled_indices": selected, "energy_ratio": 1.0},
        )
        return signal, freq, report

    values = freq.values.copy()
    values[selected] *= cfg.alpha
    out_freq = FreqSymbols.from_values(values)
    out_signal = idft(out_freq, oversampling)
    in_energy = freq.energy
    report = PaprReport(
        papr_linear=papr_linear_of(out_signal.samples),
        technique="sap",
        aux={
            "scaled": int(selected.size),
            "scaled_indices": selected,
            "energy_ratio": out_freq.energy / in_energy,
        },
    )
    return out_signal, out_freq, report
