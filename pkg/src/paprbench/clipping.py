"""Amplitude clipping, out-of-band filtering and the iterative CF loop."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import FreqSymbols, TimeSignal, idft


@dataclass(frozen=True)
class ClipConfig:
    """Clip level is ``clip_ratio_db`` above the symbol's RMS amplitude."""

    clip_ratio_db: float = 5.0
    oversampling: int = 4
    iterations: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("need at least one clip-and-filter iteration")
        if self.oversampling < 1:
            raise ValueError("oversampling factor must be >= 1")

    def level_for(self, samples: np.ndarray) -> float:
        rms = float(np.sqrt(np.mean(np.abs(samples) ** 2)))
        return rms * 10.0 ** (self.clip_ratio_db / 20.0)


def clip_array(samples: np.ndarray, level_a: float) -> np.ndarray:
    """Soft envelope limiter on a raw sample vector.

    The envelope bound |out| <= level_a holds exactly (not just to rounding),
    which also makes the limiter exactly idempotent: sub-level samples pass
    through untouched, so a second application is the identity.
    """
    if level_a <= 0:
        raise ValueError("clip level must be positive")
    mag = np.abs(samples)
    out = np.array(samples, dtype=np.complex128)
    over = mag > level_a
    if not np.any(over):
        return out
    scale = level_a / mag[over]
    vals = samples[over] * scale
    # rescaling can overshoot the level by an ulp; walk the scale down until
    # the bound holds (the scale strictly decreases, so this terminates)
    while True:
        bad = np.abs(vals) > level_a
        if not np.any(bad):
            break
        scale = np.where(bad, np.nextafter(scale, 0.0), scale)
        vals = samples[over] * scale
    out[over] = vals
    return out


def clip(signal: TimeSignal, level_a: float) -> TimeSignal:
    """Limit the envelope to ``level_a``; phases and sub-level samples unchanged."""
    return TimeSignal(clip_array(signal.samples, level_a), signal.oversampling)


def _band_mask(n: int, ln: int) -> np.ndarray:
    mask = np.zeros(ln, dtype=bool)
    mask[: n // 2] = True
    mask[ln - n // 2:] = True
    return mask


def filter_oob(signal: TimeSignal, n_subcarriers: int = None) -> TimeSignal:
    """Zero every frequency bin outside the N occupied subcarriers.

    A brick-wall mask in the oversampled spectrum; in-band bins pass through
    untouched.  At L=1 there are no out-of-band bins, so the signal is
    returned unchanged with a warning.
    """
    n = signal.n_subcarriers if n_subcarriers is None else int(n_subcarriers)
    if signal.oversampling == 1:
        warnings.warn("filter_oob at L=1 is a no-op (no out-of-band bins)", stacklevel=2)
        return signal
    ln = len(signal.samples)
    spec = np.fft.fft(signal.samples)
    spec[~_band_mask(n, ln)] = 0.0
    return TimeSignal(np.fft.ifft(spec), signal.oversampling)


def clip_and_filter(freq: FreqSymbols, cfg: ClipConfig) -> tuple[TimeSignal, np.ndarray]:
    """Repeat (clip at A, filter) ``cfg.iterations`` times.

    The clip level A is fixed from the RMS of the initial unclipped signal.
    Returns the final signal and the max-amplitude trace, one entry per
    iteration measured after filtering (after clipping when L=1).
    """
    signal = idft(freq, cfg.oversampling)
    level_a = cfg.level_for(signal.samples)
    peaks = np.empty(cfg.iterations)
    with warnings.catch_warnings():
        if cfg.oversampling == 1:
            warnings.simplefilter("ignore")
        for it in range(cfg.iterations):
            signal = filter_oob(clip(signal, level_a), freq.n_subcarriers)
            peaks[it] = np.max(np.abs(signal.samples))
    return signal, peaks


def evm_inband(original: FreqSymbols, processed: TimeSignal) -> float:
    """RMS in-band error of a processed signal against the source constellation."""
    from .core import dft

    received = dft(processed).values
    err = received - original.values
    return float(np.sqrt(np.mean(np.abs(err) ** 2)))
