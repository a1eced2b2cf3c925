"""Tone reservation: a correction confined to reserved tones lowers the peak.

Two solvers are provided.  The scalable one is iterative clipping projection:
clip the oversampled signal at the target level, project what clipping
removed onto the reserved-tone subspace, and subtract it from the correction.
For small instances an exact linear program minimizing the infinity norm of
the real and imaginary parts serves as a quality reference.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clipping import clip_array
from .core import (
    FreqSymbols,
    PaprReport,
    TimeSignal,
    centered_freqs,
    idft_array,
    papr_linear_of,
)

PLACEMENTS = ("equispaced", "random", "edge")

#: the exact LP solves 4*L*N inequality rows; keep it at desk scale
LP_MAX_N = 32


@dataclass(frozen=True, eq=False)
class ReservedToneSet:
    """Sorted subcarrier indices reserved for the correction signal."""

    indices: np.ndarray
    placement: str
    n_subcarriers: int

    def __post_init__(self):
        idx = np.unique(np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "indices", idx)
        if idx.size < 1 or idx.size >= self.n_subcarriers:
            raise ValueError("need 1 <= R < N reserved tones")
        if idx[0] < 0 or idx[-1] >= self.n_subcarriers:
            raise ValueError("reserved indices out of range")

    @property
    def r_count(self) -> int:
        return len(self.indices)

    def data_mask(self) -> np.ndarray:
        mask = np.ones(self.n_subcarriers, dtype=bool)
        mask[self.indices] = False
        return mask


@dataclass(frozen=True, eq=False)
class Correction:
    """Frequency-domain correction, exactly zero on every data tone."""

    freq_values: np.ndarray
    per_tone_cap: float

    def __post_init__(self):
        object.__setattr__(
            self, "freq_values", np.ascontiguousarray(self.freq_values, dtype=np.complex128)
        )


def reserved_tones(n: int, r: int, placement: str = "equispaced", seed=0) -> ReservedToneSet:
    """Pick R of N tones: an even comb, a seeded draw, or the band edge."""
    if not 1 <= r < n:
        raise ValueError(f"need 1 <= R < N, got R={r}, N={n}")
    if placement == "equispaced":
        if n % r != 0:
            raise ValueError(f"R={r} must divide N={n} for equispaced placement")
        idx = np.arange(0, n, n // r)
    elif placement == "random":
        idx = np.random.default_rng(seed).choice(n, size=r, replace=False)
    elif placement == "edge":
        # the outermost frequencies sit around bin N/2 in FFT layout
        half = r // 2
        idx = np.arange(n // 2 - half, n // 2 + (r - half))
    else:
        raise ValueError(f"unknown placement {placement!r} (choose from {PLACEMENTS})")
    return ReservedToneSet(np.sort(idx), placement, n)


def _check_data_clear(freq: FreqSymbols, tones: ReservedToneSet):
    if np.any(freq.values[tones.indices] != 0):
        raise ValueError("data symbols must be zero on the reserved tones")


def default_cap(freq: FreqSymbols, tones: ReservedToneSet) -> float:
    """Twice the mean data-tone amplitude."""
    data = freq.values[tones.data_mask()]
    return 2.0 * float(np.mean(np.abs(data)))


def tr_iterative(
    freq: FreqSymbols,
    tones: ReservedToneSet,
    oversampling: int = 4,
    target_db: float = 6.0,
    max_iters: int = 20,
    cap: float = None,
) -> tuple[TimeSignal, Correction, PaprReport]:
    """Iterative clipping projection toward ``target_db`` above RMS amplitude.

    The correction never touches data tones.  If the final signal is worse
    than the input (possible when the cap binds hard), the input is returned
    unchanged with a zero correction.
    """
    _check_data_clear(freq, tones)
    if max_iters < 1:
        raise ValueError("need max_iters >= 1")
    n = freq.n_subcarriers
    ln = n * oversampling
    if cap is None:
        cap = default_cap(freq, tones)

    s0 = idft_array(freq.values, oversampling)
    rms = np.sqrt(np.mean(np.abs(s0) ** 2))
    target_a = rms * 10.0 ** (target_db / 20.0)
    correction = np.zeros(n, dtype=np.complex128)
    data_mask = tones.data_mask()

    samples = s0
    iters_used = 0
    for _ in range(max_iters):
        if np.max(np.abs(samples)) <= target_a:
            break
        iters_used += 1
        residual = samples - clip_array(samples, target_a)
        spec = np.fft.fft(residual) * (np.sqrt(n) / ln)
        folded = np.concatenate([spec[: n // 2], spec[ln - n // 2:]])
        folded[data_mask] = 0.0
        correction = correction - folded
        if cap > 0:
            mag = np.abs(correction[tones.indices])
            over = mag > cap
            if np.any(over):
                vals = correction[tones.indices]
                correction[tones.indices] = np.where(over, cap * vals / mag, vals)
        samples = idft_array(freq.values + correction, oversampling)

    initial_papr = papr_linear_of(s0)
    final_papr = papr_linear_of(samples)
    if final_papr > initial_papr:
        samples = s0
        correction = np.zeros(n, dtype=np.complex128)
        final_papr = initial_papr

    signal = TimeSignal(samples, int(oversampling))
    report = PaprReport(
        papr_linear=final_papr,
        technique="tr",
        aux={
            "iterations": iters_used,
            "initial_papr_db": 10.0 * np.log10(initial_papr),
            "target_amplitude": float(target_a),
        },
    )
    return signal, Correction(correction, float(cap)), report


def tone_basis(n: int, tones: ReservedToneSet, oversampling: int) -> np.ndarray:
    """Oversampled time-domain waveform of each reserved tone, as columns."""
    ln = n * oversampling
    t = np.arange(ln)
    f = centered_freqs(n)[tones.indices]
    return np.exp((2j * np.pi / ln) * np.outer(t, f)) / np.sqrt(n)


def box_peak(samples: np.ndarray) -> float:
    """max over samples of max(|Re|, |Im|): the LP's surrogate peak objective."""
    return float(max(np.abs(samples.real).max(), np.abs(samples.imag).max()))


def tr_lp_oracle(
    freq: FreqSymbols, tones: ReservedToneSet, oversampling: int = 4
) -> Correction:
    """Exact minimizer of the box-surrogate peak over reserved-tone corrections.

    Solves min_c max_n max(|Re|, |Im|) of the corrected signal as a linear
    program over the real and imaginary parts of the reserved tones.  The
    surrogate is within sqrt(2) of the true envelope peak.  Intended as a
    reference for small instances only.
    """
    from scipy.optimize import linprog

    _check_data_clear(freq, tones)
    n = freq.n_subcarriers
    if n > LP_MAX_N:
        raise ValueError(f"LP oracle limited to N <= {LP_MAX_N}, got N={n}")
    s0 = idft_array(freq.values, oversampling)
    basis = tone_basis(n, tones, oversampling)
    ln, r = basis.shape

    bre, bim = basis.real, basis.imag
    ones = np.ones((ln, 1))
    # variables: [c_re (R), c_im (R), t]; rows bound +-Re and +-Im by t
    a_ub = np.vstack(
        [
            np.hstack([bre, -bim, -ones]),
            np.hstack([-bre, bim, -ones]),
            np.hstack([bim, bre, -ones]),
            np.hstack([-bim, -bre, -ones]),
        ]
    )
    b_ub = np.concatenate([-s0.real, s0.real, -s0.imag, s0.imag])
    cost = np.zeros(2 * r + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * (2 * r + 1), method="highs")
    if not res.success:
        raise RuntimeError(f"LP solver failed: {res.message}")
    values = np.zeros(n, dtype=np.complex128)
    values[tones.indices] = res.x[:r] + 1j * res.x[r: 2 * r]
    return Correction(values, float(np.max(np.abs(values[tones.indices]), initial=0.0)))


def tr_minimize_peak(
    freq: FreqSymbols,
    tones: ReservedToneSet,
    oversampling: int = 4,
    shrink: float = 0.97,
    inner_iters: int = 60,
    max_stages: int = 80,
) -> tuple[TimeSignal, Correction]:
    """Drive the iterative solver to convergence by lowering the target stepwise.

    Uncapped; used to cross-check the iterative method against the LP oracle.
    """
    _check_data_clear(freq, tones)
    n = freq.n_subcarriers
    ln = n * oversampling
    data_mask = tones.data_mask()
    samples = idft_array(freq.values, oversampling)
    correction = np.zeros(n, dtype=np.complex128)
    best_correction = correction
    target = np.max(np.abs(samples))
    for _ in range(max_stages):
        target *= shrink
        for _ in range(inner_iters):
            if np.max(np.abs(samples)) <= target:
                break
            residual = samples - clip_array(samples, target)
            spec = np.fft.fft(residual) * (np.sqrt(n) / ln)
            folded = np.concatenate([spec[: n // 2], spec[ln - n // 2:]])
            folded[data_mask] = 0.0
            correction = correction - folded
            samples = idft_array(freq.values + correction, oversampling)
        if np.max(np.abs(samples)) <= target * 1.0001:
            best_correction = correction.copy()
        else:
            break
    samples = idft_array(freq.values + best_correction, oversampling)
    return TimeSignal(samples, int(oversampling)), Correction(best_correction, np.inf)
