"""Partial transmit sequences: per-subblock phase factors searched for low PAPR."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import FreqSymbols, PaprReport, TimeSignal, idft_array

SCHEMES = ("adjacent", "interleaved", "pseudorandom")

#: exhaustive search is W^(V-1); refuse anything larger by default
DEFAULT_V_CAP = 8


@dataclass(frozen=True, eq=False)
class Partition:
    """Assignment of each subcarrier to one of V disjoint subblocks."""

    assignment: np.ndarray
    scheme: str
    v_count: int

    def __post_init__(self):
        assign = np.ascontiguousarray(self.assignment, dtype=np.int64)
        object.__setattr__(self, "assignment", assign)
        counts = np.bincount(assign, minlength=self.v_count)
        if len(counts) > self.v_count or np.any(assign < 0):
            raise ValueError("assignment uses subblock indices outside [0, V)")
        if np.any(counts == 0):
            raise ValueError("every subblock must be nonempty")


@dataclass(frozen=True, eq=False)
class PhaseFactors:
    """Unit-modulus factor per subblock; the first factor is pinned to 1."""

    b: np.ndarray
    alphabet_size: int

    def __post_init__(self):
        b = np.ascontiguousarray(self.b, dtype=np.complex128)
        object.__setattr__(self, "b", b)
        if not np.allclose(np.abs(b), 1.0, atol=1e-12):
            raise ValueError("phase factors must have unit modulus")
        if b[0] != 1.0:
            raise ValueError("reference subblock factor must be 1")


def phase_table(w: int) -> np.ndarray:
    """The W-th roots of unity, exact for the supported W in {2, 4}."""
    if w == 2:
        return np.array([1.0 + 0j, -1.0 + 0j])
    if w == 4:
        return np.array([1.0 + 0j, 1j, -1.0 + 0j, -1j])
    raise ValueError(f"phase alphabet size must be 2 or 4, got {w}")


def partition(n: int, v: int, scheme: str = "adjacent", seed=0) -> Partition:
    """Build a subcarrier-to-subblock assignment for one of the three schemes."""
    if v < 1 or v > n:
        raise ValueError(f"need 1 <= V <= N, got V={v}, N={n}")
    if scheme in ("adjacent", "interleaved") and n % v != 0:
        raise ValueError(f"V={v} must divide N={n} for the {scheme} scheme")
    if scheme == "adjacent":
        assign = np.repeat(np.arange(v), n // v)
    elif scheme == "interleaved":
        assign = np.arange(n) % v
    elif scheme == "pseudorandom":
        rng = np.random.default_rng(seed)
        while True:
            assign = rng.integers(0, v, n)
            if len(np.unique(assign)) == v:
                break
    else:
        raise ValueError(f"unknown partition scheme {scheme!r} (choose from {SCHEMES})")
    return Partition(assign.astype(np.int64), scheme, v)


def partial_signals(freq: FreqSymbols, part: Partition, oversampling: int) -> np.ndarray:
    """Time-domain signal of each masked subblock, stacked as a (V, L*N) array."""
    masked = np.zeros((part.v_count, freq.n_subcarriers), dtype=np.complex128)
    masked[part.assignment, np.arange(freq.n_subcarriers)] = freq.values
    return idft_array(masked, oversampling)


def pts_combine(subsignals, factors: PhaseFactors) -> TimeSignal:
    """Weighted sum of the partial transmit sequences (a list of TimeSignals)."""
    subsignals = list(subsignals)
    lengths = {len(s.samples) for s in subsignals}
    if len(lengths) != 1:
        raise ValueError("partial signals differ in length")
    if len(subsignals) != len(factors.b):
        raise ValueError("one phase factor per subblock required")
    stack = np.stack([s.samples for s in subsignals])
    return TimeSignal(factors.b @ stack, subsignals[0].oversampling)


def _search(freq, part, w, oversampling, kernel):
    subs = partial_signals(freq, part, oversampling)
    table = phase_table(w)
    codes, ratio = kernel(subs, table)
    factors = PhaseFactors(table[np.asarray(codes)], w)
    signal = TimeSignal(factors.b @ subs, int(oversampling))
    return signal, factors, float(ratio), np.asarray(codes)


def pts_exhaustive(
    freq: FreqSymbols,
    part: Partition,
    w: int = 2,
    oversampling: int = 4,
    v_cap: int = DEFAULT_V_CAP,
) -> tuple[TimeSignal, PhaseFactors, PaprReport]:
    """Search all W^(V-1) factor vectors (b_0 = 1) for the global minimum.

    Ties resolve to the lexicographically smallest vector of alphabet indices.
    """
    if part.v_count > v_cap:
        raise ValueError(
            f"V={part.v_count} exceeds the exhaustive search cap {v_cap}"
        )
    signal, factors, ratio, codes = _search(
        freq, part, w, oversampling, kernels.pts_exhaustive_search
    )
    report = PaprReport(
        papr_linear=ratio,
        technique="pts",
        aux={
            "codes": codes,
            "candidates": int(len(phase_table(w)) ** (part.v_count - 1)),
            "search": "exhaustive",
        },
    )
    return signal, factors, report


def pts_iterative(
    freq: FreqSymbols, part: Partition, w: int = 2, oversampling: int = 4
) -> tuple[TimeSignal, PhaseFactors, PaprReport]:
    """Greedy single pass over subblocks; cheap, never worse than all-ones."""
    signal, factors, ratio, codes = _search(
        freq, part, w, oversampling, kernels.pts_greedy_search
    )
    report = PaprReport(
        papr_linear=ratio,
        technique="pts",
        aux={
            "codes": codes,
            "candidates": int(1 + (part.v_count - 1) * w),
            "search": "iterative",
        },
    )
    return signal, factors, report


def pts_recover(received: FreqSymbols, part: Partition, factors: PhaseFactors) -> FreqSymbols:
    """Divide each subblock by its phase factor (exact on noiseless input)."""
    if len(factors.b) != part.v_count:
        raise ValueError("factor count does not match the partition")
    return FreqSymbols.from_values(received.values / factors.b[part.assignment])
