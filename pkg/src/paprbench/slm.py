"""Selected mapping: pick the lowest-PAPR candidate among phase-rotated copies."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import FreqSymbols, PaprReport, TimeSignal, idft_array

ALPHABETS = ("pm1", "qpsk", "random")


@dataclass(frozen=True, eq=False)
class PhaseSequenceBank:
    """U unit-modulus phase sequences of length N; row 0 is always all-ones."""

    sequences: np.ndarray
    u_count: int

    def __post_init__(self):
        seq = np.ascontiguousarray(self.sequences, dtype=np.complex128)
        object.__setattr__(self, "sequences", seq)
        if seq.shape != (self.u_count, seq.shape[1]):
            raise ValueError("sequence matrix shape does not match u_count")

    @property
    def n_subcarriers(self) -> int:
        return self.sequences.shape[1]


def _draw_row(rng: np.random.Generator, n: int, alphabet: str) -> np.ndarray:
    if alphabet == "pm1":
        return np.where(rng.random(n) < 0.5, 1.0, -1.0).astype(np.complex128)
    if alphabet == "qpsk":
        quad = rng.integers(0, 4, n)
        return np.exp(1j * (np.pi / 4.0 + np.pi / 2.0 * quad))
    if alphabet == "random":
        return np.exp(2j * np.pi * rng.random(n))
    raise ValueError(f"unknown phase alphabet {alphabet!r} (choose from {ALPHABETS})")


def generate_bank(u_count: int, n: int, alphabet: str = "pm1", seed=0) -> PhaseSequenceBank:
    """Seeded bank of U phase sequences; row u depends only on (seed, u).

    Because each row is derived from its own (seed, u) stream, banks generated
    with the same seed are nested: the first U rows of a larger bank equal the
    smaller bank.
    """
    if u_count < 1:
        raise ValueError("need at least one phase sequence")
    rows = np.ones((u_count, n), dtype=np.complex128)
    for u in range(1, u_count):
        rng = np.random.default_rng([int(seed), u])
        rows[u] = _draw_row(rng, n, alphabet)
    return PhaseSequenceBank(rows, u_count)


def slm_select(
    freq: FreqSymbols, bank: PhaseSequenceBank, oversampling: int = 4
) -> tuple[TimeSignal, int, PaprReport]:
    """Evaluate every candidate S*B_u and transmit the one with lowest PAPR.

    Ties are broken toward the smallest u, so the result is deterministic.
    """
    if bank.n_subcarriers != freq.n_subcarriers:
        raise ValueError(
            f"bank is for N={bank.n_subcarriers}, symbol has N={freq.n_subcarriers}"
        )
    candidates = idft_array(freq.values[None, :] * bank.sequences, oversampling)
    chosen, ratio = kernels.best_candidate_papr(candidates)
    chosen = int(chosen)
    signal = TimeSignal(candidates[chosen], int(oversampling))
    report = PaprReport(
        papr_linear=float(ratio),
        technique="slm",
        aux={"chosen_u": chosen, "candidates": bank.u_count},
    )
    return signal, chosen, report


def slm_recover(received: FreqSymbols, bank: PhaseSequenceBank, chosen_u: int) -> FreqSymbols:
    """Undo the transmitter's phase rotation (exact on noiseless input)."""
    if not 0 <= chosen_u < bank.u_count:
        raise IndexError(f"sequence index {chosen_u} out of range [0, {bank.u_count})")
    return FreqSymbols.from_values(received.values / bank.sequences[chosen_u])
