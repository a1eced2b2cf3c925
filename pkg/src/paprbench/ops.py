"""Orthogonal pilot sequences: pick, per symbol, the pilot filling that
minimizes PAPR; the receiver identifies the choice by correlation alone."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import hadamard

from . import kernels
from .core import FreqSymbols, PaprReport, TimeSignal, idft_array


@dataclass(frozen=True, eq=False)
class PilotGrid:
    """Sorted pilot subcarrier positions within one OFDM symbol."""

    positions: np.ndarray
    n_subcarriers: int

    def __post_init__(self):
        pos = np.unique(np.asarray(self.positions, dtype=np.int64))
        object.__setattr__(self, "positions", pos)
        if pos.size < 1 or pos.size >= self.n_subcarriers:
            raise ValueError("need 1 <= N_p < N pilot positions")
        if pos[0] < 0 or pos[-1] >= self.n_subcarriers:
            raise ValueError("pilot positions out of range")

    @property
    def n_pilots(self) -> int:
        return len(self.positions)

    def data_positions(self) -> np.ndarray:
        mask = np.ones(self.n_subcarriers, dtype=bool)
        mask[self.positions] = False
        return np.nonzero(mask)[0]


@dataclass(frozen=True, eq=False)
class PilotSequenceSet:
    """M mutually orthogonal pilot sequences, nonzero only on the grid."""

    sequences: np.ndarray
    m_count: int
    grid: PilotGrid

    def __post_init__(self):
        seq = np.ascontiguousarray(self.sequences, dtype=np.complex128)
        object.__setattr__(self, "sequences", seq)
        if seq.shape != (self.m_count, self.grid.n_subcarriers):
            raise ValueError("sequence matrix shape does not match m_count and N")


def pilot_grid(n: int, n_pilots: int) -> PilotGrid:
    """Equispaced comb: pilot every N/N_p subcarriers starting at 0."""
    if not 1 <= n_pilots < n:
        raise ValueError(f"need 1 <= N_p < N, got N_p={n_pilots}, N={n}")
    if n % n_pilots != 0:
        raise ValueError(f"N_p={n_pilots} must divide N={n} for the comb grid")
    return PilotGrid(np.arange(0, n, n // n_pilots), n)


def hadamard_set(n: int, grid: PilotGrid, m: int) -> PilotSequenceSet:
    """First M rows of the order-N_p Walsh-Hadamard matrix placed on the grid."""
    n_p = grid.n_pilots
    if n_p & (n_p - 1) or n_p < 1:
        raise ValueError(f"pilot count must be a power of two, got {n_p}")
    if not 1 <= m <= n_p:
        raise ValueError(f"need 1 <= M <= N_p, got M={m}, N_p={n_p}")
    rows = hadamard(n_p).astype(np.float64)[:m]
    sequences = np.zeros((m, n), dtype=np.complex128)
    sequences[:, grid.positions] = rows
    return PilotSequenceSet(sequences, m, grid)


def pilot_time_signals(pset: PilotSequenceSet, oversampling: int) -> np.ndarray:
    """Oversampled time-domain waveform of every pilot sequence, shape (M, L*N)."""
    return idft_array(pset.sequences, oversampling)


def ops_select(
    data: FreqSymbols,
    pset: PilotSequenceSet,
    oversampling: int = 4,
    pilot_time: np.ndarray = None,
) -> tuple[TimeSignal, int, PaprReport]:
    """Add each candidate pilot sequence and keep the lowest-PAPR combination.

    The data signal is transformed once; candidates only differ by the
    precomputable pilot waveforms, so the scan is a cheap shifted-PAPR search.
    Ties break toward the smallest sequence index.
    """
    grid = pset.grid
    if data.n_subcarriers != grid.n_subcarriers:
        raise ValueError("data symbol size does not match the pilot grid")
    if np.any(data.values[grid.positions] != 0):
        raise ValueError("data symbols must be zero at pilot positions")
    if pilot_time is None:
        pilot_time = pilot_time_signals(pset, oversampling)
    x = idft_array(data.values, oversampling)
    chosen, ratio = kernels.best_shifted_papr(x, pilot_time)
    chosen = int(chosen)
    signal = TimeSignal(x + pilot_time[chosen], int(oversampling))
    report = PaprReport(
        papr_linear=float(ratio),
        technique="ops",
        aux={"chosen_m": chosen, "candidates": pset.m_count},
    )
    return signal, chosen, report


def ops_blind_detect(received: FreqSymbols, pset: PilotSequenceSet) -> int:
    """Identify the transmitted pilot sequence from the waveform alone.

    Correlates the received pilot tones against every sequence and returns the
    index with the largest real part, which is exact on noiseless input thanks
    to orthogonality.
    """
    pos = pset.grid.positions
    scores = (received.values[pos][None, :] * np.conj(pset.sequences[:, pos])).sum(axis=1)
    return int(np.argmax(scores.real))


def embed_data(data_values: np.ndarray, grid: PilotGrid) -> FreqSymbols:
    """Place data symbols on the non-pilot tones of an N-subcarrier symbol."""
    if len(data_values) != grid.n_subcarriers - grid.n_pilots:
        raise ValueError("need exactly one value per data tone")
    values = np.zeros(grid.n_subcarriers, dtype=np.complex128)
    values[grid.data_positions()] = data_values
    return FreqSymbols(values, grid.n_subcarriers)
