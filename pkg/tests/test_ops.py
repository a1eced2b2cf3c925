import numpy as np
import numpy.testing as npt
import pytest

from paprbench.core import FreqSymbols, idft, qpsk_demap, qpsk_map
from paprbench.ops import (
    PilotSequenceSet,
    embed_data,
    hadamard_set,
    ops_blind_detect,
    ops_select,
    pilot_grid,
    pilot_time_signals,
)

from conftest import naive_papr_linear, random_qpsk


def _random_data_symbol(rng, grid):
    data = random_qpsk(rng, grid.n_subcarriers - grid.n_pilots)
    return embed_data(data, grid)


class TestPilotGrid:
    def test_equispaced_comb(self):
        grid = pilot_grid(16, 4)
        npt.assert_array_equal(grid.positions, [0, 4, 8, 12])

    def test_bounds(self):
        with pytest.raises(ValueError):
            pilot_grid(16, 0)
        with pytest.raises(ValueError):
            pilot_grid(16, 16)
        with pytest.raises(ValueError):
            pilot_grid(16, 3)


class TestHadamardSet:
    def test_order_two_anchor(self):
        grid = pilot_grid(8, 2)
        pset = hadamard_set(8, grid, 2)
        npt.assert_array_equal(pset.sequences[0, grid.positions].real, [1, 1])
        npt.assert_array_equal(pset.sequences[1, grid.positions].real, [1, -1])

    def test_zero_off_grid(self):
        grid = pilot_grid(32, 8)
        pset = hadamard_set(32, grid, 4)
        off = np.delete(np.arange(32), grid.positions)
        assert np.all(pset.sequences[:, off] == 0)

    def test_gram_matrix_exact(self):
        grid = pilot_grid(256, 16)
        pset = hadamard_set(256, grid, 16)
        gram = (pset.sequences @ pset.sequences.conj().T).real
        npt.assert_array_equal(gram, 16.0 * np.eye(16))

    def test_rejects_bad_parameters(self):
        grid = pilot_grid(256, 16)
        with pytest.raises(ValueError):
            hadamard_set(256, grid, 17)
        bad_grid = pilot_grid(96, 12)
        with pytest.raises(ValueError):
            hadamard_set(96, bad_grid, 4)


class TestOpsSelect:
    def test_single_sequence_deterministic(self, rng):
        grid = pilot_grid(64, 8)
        pset = hadamard_set(64, grid, 1)
        data = _random_data_symbol(rng, grid)
        sig1, m1, _ = ops_select(data, pset, 4)
        sig2, m2, _ = ops_select(data, pset, 4)
        assert m1 == m2 == 0
        npt.assert_array_equal(sig1.samples, sig2.samples)

    def test_chosen_beats_all_candidates(self, rng):
        grid = pilot_grid(64, 8)
        pset = hadamard_set(64, grid, 8)
        data = _random_data_symbol(rng, grid)
        _, chosen, report = ops_select(data, pset, 4)
        ratios = [
            naive_papr_linear(
                idft(FreqSymbols.from_values(data.values + pset.sequences[m]), 4).samples
            )
            for m in range(8)
        ]
        assert report.papr_linear == pytest.approx(min(ratios), rel=1e-9)
        assert chosen == int(np.argmin(ratios))

    def test_nonzero_data_on_pilot_rejected(self, rng):
        grid = pilot_grid(16, 4)
        pset = hadamard_set(16, grid, 2)
        freq = FreqSymbols.from_values(random_qpsk(rng, 16))
        with pytest.raises(ValueError):
            ops_select(freq, pset, 2)

    def test_monotone_in_m_nested_sets(self, rng):
        grid = pilot_grid(64, 16)
        full = hadamard_set(64, grid, 16)
        data = _random_data_symbol(rng, grid)
        prev = np.inf
        for m in (1, 2, 4, 8, 16):
            pset = PilotSequenceSet(full.sequences[:m], m, grid)
            _, _, report = ops_select(data, pset, 4)
            assert report.papr_linear <= prev + 1e-12
            prev = report.papr_linear

    def test_precomputed_pilot_time_matches(self, rng):
        grid = pilot_grid(64, 8)
        pset = hadamard_set(64, grid, 4)
        data = _random_data_symbol(rng, grid)
        cached = pilot_time_signals(pset, 4)
        sig1, m1, _ = ops_select(data, pset, 4)
        sig2, m2, _ = ops_select(data, pset, 4, pilot_time=cached)
        assert m1 == m2
        npt.assert_array_equal(sig1.samples, sig2.samples)


class TestBlindDetect:
    def test_noiseless_roundtrip(self, rng):
        grid = pilot_grid(64, 16)
        pset = hadamard_set(64, grid, 8)
        for _ in range(50):
            data = _random_data_symbol(rng, grid)
            _, chosen, _ = ops_select(data, pset, 4)
            received = FreqSymbols.from_values(data.values + pset.sequences[chosen])
            assert ops_blind_detect(received, pset) == chosen

    def test_detection_ignores_data_tones(self, rng):
        grid = pilot_grid(32, 8)
        pset = hadamard_set(32, grid, 4)
        pilots_only = FreqSymbols.from_values(pset.sequences[1].copy())
        with_data = FreqSymbols.from_values(
            pset.sequences[1] + _random_data_symbol(rng, grid).values
        )
        assert ops_blind_detect(pilots_only, pset) == 1
        assert ops_blind_detect(with_data, pset) == 1

    def test_awgn_detection_error_rate(self, rng):
        # 10 dB per-tone pilot SNR: unit pilot power, complex noise variance 0.1
        grid = pilot_grid(256, 16)
        pset = hadamard_set(256, grid, 8)
        sigma = np.sqrt(10 ** (-10 / 10))
        trials = 10_000
        errors = 0
        for _ in range(trials):
            m = int(rng.integers(0, 8))
            noise = (rng.normal(size=16) + 1j * rng.normal(size=16)) * (sigma / np.sqrt(2))
            received = pset.sequences[m].copy()
            received[grid.positions] += noise
            if ops_blind_detect(FreqSymbols.from_values(received), pset) != m:
                errors += 1
        assert errors / trials < 1e-3

    def test_data_untouched_by_pilot_choice(self, rng):
        grid = pilot_grid(64, 8)
        pset = hadamard_set(64, grid, 8)
        bits = rng.integers(0, 2, 2 * (64 - 8)).astype(np.uint8)
        data = embed_data(qpsk_map(bits).values, grid)
        _, chosen, _ = ops_select(data, pset, 4)
        received = data.values + pset.sequences[chosen]
        data_positions = grid.data_positions()
        recovered = FreqSymbols.from_values(received[data_positions])
        npt.assert_array_equal(qpsk_demap(recovered), bits)
