"""OFDM baseband signal model: transforms, QPSK mapping, PAPR and CCDF metrics.

Conventions used throughout the package:

* A frequency-domain symbol holds ``N`` complex values, one per subcarrier,
  indexed ``k = 0 .. N-1``.  Indices below ``N/2`` are positive frequencies,
  indices from ``N/2`` up are the negative-frequency half (standard FFT
  layout).
* The synthesis transform is ``s[n] = (1/sqrt(N)) * sum_k S(k) e^{j2pi f(k) n/(LN)}``
  with ``f(k) = k`` for ``k < N/2`` and ``f(k) = k - N`` otherwise.
  Oversampling by ``L`` is trigonometric interpolation, realized by inserting
  ``(L-1)N`` zeros at the spectrum center before the inverse FFT.
* The ``1/sqrt(N)`` scaling keeps the average sample power independent of
  ``L``.  Time-domain energy is therefore reported per Nyquist interval
  (``sum |s|^2 / L``) so that it equals the generating spectrum's energy for
  every ``L``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

#: default CCDF threshold grid: 4.0 .. 13.0 dB in 0.1 dB steps
DEFAULT_GRID_DB = (4.0, 13.0, 0.1)


class UndefinedPaprError(ValueError):
    """Raised when the PAPR of an all-zero signal is requested."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _as_complex_vector(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class FreqSymbols:
    """One OFDM symbol in the frequency domain: N complex constellation values."""

    values: np.ndarray
    n_subcarriers: int

    def __post_init__(self):
        object.__setattr__(self, "values", _as_complex_vector(self.values))
        if len(self.values) != self.n_subcarriers:
            raise ValueError(
                f"got {len(self.values)} values for {self.n_subcarriers} subcarriers"
            )

    @classmethod
    def from_values(cls, values) -> "FreqSymbols":
        vec = _as_complex_vector(values)
        return cls(vec, len(vec))

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


@dataclass(frozen=True, eq=False)
class TimeSignal:
    """One OFDM symbol in the time domain: L*N samples at L times the Nyquist rate."""

    samples: np.ndarray
    oversampling: int

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_complex_vector(self.samples))
        if self.oversampling < 1:
            raise ValueError("oversampling factor must be >= 1")
        if len(self.samples) % self.oversampling != 0:
            raise ValueError(
                f"{len(self.samples)} samples do not split into oversampling={self.oversampling}"
            )

    @property
    def n_subcarriers(self) -> int:
        return len(self.samples) // self.oversampling

    @property
    def energy(self) -> float:
        """Energy per Nyquist interval (sum |s|^2 / L); matches the spectrum energy."""
        return float(np.sum(np.abs(self.samples) ** 2)) / self.oversampling


@dataclass(frozen=True, eq=False)
class PaprReport:
    """Per-symbol PAPR with the producing technique's metadata."""

    papr_linear: float
    papr_db: float = field(default=None)  # type: ignore[assignment]
    technique: str = "none"
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.papr_linear < 0:
            raise ValueError("PAPR ratio cannot be negative")
        if self.papr_db is None:
            object.__setattr__(self, "papr_db", 10.0 * np.log10(self.papr_linear))
        elif abs(self.papr_db - 10.0 * np.log10(self.papr_linear)) > 1e-12:
            raise ValueError("papr_db does not match papr_linear")


@dataclass(frozen=True, eq=False)
class CcdfCurve:
    """Empirical exceedance probabilities on an increasing dB threshold grid."""

    thresholds_db: np.ndarray
    probabilities: np.ndarray
    n_symbols: int

    def __post_init__(self):
        object.__setattr__(
            self, "thresholds_db", np.ascontiguousarray(self.thresholds_db, dtype=np.float64)
        )
        object.__setattr__(
            self, "probabilities", np.ascontiguousarray(self.probabilities, dtype=np.float64)
        )
        if self.thresholds_db.shape != self.probabilities.shape:
            raise ValueError("thresholds and probabilities must have equal length")


def default_thresholds(start: float = None, stop: float = None, step: float = None) -> np.ndarray:
    """Build the dB threshold grid, defaulting to 4.0:13.0:0.1."""
    s0, s1, ds = DEFAULT_GRID_DB
    start = s0 if start is None else start
    stop = s1 if stop is None else stop
    step = ds if step is None else step
    if step <= 0 or stop <= start:
        raise ValueError("need stop > start and step > 0")
    count = int(round((stop - start) / step)) + 1
    return start + step * np.arange(count)


def centered_freqs(n: int) -> np.ndarray:
    """Signed frequency index per FFT bin: 0..N/2-1, then -N/2..-1."""
    k = np.arange(n)
    return np.where(k < (n + 1) // 2, k, k - n)


def idft_array(values: np.ndarray, oversampling: int) -> np.ndarray:
    """Synthesis transform on raw arrays; accepts (..., N) batches.

    Zero-pads the spectrum center to length L*N and applies the inverse FFT
    scaled so the result equals (1/sqrt(N)) * sum_k S(k) e^{j2pi f(k) n / (LN)}.
    """
    values = np.asarray(values, dtype=np.complex128)
    n = values.shape[-1]
    lf = int(oversampling)
    if n < 2:
        raise ValueError("need at least 2 subcarriers")
    if not _is_pow2(n):
        raise ValueError(f"subcarrier count must be a power of two, got {n}")
    if lf < 1:
        raise ValueError("oversampling factor must be >= 1")
    ln = lf * n
    padded = np.zeros(values.shape[:-1] + (ln,), dtype=np.complex128)
    padded[..., : n // 2] = values[..., : n // 2]
    padded[..., ln - n // 2:] = values[..., n // 2:]
    return np.fft.ifft(padded, axis=-1) * (ln / np.sqrt(n))


def idft(freq: FreqSymbols, oversampling: int = 1) -> TimeSignal:
    """Synthesize the (oversampled) time-domain OFDM symbol from its spectrum."""
    samples = idft_array(freq.values, oversampling)
    return TimeSignal(samples, int(oversampling))


def dft_array(samples: np.ndarray, oversampling: int) -> np.ndarray:
    """Inverse of :func:`idft_array`: recover the N occupied bins from L*N samples."""
    samples = np.asarray(samples, dtype=np.complex128)
    ln = samples.shape[-1]
    lf = int(oversampling)
    if ln % lf != 0:
        raise ValueError(f"{ln} samples do not split into oversampling={lf}")
    n = ln // lf
    if not _is_pow2(n):
        raise ValueError(f"subcarrier count must be a power of two, got {n}")
    spec = np.fft.fft(samples, axis=-1) * (np.sqrt(n) / ln)
    return np.concatenate([spec[..., : n // 2], spec[..., ln - n // 2:]], axis=-1)


def dft(signal: TimeSignal) -> FreqSymbols:
    """Recover the frequency-domain symbol; exact inverse of idft at the same L."""
    values = dft_array(signal.samples, signal.oversampling)
    return FreqSymbols(values, signal.n_subcarriers)


_QPSK_SCALE = 1.0 / np.sqrt(2.0)


def qpsk_map(bits) -> FreqSymbols:
    """Gray-map a bit vector (length 2N) onto unit-energy QPSK points.

    Table: per symbol the bit pair (b0, b1) maps to ((1-2*b0) + 1j*(1-2*b1))/sqrt(2),
    i.e. 00 -> (1+1j)/sqrt(2), 01 -> (1-1j)/sqrt(2), 10 -> (-1+1j)/sqrt(2),
    11 -> (-1-1j)/sqrt(2).  Adjacent quadrants differ in exactly one bit.
    """
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size % 2 != 0:
        raise ValueError(f"need an even-length 1-D bit vector, got shape {bits.shape}")
    if bits.size == 0:
        raise ValueError("empty bit vector")
    pairs = bits.reshape(-1, 2).astype(np.float64)
    values = ((1.0 - 2.0 * pairs[:, 0]) + 1j * (1.0 - 2.0 * pairs[:, 1])) * _QPSK_SCALE
    return FreqSymbols.from_values(values)


def qpsk_demap(symbols: FreqSymbols) -> np.ndarray:
    """Hard-decision inverse of :func:`qpsk_map` (exact on noiseless input)."""
    v = symbols.values
    bits = np.empty(2 * len(v), dtype=np.uint8)
    bits[0::2] = v.real < 0
    bits[1::2] = v.imag < 0
    return bits


def papr_linear_of(samples: np.ndarray) -> float:
    """max |s|^2 / mean |s|^2 of a sample vector."""
    power = np.abs(samples) ** 2
    mean = power.mean()
    if mean == 0.0:
        raise UndefinedPaprError("PAPR of an all-zero signal is undefined")
    return float(power.max() / mean)


def papr(signal: TimeSignal, technique: str = "none", aux: dict = None) -> PaprReport:
    """Peak-to-average power ratio of one time-domain symbol."""
    ratio = papr_linear_of(signal.samples)
    return PaprReport(papr_linear=ratio, technique=technique, aux=aux or {})


def ccdf_estimate(papr_values_db, thresholds_db=None) -> CcdfCurve:
    """Empirical CCDF: fraction of PAPR values strictly above each threshold."""
    values = np.asarray(papr_values_db, dtype=np.float64).reshape(-1)
    if values.size == 0:
        raise ValueError("need at least one PAPR value")
    if thresholds_db is None:
        thresholds_db = default_thresholds()
    grid = np.asarray(thresholds_db, dtype=np.float64).reshape(-1)
    if grid.size == 0:
        raise ValueError("empty threshold grid")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("thresholds must be strictly increasing")
    ordered = np.sort(values)
    n_at_or_below = np.searchsorted(ordered, grid, side="right")
    probs = (values.size - n_at_or_below) / values.size
    return CcdfCurve(grid, probs, int(values.size))


def ccdf_analytic(threshold_db, n_subcarriers: int):
    """Nyquist-rate CCDF approximation 1 - (1 - exp(-chi0))^N, chi0 linear."""
    if n_subcarriers < 2:
        raise ValueError("need at least 2 subcarriers")
    chi0 = 10.0 ** (np.asarray(threshold_db, dtype=np.float64) / 10.0)
    out = -np.expm1(n_subcarriers * np.log1p(-np.exp(-chi0)))
    if np.ndim(threshold_db) == 0:
        return float(out)
    return out


def ccdf_analytic_inverse(probability: float, n_subcarriers: int) -> float:
    """Threshold (dB) at which the analytic Nyquist CCDF equals ``probability``."""
    if not 0.0 < probability < 1.0:
        raise ValueError("probability must lie strictly between 0 and 1")
    if n_subcarriers < 2:
        raise ValueError("need at least 2 subcarriers")
    chi0 = -np.log(1.0 - (1.0 - probability) ** (1.0 / n_subcarriers))
    return float(10.0 * np.log10(chi0))


def papr_at_probability(curve: CcdfCurve, probability: float) -> float:
    """Threshold (dB) where the curve crosses ``probability``.

    Log-linear interpolation between adjacent grid points; exact when the
    probability equals a grid value.  Returns NaN when the crossing lies
    outside the grid.
    """
    if not 0.0 < probability <= 1.0:
        raise ValueError("probability must lie in (0, 1]")
    t = curve.thresholds_db
    p = curve.probabilities
    below = np.nonzero(p <= probability)[0]
    if below.size == 0:
        return float("nan")
    i = int(below[0])
    if p[i] == probability or i == 0:
        if i == 0 and p[0] < probability:
            return float("nan")
        return float(t[i])
    p_hi, p_lo = p[i - 1], p[i]  # p_hi > probability > p_lo
    if p_lo > 0.0:
        frac = (np.log(p_hi) - np.log(probability)) / (np.log(p_hi) - np.log(p_lo))
    else:
        frac = (p_hi - probability) / (p_hi - p_lo)
    return float(t[i - 1] + frac * (t[i] - t[i - 1]))
