"""OFDM PAPR reduction techniques and a Monte-Carlo CCDF benchmark harness."""

from .core import (
    CcdfCurve,
    FreqSymbols,
    PaprReport,
    TimeSignal,
    UndefinedPaprError,
    ccdf_analytic,
    ccdf_analytic_inverse,
    ccdf_estimate,
    default_thresholds,
    dft,
    idft,
    papr,
    papr_at_probability,
    qpsk_demap,
    qpsk_map,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "FreqSymbols",
    "TimeSignal",
    "PaprReport",
    "CcdfCurve",
    "UndefinedPaprError",
    "idft",
    "dft",
    "qpsk_map",
    "qpsk_demap",
    "papr",
    "ccdf_estimate",
    "ccdf_analytic",
    "ccdf_analytic_inverse",
    "papr_at_probability",
    "default_thresholds",
]
