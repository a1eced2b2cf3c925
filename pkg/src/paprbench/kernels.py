"""Hot inner loops with two interchangeable backends.

The candidate scans (SLM / OPS selection), the PTS phase searches and the
SAP metric accumulation dominate runtime once the FFT work is batched, so
they are compiled with numba when it is available.  A vectorized pure-numpy
implementation of every kernel is kept as a fallback and for cross-checking.

Backend selection, decided once at import time:

* ``PAPR_KERNEL_BACKEND=numpy``  force the pure-numpy path
* ``PAPR_KERNEL_BACKEND=numba``  require numba (ImportError if missing)
* unset or ``auto``              numba if importable, else numpy

``benchmarks/kernel_bench.py`` times the two paths against each other.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "best_candidate_papr",
    "best_shifted_papr",
    "pts_exhaustive_search",
    "pts_greedy_search",
    "sap_metric_accumulate",
    "get_backend",
    "warmup",
]

# ---------------------------------------------------------------------------
# pure-numpy implementations
# ---------------------------------------------------------------------------

# combo blocks are chunked so the exhaustive PTS fallback never materializes
# more than ~1k candidate signals at once
_PTS_CHUNK = 1024


def _np_best_candidate_papr(cands):
    power = np.abs(cands) ** 2
    ratios = power.max(axis=1) / power.mean(axis=1)
    idx = int(np.argmin(ratios))  # first minimum: smallest index wins ties
    return idx, float(ratios[idx])


def _np_best_shifted_papr(base, shifts):
    return _np_best_candidate_papr(base[None, :] + shifts)


def _combo_codes(n_free, w):
    """All code vectors of ``n_free`` base-``w`` digits in lexicographic order."""
    if n_free == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*([np.arange(w, dtype=np.int64)] * n_free), indexing="ij")
    return np.stack(grids, axis=-1).reshape(-1, n_free)


def _np_pts_exhaustive_search(subs, table):
    v = subs.shape[0]
    w = len(table)
    codes = _combo_codes(v - 1, w)
    best_codes = np.zeros(v, dtype=np.int64)
    best_papr = np.inf
    for lo in range(0, len(codes), _PTS_CHUNK):
        block = codes[lo: lo + _PTS_CHUNK]
        factors = np.concatenate(
            [np.ones((len(block), 1), dtype=np.complex128), table[block]], axis=1
        )
        combined = factors @ subs
        power = np.abs(combined) ** 2
        ratios = power.max(axis=1) / power.mean(axis=1)
        j = int(np.argmin(ratios))
        if ratios[j] < best_papr:  # strict: earlier (lex-smaller) block wins ties
            best_papr = float(ratios[j])
            best_codes = np.concatenate([[0], block[j]]).astype(np.int64)
    return best_codes, best_papr


def _np_pts_greedy_search(subs, table):
    v = subs.shape[0]
    codes = np.zeros(v, dtype=np.int64)
    combined = subs.sum(axis=0)
    power = np.abs(combined) ** 2
    best_papr = float(power.max() / power.mean())
    for vi in range(1, v):
        cands = combined[None, :] + (table[:, None] - table[codes[vi]]) * subs[vi]
        power = np.abs(cands) ** 2
        ratios = power.max(axis=1) / power.mean(axis=1)
        wj = int(np.argmin(ratios))
        if ratios[wj] < best_papr:
            best_papr = float(ratios[wj])
            combined = cands[wj]
            codes[vi] = wj
    return codes, best_papr


def _np_sap_metric_accumulate(samples, peak_idx, spectrum, freqs, p_exponent):
    n = len(spectrum)
    ln = len(samples)
    phases = np.exp((2j * np.pi / ln) * np.outer(peak_idx, freqs))
    contribs = phases * (spectrum[None, :] / np.sqrt(n))
    peaks = samples[peak_idx][:, None]
    denom = np.abs(peaks) * np.abs(contribs)
    with np.errstate(invalid="ignore", divide="ignore"):
        cos = np.where(denom > 0.0, (peaks * np.conj(contribs)).real / denom, 0.0)
    weights = np.abs(samples[peak_idx]) ** p_exponent
    return -(weights[:, None] * cos).sum(axis=0)


_NUMPY_IMPLS = {
    "best_candidate_papr": _np_best_candidate_papr,
    "best_shifted_papr": _np_best_shifted_papr,
    "pts_exhaustive_search": _np_pts_exhaustive_search,
    "pts_greedy_search": _np_pts_greedy_search,
    "sap_metric_accumulate": _np_sap_metric_accumulate,
}

# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


def _build_numba_impls():
    from . import _kernels_numba

    return _kernels_numba.IMPLS


def _resolve_backend():
    choice = os.environ.get("PAPR_KERNEL_BACKEND", "auto").strip().lower()
    if choice in ("numpy", "np"):
        return "numpy", _NUMPY_IMPLS
    if choice == "numba":
        return "numba", _build_numba_impls()
    if choice not in ("", "auto"):
        raise ValueError(
            f"PAPR_KERNEL_BACKEND={choice!r} not recognized (use auto, numba or numpy)"
        )
    try:
        return "numba", _build_numba_impls()
    except ImportError:
        return "numpy", _NUMPY_IMPLS


def get_backend(name: str) -> dict:
    """Implementation table for an explicit backend (used by tests and benchmarks)."""
    if name == "numpy":
        return _NUMPY_IMPLS
    if name == "numba":
        return _build_numba_impls()
    raise ValueError(f"unknown backend {name!r}")


BACKEND, _ACTIVE = _resolve_backend()

best_candidate_papr = _ACTIVE["best_candidate_papr"]
best_shifted_papr = _ACTIVE["best_shifted_papr"]
pts_exhaustive_search = _ACTIVE["pts_exhaustive_search"]
pts_greedy_search = _ACTIVE["pts_greedy_search"]
sap_metric_accumulate = _ACTIVE["sap_metric_accumulate"]


def warmup():
    """Trigger JIT compilation on tiny inputs (cheap no-op on the numpy path)."""
    cands = np.array([[1.0 + 0j, 0.5j], [0.5 + 0j, 1.0j]])
    best_candidate_papr(cands)
    best_shifted_papr(cands[0], cands)
    subs = np.array([[1.0 + 0j, 0.2j], [0.1 + 0j, 1.0 + 0j]])
    table = np.array([1.0 + 0j, -1.0 + 0j])
    pts_exhaustive_search(subs, table)
    pts_greedy_search(subs, table)
    sap_metric_accumulate(
        subs[0],
        np.array([0], dtype=np.int64),
        np.array([1.0 + 0j, 1.0 + 0j]),
        np.array([0, -1], dtype=np.int64),
        2.0,
    )
