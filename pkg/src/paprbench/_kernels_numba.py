"""numba-compiled kernel implementations; import only when the backend wants them."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _papr_of(x):
    peak = 0.0
    acc = 0.0
    for i in range(len(x)):
        p = x[i].real * x[i].real + x[i].imag * x[i].imag
        acc += p
        if p > peak:
            peak = p
    return peak / (acc / len(x))


@njit(cache=True)
def best_candidate_papr(cands):
    best_i = 0
    best = np.inf
    for i in range(cands.shape[0]):
        r = _papr_of(cands[i])
        if r < best:
            best = r
            best_i = i
    return best_i, best


@njit(cache=True)
def best_shifted_papr(base, shifts):
    n = len(base)
    best_i = 0
    best = np.inf
    for i in range(shifts.shape[0]):
        peak = 0.0
        acc = 0.0
        for j in range(n):
            zr = base[j].real + shifts[i, j].real
            zi = base[j].imag + shifts[i, j].imag
            p = zr * zr + zi * zi
            acc += p
            if p > peak:
                peak = p
        r = peak / (acc / n)
        if r < best:
            best = r
            best_i = i
    return best_i, best


@njit(cache=True)
def pts_exhaustive_search(subs, table):
    v = subs.shape[0]
    n = subs.shape[1]
    w = len(table)
    n_free = v - 1
    total = 1
    for _ in range(n_free):
        total *= w
    codes = np.zeros(v, dtype=np.int64)
    best_codes = np.zeros(v, dtype=np.int64)
    combined = np.empty(n, dtype=np.complex128)
    best = np.inf
    for c in range(total):
        # decode the combo index into digits, first free factor most significant
        rem = c
        for vi in range(n_free, 0, -1):
            codes[vi] = rem % w
            rem //= w
        combined[:] = subs[0]
        for vi in range(1, v):
            b = table[codes[vi]]
            for j in range(n):
                combined[j] += b * subs[vi, j]
        r = _papr_of(combined)
        if r < best:  # strict: lexicographically smaller codes win ties
            best = r
            best_codes[:] = codes
    return best_codes, best


@njit(cache=True)
def pts_greedy_search(subs, table):
    v = subs.shape[0]
    n = subs.shape[1]
    w = len(table)
    codes = np.zeros(v, dtype=np.int64)
    combined = np.zeros(n, dtype=np.complex128)
    for vi in range(v):
        for j in range(n):
            combined[j] += subs[vi, j]
    best = _papr_of(combined)
    cand = np.empty(n, dtype=np.complex128)
    for vi in range(1, v):
        cur = table[codes[vi]]
        best_w = codes[vi]
        for wi in range(w):
            delta = table[wi] - cur
            for j in range(n):
                cand[j] = combined[j] + delta * subs[vi, j]
            r = _papr_of(cand)
            if r < best:
                best = r
                best_w = wi
        if best_w != codes[vi]:
            delta = table[best_w] - table[codes[vi]]
            for j in range(n):
                combined[j] += delta * subs[vi, j]
            codes[vi] = best_w
    return codes, best


@njit(cache=True)
def sap_metric_accumulate(samples, peak_idx, spectrum, freqs, p_exponent):
    n = len(spectrum)
    ln = len(samples)
    root_n = np.sqrt(n)
    mu = np.zeros(n, dtype=np.float64)
    for ii in range(len(peak_idx)):
        ni = peak_idx[ii]
        s = samples[ni]
        s_abs = np.sqrt(s.real * s.real + s.imag * s.imag)
        weight = s_abs ** p_exponent
        for k in range(n):
            theta = 2.0 * np.pi * freqs[k] * ni / ln
            cr = np.cos(theta)
            ci = np.sin(theta)
            c_re = (spectrum[k].real * cr - spectrum[k].imag * ci) / root_n
            c_im = (spectrum[k].real * ci + spectrum[k].imag * cr) / root_n
            c_abs = np.sqrt(c_re * c_re + c_im * c_im)
            denom = s_abs * c_abs
            if denom > 0.0:
                cos_angle = (s.real * c_re + s.imag * c_im) / denom
                mu[k] -= weight * cos_angle
    return mu


IMPLS = {
    "best_candidate_papr": best_candidate_papr,
    "best_shifted_papr": best_shifted_papr,
    "pts_exhaustive_search": pts_exhaustive_search,
    "pts_greedy_search": pts_greedy_search,
    "sap_metric_accumulate": sap_metric_accumulate,
}
