import numpy as np
import pytest

#: one line per acceptance criterion, echoed after the test summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def naive_synthesis(values, oversampling=1):
    """Quadratic-time evaluation of the synthesis sum at rate L*N.

    Independent oracle for the FFT path: evaluates
    (1/sqrt(N)) * sum_k S(k) e^{j 2 pi f(k) t / (LN)} term by term, with the
    upper half of the bins taken as negative frequencies.
    """
    values = np.asarray(values, dtype=complex)
    n = len(values)
    ln = n * int(oversampling)
    k = np.arange(n)
    f = np.where(k < n // 2, k, k - n)
    out = np.zeros(ln, dtype=complex)
    for t in range(ln):
        acc = 0.0 + 0.0j
        for i in range(n):
            acc += values[i] * np.exp(2j * np.pi * f[i] * t / ln)
        out[t] = acc / np.sqrt(n)
    return out


def naive_papr_linear(samples):
    power = np.abs(np.asarray(samples)) ** 2
    return float(power.max() / power.mean())


def random_qpsk(rng, n):
    """Unit-energy QPSK values, drawn without the package mapper."""
    re = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    im = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    return (re + 1j * im) / np.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240814)
