"""Stable special-function kernels: log factorials, the modified Bessel
function I_q, and normalized harmonic-oscillator wavefunction columns.

Everything here avoids forming raw factorials or Hermite polynomials, which
overflow long before the quantities they combine into do.
"""

import math
from dataclasses import dataclass

import numpy as np

# Series termination: relative tail threshold at double-precision saturation,
# plus a hard cap as a safety bound (convergence needs ~x/2 terms, and x is
# bounded by float overflow of I_q itself, so the cap is never reached).
_SERIES_RTOL = 1e-17
_SERIES_MAX_TERMS = 10_000


def log_factorial(n: int) -> float:
    """ln(n!): exact integer accumulation for n <= 20, log-gamma beyond."""
    if n < 0:
        raise ValueError(f"log_factorial requires n >= 0, got {n}")
    if n <= 20:
        return math.log(math.factorial(n))
    return math.lgamma(n + 1)


def bessel_i(q: int, x: float) -> float:
    """Modified Bessel function of the first kind I_q(x) for x >= 0.

    Uses the ascending series sum_k (x/2)^(2k+q) / (k! (k+q)!), accumulating
    terms by their ratio so no intermediate power or factorial is formed.
    All terms are positive and bounded by the sum, so overflow can only mean
    I_q(x) itself exceeds the double range; that case raises instead of
    silently returning inf.
    """
    if q < 0:
        raise ValueError(f"bessel_i requires order q >= 0, got {q}")
    if x < 0:
        raise ValueError(f"bessel_i requires x >= 0, got {x}")
    if x == 0.0:
        return 1.0 if q == 0 else 0.0
    half = 0.5 * x
    term = math.exp(q * math.log(half) - log_factorial(q))
    total = term
    for k in range(1, _SERIES_MAX_TERMS + 1):
        term *= half * half / (k * (k + q))
        total += term
        if math.isinf(total):
            raise OverflowError(
                f"I_{q}({x}) exceeds the double-precision range"
            )
        if term < _SERIES_RTOL * total:
            return total
    raise RuntimeError(
        f"bessel_i series did not converge within {_SERIES_MAX_TERMS} terms"
    )


def log_bessel_i(q: int, x: float) -> float:
    """ln I_q(x), summed fully in the log domain so it never overflows.

    Same series as :func:`bessel_i`; used for normalization cross-checks at
    arguments where I_q itself would leave the double range.
    """
    if q < 0 or x < 0:
        raise ValueError("log_bessel_i requires q >= 0 and x >= 0")
    if x == 0.0:
        return 0.0 if q == 0 else -math.inf
    log_half2 = 2.0 * math.log(0.5 * x)
    logt = q * math.log(0.5 * x) - log_factorial(q)
    shift = logt
    acc = 1.0  # running sum of exp(logt - shift)
    for k in range(1, _SERIES_MAX_TERMS + 1):
        logt += log_half2 - math.log(k * (k + q))
        if logt > shift:
            acc = acc * math.exp(shift - logt) + 1.0
            shift = logt
        else:
            acc += math.exp(logt - shift)
        # terms decay monotonically once k exceeds x/2
        if k > 0.5 * x and logt - (shift + math.log(acc)) < math.log(_SERIES_RTOL):
            return shift + math.log(acc)
    raise RuntimeError(
        f"log_bessel_i series did not converge within {_SERIES_MAX_TERMS} terms"
    )


@dataclass(frozen=True)
class WavefunctionColumn:
    """Values phi_n(x) of the normalized oscillator eigenfunctions, n = 0..n_max."""

    x: float
    values: np.ndarray


def oscillator_values(xs: np.ndarray, n_max: int) -> np.ndarray:
    """Matrix phi[j, n] = phi_n(xs[j]) via the normalized three-term recurrence.

    phi_0(x) = pi^(-1/4) exp(-x^2/2)
    phi_{n+1}(x) = sqrt(2/(n+1)) x phi_n(x) - sqrt(n/(n+1)) phi_{n-1}(x)

    Forming H_n(x) and n! separately overflows near n ~ 150; the normalized
    recurrence keeps every entry of order one or below.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    xs = np.asarray(xs, dtype=float)
    out = np.empty((xs.size, n_max + 1))
    phi0 = math.pi ** -0.25 * np.exp(-0.5 * xs * xs)
    out[:, 0] = phi0
    if n_max >= 1:
        out[:, 1] = math.sqrt(2.0) * xs * phi0
    for n in range(1, n_max):
        out[:, n + 1] = (
            math.sqrt(2.0 / (n + 1)) * xs * out[:, n]
            - math.sqrt(n / (n + 1.0)) * out[:, n - 1]
        )
    return out


def oscillator_column(x: float, n_max: int) -> WavefunctionColumn:
    """phi_0(x)..phi_{n_max}(x) as a :class:`WavefunctionColumn`."""
    values = oscillator_values(np.array([x], dtype=float), n_max)[0]
    return WavefunctionColumn(x=float(x), values=values)
