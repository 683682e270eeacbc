"""Pair coherent and pair cat states on the truncated |n, n+q> Fock ladder.

States live on the single-index ladder picked out by the conserved number
difference q: the amplitude vector c[n] multiplies |n, n+q>.  Construction
works in the log domain throughout and renormalizes over the truncated
window, keeping the closed-form normalizers as cross-checks only.
"""

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStateError, TruncationError
from .specfun import bessel_i, log_bessel_i, log_factorial

TRUNCATION_FLOOR = 16
TRUNCATION_CAP = 4096

# |1 + (-1)^n e^{i phi}| below this is parity extinction up to rounding of
# the phase input itself; snapped to an exact zero so parity selection holds
# identically (e.g. phi = float(pi) kills even terms exactly).
_PARITY_SNAP = 1e-12


@dataclass(frozen=True)
class PairCatSpec:
    """Physical parameters plus truncation policy defining an input state."""

    xi: complex
    q: int
    phi: float
    tail_epsilon: float = 1e-12

    def __post_init__(self):
        if self.q < 0:
            raise ValueError(
                f"q must be >= 0 (negative values are mode-relabeled upstream), got {self.q}"
            )
        if not 0.0 < self.tail_epsilon <= 1e-6:
            raise ValueError(
                f"tail_epsilon must lie in (0, 1e-6], got {self.tail_epsilon}"
            )


@dataclass(frozen=True)
class LadderState:
    """Amplitudes over the charge-q ladder: coeffs[n] multiplies |n, n+q>."""

    q: int
    coeffs: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def to_json(self) -> str:
        return json.dumps(
            {"q": self.q, "coeffs": [[c.real, c.imag] for c in self.coeffs]}
        )

    @classmethod
    def from_json(cls, text: str) -> "LadderState":
        data = json.loads(text)
        coeffs = np.array([complex(re, im) for re, im in data["coeffs"]])
        return cls(q=int(data["q"]), coeffs=coeffs)


def _log_factorials(n_max: int) -> np.ndarray:
    return np.array([log_factorial(k) for k in range(n_max + 1)])


def choose_truncation_detail(
    xi: complex, q: int, tail_epsilon: float, cap: int = TRUNCATION_CAP
) -> tuple[int, float]:
    """Smallest certified cut N plus the certified tail fraction bound.

    The pair-coherent weights w_n = |xi|^{2n} / (n! (n+q)!) decay with ratio
    r_n = |xi|^2 / ((n+1)(n+1+q)); once r < 1 the tail past N is dominated by
    the geometric sum w_{N+1} / (1 - r_{N+2}), which certifies the discarded
    probability of the exactly-normalized distribution.
    """
    if tail_epsilon <= 0.0:
        raise ValueError(f"tail_epsilon must be > 0, got {tail_epsilon}")
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    axi = abs(xi)
    if axi == 0.0:
        return TRUNCATION_FLOOR, 0.0
    log_xi2 = 2.0 * math.log(axi)
    xi2 = axi * axi
    logw = -log_factorial(q)  # n = 0 term
    shift, acc = logw, 1.0  # streaming log-sum-exp of the kept weights
    log_eps = math.log(tail_epsilon)
    n = 0
    while n < cap:
        logw_next = logw + log_xi2 - math.log((n + 1) * (n + 1 + q))
        ratio = xi2 / ((n + 2) * (n + 2 + q))
        if ratio < 1.0:
            log_tail = logw_next - math.log1p(-ratio)
            log_kept = shift + math.log(acc)
            if log_tail - log_kept < log_eps:
                bound = math.exp(log_tail - log_kept)
                return max(n, TRUNCATION_FLOOR), bound
        n += 1
        logw = logw_next
        if logw > shift:
            acc = acc * math.exp(shift - logw) + 1.0
            shift = logw
        else:
            acc += math.exp(logw - shift)
    raise TruncationError(
        f"tail bound {tail_epsilon:g} not certified below N = {cap} "
        f"for |xi| = {axi:g}, q = {q}"
    )


def choose_truncation(
    xi: complex, q: int, tail_epsilon: float, cap: int = TRUNCATION_CAP
) -> int:
    """Smallest N (>= 16) with certified discarded probability < tail_epsilon."""
    n_max, _ = choose_truncation_detail(xi, q, tail_epsilon, cap)
    return n_max


def _log_magnitudes(axi: float, q: int, n_max: int) -> np.ndarray:
    """log(|xi|^n / sqrt(n! (n+q)!)) for n = 0..n_max; -inf column for xi = 0."""
    lf = _log_factorials(n_max + q)
    n = np.arange(n_max + 1)
    if axi == 0.0:
        out = np.full(n_max + 1, -np.inf)
        out[0] = -0.5 * lf[q]
        return out
    return n * math.log(axi) - 0.5 * (lf[n] + lf[n + q])


def pair_coherent(xi: complex, q: int, n_max: int) -> LadderState:
    """Pair coherent state |xi, q> truncated at n_max and renormalized.

    Coefficients are proportional to xi^n / sqrt(n! (n+q)!), evaluated as
    exp(n ln|xi| - (ln n! + ln (n+q)!)/2) with phase n arg(xi).  The
    truncated norm is cross-checked against the closed-form normalizer
    [|xi|^(-q) I_q(2|xi|)]^(-1/2); a mismatch means n_max was too small.
    """
    if q < 0:
        raise ValueError(f"q must be >= 0, got {q}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    axi = abs(xi)
    if axi == 0.0:
        coeffs = np.zeros(n_max + 1, dtype=complex)
        coeffs[0] = 1.0
        return LadderState(q=q, coeffs=coeffs)

    logmag = _log_magnitudes(axi, q, n_max)
    peak = logmag.max()
    mag = np.exp(logmag - peak)
    # truncated norm^2 in log form vs -q ln|xi| + ln I_q(2|xi|)
    log_norm2 = 2.0 * peak + math.log(float(np.dot(mag, mag)))
    log_closed = -q * math.log(axi) + log_bessel_i(q, 2.0 * axi)
    if abs(log_norm2 - log_closed) > 1e-5:
        raise TruncationError(
            f"truncated norm disagrees with the closed-form normalizer "
            f"(relative gap {abs(log_norm2 - log_closed):.2e}); n_max = {n_max} "
            f"is too small for |xi| = {axi:g}, q = {q}"
        )
    phase = np.exp(1j * cmath.phase(xi) * np.arange(n_max + 1))
    coeffs = mag * phase
    coeffs /= np.linalg.norm(coeffs)
    return LadderState(q=q, coeffs=coeffs)


def pair_cat(spec: PairCatSpec) -> LadderState:
    """Pair cat state: superposition of |xi, q> and |-xi, q> with phase phi.

    coeffs[n] is proportional to (1 + (-1)^n e^{i phi}) xi^n / sqrt(n!(n+q)!),
    normalized over the truncated window chosen by the spec's tail policy.
    """
    n_max = choose_truncation(spec.xi, spec.q, spec.tail_epsilon)
    axi = abs(spec.xi)
    n = np.arange(n_max + 1)

    factor = 1.0 + (-1.0) ** n * cmath.exp(1j * spec.phi)
    factor[np.abs(factor) < _PARITY_SNAP] = 0.0

    logmag = _log_magnitudes(axi, spec.q, n_max)
    finite = np.isfinite(logmag)
    peak = logmag[finite].max()
    mag = np.zeros(n_max + 1)
    mag[finite] = np.exp(logmag[finite] - peak)
    phase = np.exp(1j * cmath.phase(spec.xi) * n) if axi > 0 else np.ones(n_max + 1)

    u = factor * mag * phase
    norm2_scaled = float(np.vdot(u, u).real)
    # guard in the log domain: true ||u||^2 = exp(2 peak) * norm2_scaled
    if norm2_scaled <= 0.0 or 2.0 * peak + math.log(norm2_scaled) < math.log(1e-30):
        raise DegenerateStateError(
            f"pair cat superposition is numerically null for xi = {spec.xi}, "
            f"q = {spec.q}, phi = {spec.phi}"
        )
    coeffs = u / math.sqrt(norm2_scaled)

    if 0.0 < axi <= 8.0:
        # closed-form normalizer is only well conditioned here (the
        # alternating series cancels catastrophically at large |xi|)
        expected = cat_normalization_closed_form(spec.xi, spec.q, spec.phi)
        computed = math.exp(-peak) / math.sqrt(norm2_scaled)
        # the truncated norm sits below the infinite one by at most the
        # certified tail fraction, so the agreement window widens with it
        if abs(computed - expected) > (1e-10 + spec.tail_epsilon) * expected:
            raise TruncationError(
                f"cat normalization {computed!r} disagrees with the closed form "
                f"{expected!r} for xi = {spec.xi}, q = {spec.q}, phi = {spec.phi}"
            )
    return LadderState(q=spec.q, coeffs=coeffs)


def cat_normalization_closed_form(xi: complex, q: int, phi: float) -> float:
    """Overall coefficient normalizer of the cat state in closed form.

    Returns N_phi * N_q with
        N_q   = [|xi|^(-q) I_q(2 |xi|)]^(-1/2)
        N_phi = 2^(-1/2) [1 + N_q^2 cos(phi) sum_n (-1)^n |xi|^{2n}/(n!(n+q)!)]^(-1/2)
    The alternating sum is stable only for |xi| <~ 8; callers outside that
    window should compare norms directly instead.
    """
    axi = abs(xi)
    if axi == 0.0:
        nq2 = math.exp(log_factorial(q))
        alt = 1.0 / math.exp(log_factorial(q))
    else:
        nq2 = 1.0 / (axi ** (-q) * bessel_i(q, 2.0 * axi))
        alt = 0.0
        term = 1.0 / math.exp(log_factorial(q))
        k = 0
        while True:
            alt += term if k % 2 == 0 else -term
            k += 1
            term *= axi * axi / (k * (k + q))
            if term < 1e-17 * max(1.0, abs(alt)) and k > axi:
                break
    n_phi = 1.0 / math.sqrt(2.0 * (1.0 + nq2 * math.cos(phi) * alt))
    return n_phi * math.sqrt(nq2)


def apply_pair_annihilation(state: LadderState) -> LadderState:
    """Action of the pair annihilation operator ab restricted to the ladder.

    output[n] = sqrt((n+1)(n+1+q)) coeffs[n+1]; the top slot is zeroed.  The
    result is intentionally unnormalized (eigenvalue tests divide it out).
    """
    n = np.arange(state.n_max + 1)
    out = np.zeros(state.n_max + 1, dtype=complex)
    if state.n_max >= 1:
        out[:-1] = np.sqrt((n[:-1] + 1.0) * (n[:-1] + 1.0 + state.q)) * state.coeffs[1:]
    return LadderState(q=state.q, coeffs=out)


def number_difference(state: LadderState) -> int:
    """Eigenvalue of the number-difference operator; structural on the ladder."""
    return state.q
