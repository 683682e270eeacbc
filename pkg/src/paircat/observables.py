"""Atomic inversion, reduced density matrices, and entanglement entropies."""

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import JointState
from .errors import NumericalGuardError

# negative round-off eigenvalues below this are clamped before logs
_EIG_CLAMP = 1e-12

FIELD_SPECTRUM_TOL = 1e-10


@dataclass(frozen=True)
class QubitDensity:
    """Reduced 2x2 internal-state density operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        if np.abs(m - m.conj().T).max() > 1e-13:
            raise ValueError("density matrix is not hermitian within 1e-13")
        if abs(m.trace().real - 1.0) > 1e-12 or abs(m.trace().imag) > 1e-12:
            raise ValueError("density matrix trace differs from 1 beyond 1e-12")
        eig = np.linalg.eigvalsh(m)
        if eig.min() < -_EIG_CLAMP or eig.max() > 1.0 + _EIG_CLAMP:
            raise ValueError("density matrix eigenvalues outside [0, 1]")
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self) -> np.ndarray:
        """Spectrum clamped to [0, 1] (round-off tolerance 1e-12)."""
        return np.clip(np.linalg.eigvalsh(self.matrix), 0.0, 1.0)


@dataclass(frozen=True)
class TimeSeries:
    """Sampled observables over a scaled-time axis."""

    times: np.ndarray  # scaled time lambda * t
    alpha: np.ndarray
    inversion: np.ndarray
    s_vn_atom: np.ndarray
    s_vn_field: np.ndarray
    s_lin_2: np.ndarray
    s_lin_3: np.ndarray
    norm_error: np.ndarray

    COLUMNS = (
        "lambda_t",
        "alpha",
        "inversion",
        "s_vn_atom",
        "s_vn_field",
        "s_lin_2",
        "s_lin_3",
        "norm_error",
    )

    def __post_init__(self):
        cols = self.column_arrays()
        lengths = {len(c) for c in cols.values()}
        if len(lengths) != 1:
            raise ValueError("all time-series columns must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def column_arrays(self) -> dict:
        return {
            "lambda_t": self.times,
            "alpha": self.alpha,
            "inversion": self.inversion,
            "s_vn_atom": self.s_vn_atom,
            "s_vn_field": self.s_vn_field,
            "s_lin_2": self.s_lin_2,
            "s_lin_3": self.s_lin_3,
            "norm_error": self.norm_error,
        }


def atomic_inversion(state: JointState) -> float:
    """Population inversion W = P_excited - P_ground.

    Dividing by the total population keeps the value exact at the endpoints
    (a fully excited state returns 1.0 regardless of ulp-level norm error).
    """
    p_e = float(np.vdot(state.e_amp, state.e_amp).real)
    p_g = float(np.vdot(state.g_amp, state.g_amp).real) + abs(state.g_floor) ** 2
    return (p_e - p_g) / (p_e + p_g)


def reduced_atom(state: JointState) -> QubitDensity:
    """Partial trace over the vibrational modes, as a 2x2 matrix.

    Block partners |e, n, n+q> and |g, n+1, n+q-1> never share a Fock pair,
    so the coherence vanishes for ladder-confined dynamics; the only possible
    overlap is the explicit floor state against |e, 0, q> when their mode
    occupations coincide, which the general trace below includes.
    """
    p_e = float(np.vdot(state.e_amp, state.e_amp).real)
    p_g = float(np.vdot(state.g_amp, state.g_amp).real) + abs(state.g_floor) ** 2
    coherence = 0j
    if abs(state.g_floor) > 0 and state.floor_n2 == state.q:
        coherence = state.e_amp[0] * np.conj(state.g_floor)
    rho = np.array([[p_e, coherence], [np.conj(coherence), p_g]], dtype=complex)
    return QubitDensity(matrix=rho)


def von_neumann_entropy(rho: QubitDensity, log_base: str = "natural") -> float:
    """-Tr rho log rho with 0 log 0 = 0; natural log by default, base 2 optional."""
    total = 0.0
    for lam in rho.eigenvalues():
        if lam > 0.0:
            total -= lam * math.log(lam)
    if log_base == "natural":
        return total
    if log_base == "two":
        return total / math.log(2.0)
    raise ValueError(f"log_base must be 'natural' or 'two', got {log_base!r}")


def linear_entropy(rho: QubitDensity, order: int) -> float:
    """High-order linear entropy 1 - Tr rho^n via the eigenvalues, n >= 2.

    For a qubit the maximum is 1 - 2^(1-n), reached on the maximally mixed
    state; the measure saturates at unity only in higher dimensions.
    """
    if order < 2:
        raise ValueError(f"linear entropy order must be >= 2, got {order}")
    lam = rho.eigenvalues()
    return float(1.0 - np.sum(lam**order))


def _field_density_support(state: JointState):
    """Populated two-mode Fock support and the e/g field vectors on it."""
    pairs = []
    index = {}

    def slot(pair):
        if pair not in index:
            index[pair] = len(pairs)
            pairs.append(pair)
        return index[pair]

    dim_guess = 2 * (state.n_max + 1) + 1
    v_e = np.zeros(dim_guess, dtype=complex)
    v_g = np.zeros(dim_guess, dtype=complex)
    for n in range(state.n_max + 1):
        v_e[slot((n, n + state.q))] = state.e_amp[n]
    for n in range(state.n_max + 1):
        if n + state.q - 1 >= 0:
            v_g[slot((n + 1, n + state.q - 1))] += state.g_amp[n]
    if abs(state.g_floor) > 0:
        v_g[slot((0, state.floor_n2))] += state.g_floor
    k = len(pairs)
    return v_e[:k], v_g[:k]


def field_entropy(state: JointState) -> float:
    """Entropy of the reduced vibrational state of a globally pure joint state.

    Equal to the internal-state entropy by the Schmidt decomposition; this
    builds the field reduced density on the populated Fock support anyway and
    insists the two spectra agree, as a consistency check on the reduction.
    """
    atom_spectrum = np.sort(reduced_atom(state).eigenvalues())
    v_e, v_g = _field_density_support(state)
    rho_f = np.outer(v_e, v_e.conj()) + np.outer(v_g, v_g.conj())
    field_eigs = np.clip(np.linalg.eigvalsh(rho_f), 0.0, 1.0)
    if field_eigs.size < 2:
        field_eigs = np.concatenate([[0.0], field_eigs])
    field_top = np.sort(field_eigs)[-2:]
    gap = float(np.abs(np.sort(field_top) - atom_spectrum).max())
    if gap > FIELD_SPECTRUM_TOL:
        raise NumericalGuardError(
            f"field and atom reduced spectra disagree by {gap:.3e} "
            f"(tolerance {FIELD_SPECTRUM_TOL})"
        )
    total = 0.0
    for lam in field_top:
        if lam > 0.0:
            total -= lam * math.log(lam)
    return total
