"""Built-in verification suite: named checks over the package's invariants.

Each check returns its worst observed deviation against a fixed tolerance so
the CLI can print a pass/fail table.  The oracle-equivalence check batches
states sharing a generator to keep the full grid affordable.
"""

import math
import time
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from .dynamics import (
    ConstantProfile,
    SinhProfile,
    _expm_propagator,
    _oracle_time_grid,
    _rk4_dense,
    build_dense_generator,
    conserved_quantities,
    evolve_analytic,
    joint_from_ladder,
    pulse_area,
)
from .fockspace import (
    PairCatSpec,
    apply_pair_annihilation,
    cat_normalization_closed_form,
    pair_cat,
    pair_coherent,
    choose_truncation,
)
from .observables import (
    atomic_inversion,
    field_entropy,
    linear_entropy,
    reduced_atom,
    von_neumann_entropy,
)
from .presets import load_preset
from .quadrature import default_grid, quadrature_distribution, raster_symmetry_errors
from .runner import run
from .specfun import bessel_i, log_factorial, oscillator_values


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _check(name, fn, results):
    started = time.perf_counter()
    try:
        detail = fn()
        passed = True
    except Exception as exc:  # a failing invariant is the point of the suite
        detail = f"{type(exc).__name__}: {exc}"
        passed = False
    results.append(CheckResult(name, passed, detail, time.perf_counter() - started))


def _require(condition: bool, message: str):
    if not condition:
        raise AssertionError(message)


def check_oscillator_recurrence(quick: bool) -> str:
    """Recurrence output matches explicit Hermite-polynomial evaluation."""
    xs = np.array([-3.0, -1.0, 0.0, 0.5, 2.0])
    n_top = 10
    phi = oscillator_values(xs, n_top)
    worst = 0.0
    for n in range(n_top + 1):
        # H_{k+1} = 2x H_k - 2k H_{k-1}, normalized afterwards
        h_prev = np.ones_like(xs)
        h = 2.0 * xs
        if n == 0:
            h_n = h_prev
        elif n == 1:
            h_n = h
        else:
            for k in range(1, n):
                h_prev, h = h, 2.0 * xs * h - 2.0 * k * h_prev
            h_n = h
        norm = math.sqrt(2.0**n * math.factorial(n)) * math.pi**0.25
        direct = h_n * np.exp(-0.5 * xs * xs) / norm
        scale = np.maximum(np.abs(direct), 1e-300)
        worst = max(worst, float(np.max(np.abs(phi[:, n] - direct) / scale)))
    _require(worst < 1e-10, f"recurrence vs direct deviation {worst:.2e}")
    return f"max relative deviation {worst:.2e}"


def check_oscillator_orthonormality(quick: bool) -> str:
    """Trapezoid inner products reproduce the identity on [-12, 12]."""
    n_top = 12 if quick else 40
    xs = np.arange(-12.0, 12.0 + 1e-9, 1e-2)
    phi = oscillator_values(xs, n_top)
    weights = np.full(xs.size, 1e-2)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    gram = (phi * weights[:, None]).T @ phi
    worst = float(np.abs(gram - np.eye(n_top + 1)).max())
    _require(worst < 1e-6, f"orthonormality deviation {worst:.2e}")
    return f"max Gram deviation {worst:.2e}"


def check_oscillator_parity(quick: bool) -> str:
    """phi_n(-x) = (-1)^n phi_n(x)."""
    xs = np.linspace(0.1, 20.0, 10 if quick else 60)
    n_top = 128 if quick else 512
    plus = oscillator_values(xs, n_top)
    minus = oscillator_values(-xs, n_top)
    signs = (-1.0) ** np.arange(n_top + 1)
    scale = np.maximum(np.abs(plus), 1e-280)
    worst = float(np.max(np.abs(minus - signs * plus) / scale))
    _require(np.isfinite(plus).all(), "oscillator values overflowed")
    _require(worst < 1e-12, f"parity deviation {worst:.2e}")
    return f"max relative parity deviation {worst:.2e}"


def check_bessel_series_identity(quick: bool) -> str:
    """I_q(2|xi|) equals the ladder normalization series."""
    xis = (0.5, 2.0, 8.0) if quick else (0.5, 1.0, 2.0, 5.0, 8.0, 15.0, 25.0)
    worst = 0.0
    for axi in xis:
        for q in (0, 1, 3, 12):
            series = 0.0
            term = 1.0 / math.exp(log_factorial(q))
            n = 0
            while True:
                new = series + term * axi ** (2 * n + q)
                if new == series and n > axi:
                    break
                series = new
                n += 1
                term /= n * (n + q)
            direct = bessel_i(q, 2.0 * axi)
            worst = max(worst, abs(series - direct) / direct)
    _require(worst < 1e-12, f"series identity deviation {worst:.2e}")
    return f"max relative deviation {worst:.2e}"


def check_eigenstate_residuals(quick: bool) -> str:
    """Pair coherent states are eigenstates of the pair annihilation operator."""
    xis = (1.0, 2.0) if quick else (0.5, 1.0, 2.0, 3.5, 5.0)
    qs = (0, 2) if quick else (0, 1, 2, 5, 10)
    tail = 1e-22  # residual scales with xi^2 sqrt(tail); keeps ~30x margin
    worst_single = worst_double = 0.0
    for axi in xis:
        for q in qs:
            n_max = choose_truncation(axi, q, tail)
            st = pair_coherent(axi, q, n_max)
            resid = apply_pair_annihilation(st).coeffs - axi * st.coeffs
            worst_single = max(worst_single, float(np.linalg.norm(resid)))
            cat = pair_cat(PairCatSpec(xi=axi, q=q, phi=0.5, tail_epsilon=tail))
            twice = apply_pair_annihilation(apply_pair_annihilation(cat))
            resid2 = twice.coeffs - axi * axi * cat.coeffs
            worst_double = max(worst_double, float(np.linalg.norm(resid2)))
    _require(worst_single < 1e-8, f"single residual {worst_single:.2e}")
    _require(worst_double < 1e-7, f"squared residual {worst_double:.2e}")
    return f"residuals {worst_single:.2e} (ab), {worst_double:.2e} (a^2 b^2)"


def check_cat_parity_selection(quick: bool) -> str:
    """phi = 0 keeps even n only; phi = pi keeps odd n only, exactly."""
    for xi, q in ((1.0, 0), (3.0, 2), (0.7, 5)):
        even = pair_cat(PairCatSpec(xi=xi, q=q, phi=0.0))
        _require(np.all(even.coeffs[1::2] == 0), "odd terms survive phi = 0")
        odd = pair_cat(PairCatSpec(xi=xi, q=q, phi=math.pi))
        _require(np.all(odd.coeffs[0::2] == 0), "even terms survive phi = pi")
    return "parity extinction exact for phi in {0, pi}"


def check_cat_normalization(quick: bool) -> str:
    """Construction agrees with the closed-form normalizer for |xi| <= 8."""
    worst = 0.0
    for xi in (0.3, 1.0, 4.0, 8.0):
        for q in (0, 1, 4):
            for phi in (0.0, 0.9, math.pi / 2, math.pi):
                spec = PairCatSpec(xi=xi, q=q, phi=phi)
                cat = pair_cat(spec)  # raises internally on mismatch
                closed = cat_normalization_closed_form(xi, q, phi)
                _require(closed > 0, "closed form normalizer not positive")
                worst = max(worst, abs(cat.norm() - 1.0))
    _require(worst < 1e-12, f"norm deviation {worst:.2e}")
    return f"unit-norm deviation {worst:.2e}; closed form consistent"


def oracle_equivalence_grid(
    qs=(0, 1, 2, 5),
    xis=(1.0, 5.0, 10.0),
    phis=(0.0, math.pi / 2),
    alphas=(1.0, 30.0),
    steps_per_area=3500,
    tail=1e-12,
    path_tol=1e-9,
    analytic_tol=1e-8,
) -> dict:
    """Compare the block propagator to both brute-force paths over a grid.

    States sharing (q, profile) are stacked as columns and integrated in one
    sweep; the two reference paths must agree pairwise before the analytic
    result is compared to them.  Returns the worst deviations observed.
    """
    profiles = {
        "constant": ConstantProfile(lam=1.0),
        "sinh": SinhProfile(lam=1.0, varpi=0.5),
    }
    worst_paths = 0.0
    worst_analytic = 0.0
    for q in qs:
        states = []
        for xi in xis:
            for phi in phis:
                states.append(
                    pair_cat(PairCatSpec(xi=xi, q=q, phi=phi, tail_epsilon=tail))
                )
        n_common = max(s.n_max for s in states)
        h_dense = build_dense_generator(q, n_common).toarray()
        m = n_common + 1
        columns = np.zeros((2 * m, len(states)), dtype=complex)
        for j, s in enumerate(states):
            columns[: s.n_max + 1, j] = s.coeffs
        for profile in profiles.values():
            for alpha in alphas:
                t = profile.area_inverse(alpha)
                grid = _oracle_time_grid(
                    profile, t, max(1, int(steps_per_area * alpha))
                )
                rk4 = _rk4_dense(h_dense, columns, profile, grid)
                expm = _expm_propagator(h_dense, alpha) @ columns
                gap = float(np.abs(np.linalg.norm(rk4 - expm, axis=0)).max())
                worst_paths = max(worst_paths, gap)
                if gap > path_tol:
                    raise AssertionError(
                        f"oracle paths disagree by {gap:.2e} at q={q}, "
                        f"alpha={alpha}"
                    )
                for j, s in enumerate(states):
                    joint = joint_from_ladder(s, "excited")
                    out = evolve_analytic(joint, profile, t)
                    vec = np.zeros(2 * m, dtype=complex)
                    vec[: s.n_max + 1] = out.e_amp
                    vec[m : m + s.n_max + 1] = out.g_amp
                    dev = float(np.linalg.norm(vec - expm[:, j]))
                    worst_analytic = max(worst_analytic, dev)
                    if dev > analytic_tol:
                        raise AssertionError(
                            f"analytic propagator off by {dev:.2e} at q={q}, "
                            f"xi={s}, alpha={alpha}"
                        )
    return {"paths": worst_paths, "analytic": worst_analytic}


def check_oracle_equivalence(quick: bool) -> str:
    if quick:
        report = oracle_equivalence_grid(
            qs=(0, 1), xis=(1.0, 5.0), alphas=(1.0, 5.0), steps_per_area=3000
        )
    else:
        report = oracle_equivalence_grid()
    return (
        f"paths agree to {report['paths']:.2e}, "
        f"analytic to {report['analytic']:.2e}"
    )


def check_unitarity_and_conservation(quick: bool) -> str:
    """Block propagation preserves norm and the total-quanta distribution."""
    worst_norm = worst_dist = 0.0
    profile = ConstantProfile(lam=1.0)
    for q, xi, internal in ((0, 2.0, "excited"), (3, 4.0, "ground"), (1, 10.0, "excited")):
        joint = joint_from_ladder(
            pair_cat(PairCatSpec(xi=xi, q=q, phi=math.pi / 2)), internal
        )
        before = conserved_quantities(joint)
        for t in (0.3, 2.0, 17.0):
            out = evolve_analytic(joint, profile, t)
            worst_norm = max(worst_norm, abs(out.norm() - 1.0))
            after = conserved_quantities(out)
            _require(
                np.array_equal(before.quanta_values, after.quanta_values),
                "total-quanta support changed",
            )
            worst_dist = max(
                worst_dist,
                float(np.abs(before.quanta_weights - after.quanta_weights).max()),
            )
    _require(worst_norm < 1e-12, f"norm deviation {worst_norm:.2e}")
    _require(worst_dist < 1e-14, f"distribution drift {worst_dist:.2e}")
    return f"norm {worst_norm:.2e}, quanta drift {worst_dist:.2e}"


def check_entropy_bounds(quick: bool) -> str:
    """0 <= S <= ln 2 and atom/field agreement along evolved trajectories."""
    presets = ("fig4-text",) if quick else ("fig4-text", "fig5a")
    ln2 = math.log(2.0)
    worst_gap = 0.0
    for name in presets:
        result = run(load_preset(name))
        s = result.series
        _require(float(s.s_vn_atom.min()) >= 0.0, "entropy negative")
        _require(
            float(s.s_vn_atom.max()) <= ln2 + 1e-12, "entropy above ln 2"
        )
        worst_gap = max(
            worst_gap, float(np.abs(s.s_vn_atom - s.s_vn_field).max())
        )
    _require(worst_gap < 1e-10, f"atom/field gap {worst_gap:.2e}")
    return f"bounds hold; atom vs field gap {worst_gap:.2e}"


def check_maximal_entanglement_anchor(quick: bool) -> str:
    """A single block at quarter period reaches S = ln 2 and S_L(2) = 1/2."""
    e = np.zeros(1, dtype=complex)
    e[0] = 1.0
    from .dynamics import JointState

    joint = JointState(q=1, e_amp=e, g_amp=np.zeros(1, dtype=complex))
    out = evolve_analytic(joint, ConstantProfile(lam=1.0), math.pi / 4)
    rho = reduced_atom(out)
    s = von_neumann_entropy(rho)
    sl = linear_entropy(rho, 2)
    _require(abs(s - math.log(2.0)) < 1e-10, f"S = {s!r}")
    _require(abs(sl - 0.5) < 1e-12, f"S_L(2) = {sl!r}")
    return f"S - ln2 = {s - math.log(2.0):.2e}, S_L(2) - 1/2 = {sl - 0.5:.2e}"


def check_inversion_anchor(quick: bool) -> str:
    """First inversion minimum of the reference run sits near -0.75."""
    result = run(load_preset("fig4-text"))
    s = result.series
    _require(s.inversion[0] == 1.0, "W(0) is not exactly 1")
    w = s.inversion
    lt = s.times
    window = (lt > 0) & (lt <= 1.5)
    idx = np.where(window)[0]
    first_min = None
    for i in idx:
        if 0 < i < len(w) - 1 and w[i] <= w[i - 1] and w[i] <= w[i + 1]:
            first_min = w[i]
            break
    _require(first_min is not None, "no local minimum before lambda t = 1.5")
    _require(
        -0.90 <= first_min <= -0.60,
        f"first minimum {first_min:.4f} outside [-0.90, -0.60]",
    )
    return f"W(0) = 1 exactly; first minimum {first_min:.4f}"


def check_quadrature_symmetries(quick: bool) -> str:
    """Raster symmetries and normalization on the shipped parameter sets."""
    names = ("fig1b", "fig3a") if quick else ("fig1a", "fig1b", "fig2a", "fig3a", "fig3b")
    worst_norm = worst_sym = 0.0
    for name in names:
        cfg = load_preset(name)
        raster = quadrature_distribution(
            pair_cat(cfg.state_spec()), cfg.grid or default_grid()
        )
        worst_norm = max(worst_norm, abs(raster.norm_estimate - 1.0))
        errs = raster_symmetry_errors(raster)
        _require(float(raster.values.min()) >= 0.0, "negative raster value")
        if cfg.q == 0:
            worst_sym = max(worst_sym, errs["swap"])
        if cfg.phi == 0.0:
            worst_sym = max(worst_sym, errs["parity_x"], errs["parity_y"])
        worst_sym = max(worst_sym, errs["point"])
    _require(worst_norm < 1e-3, f"norm estimate off by {worst_norm:.2e}")
    _require(worst_sym < 1e-12, f"symmetry deviation {worst_sym:.2e}")
    return f"norm gap {worst_norm:.2e}, symmetry gap {worst_sym:.2e}"


def measure_rank_agreement(times, minors, s_vn, s_l2, tie_tol=1e-12) -> int:
    """Assert the two measures induce the same sample ordering.

    Both are strictly increasing in the smaller reduced eigenvalue, so any
    pair separated by more than the tie tolerance must order the same way.
    Near the entropy maximum the mathematical gap can sit below the float
    resolution of the entropy itself, so "same way" allows equality within
    1e-14 rather than demanding a strict inequality the doubles cannot hold.
    """
    minors = np.asarray(minors)
    s_vn = np.asarray(s_vn)
    s_l2 = np.asarray(s_l2)
    separated = (minors[None, :] - minors[:, None]) > tie_tol
    resolution = 1e-14
    vn_ok = (s_vn[None, :] - s_vn[:, None])[separated] > -resolution
    l2_ok = (s_l2[None, :] - s_l2[:, None])[separated] > -resolution
    _require(bool(np.all(vn_ok)), "entropy ordering broken")
    _require(bool(np.all(l2_ok)), "linear entropy ordering broken")
    return int(separated.sum())


def check_measure_rank_agreement(quick: bool) -> str:
    """Entropy and high-order linear entropy order the samples identically."""
    cfg = load_preset("fig5a")
    stride = 10 if quick else 2
    joint = joint_from_ladder(pair_cat(cfg.state_spec()), cfg.initial_internal)
    profile = cfg.coupling_profile()
    times = np.linspace(0.0, cfg.t_max, cfg.samples)[::stride]
    minors, s_vn, s_l2 = [], [], []
    for lt in times:
        rho = reduced_atom(evolve_analytic(joint, profile, lt / cfg.lam))
        ev = rho.eigenvalues()
        minors.append(float(ev.min()))
        s_vn.append(von_neumann_entropy(rho))
        s_l2.append(linear_entropy(rho, 2))
    pairs = measure_rank_agreement(times, minors, s_vn, s_l2)
    return f"orderings agree over {len(times)} samples ({pairs} ordered pairs)"


def check_pulse_area_consistency(quick: bool) -> str:
    """Closed-form areas match numerical quadrature of the profiles."""
    worst = 0.0
    for profile in (ConstantProfile(1.3), SinhProfile(0.8, 0.5)):
        for t in (0.5, 2.0, 5.0):
            numeric, _ = scipy.integrate.quad(
                lambda u: float(profile.value(u)), 0.0, t, epsabs=1e-13, epsrel=1e-13
            )
            worst = max(worst, abs(pulse_area(profile, t) - numeric))
    _require(worst < 1e-10, f"area deviation {worst:.2e}")
    return f"closed forms match quadrature to {worst:.2e}"


ALL_CHECKS = (
    ("oscillator-recurrence", check_oscillator_recurrence),
    ("oscillator-orthonormality", check_oscillator_orthonormality),
    ("oscillator-parity", check_oscillator_parity),
    ("bessel-series-identity", check_bessel_series_identity),
    ("eigenstate-residuals", check_eigenstate_residuals),
    ("cat-parity-selection", check_cat_parity_selection),
    ("cat-normalization", check_cat_normalization),
    ("pulse-area-consistency", check_pulse_area_consistency),
    ("oracle-equivalence", check_oracle_equivalence),
    ("unitarity-conservation", check_unitarity_and_conservation),
    ("entropy-bounds", check_entropy_bounds),
    ("maximal-entanglement-anchor", check_maximal_entanglement_anchor),
    ("inversion-anchor", check_inversion_anchor),
    ("quadrature-symmetries", check_quadrature_symmetries),
    ("measure-rank-agreement", check_measure_rank_agreement),
)


def run_selftest(quick: bool = False) -> list[CheckResult]:
    results: list[CheckResult] = []
    for name, fn in ALL_CHECKS:
        _check(name, lambda fn=fn: fn(quick), results)
    return results


def list_checks() -> list[str]:
    return [name for name, _ in ALL_CHECKS]
