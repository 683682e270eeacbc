"""Declarative experiment configuration, execution, sweeps, and persistence.

Configs are flat key = value text with # comments.  Time axes are specified
in scaled units lambda*t; the  coupling prefactor `lambda` sets the time
unit for every profile shape.  All numerics are deterministic: identical
configs produce byte-identical CSV regardless of the thread cap.
"""

import math
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .dynamics import (
    ConstantProfile,
    CouplingProfile,
    PiecewiseProfile,
    SinhProfile,
    evolve_analytic,
    joint_from_ladder,
    pulse_area,
)
from .errors import ConfigError
from .fockspace import PairCatSpec, choose_truncation_detail, pair_cat
from .observables import (
    TimeSeries,
    atomic_inversion,
    field_entropy,
    linear_entropy,
    reduced_atom,
    von_neumann_entropy,
)
from .quadrature import GridSpec, Raster, default_grid, quadrature_distribution

VALID_OUTPUTS = {"inversion", "entropies", "quadrature"}
SWEEPABLE = {"xi", "q", "phi", "varpi"}
_KNOWN_KEYS = {
    "xi", "q", "phi", "tail_epsilon", "initial_internal", "profile",
    "lambda", "varpi", "knots", "t_max", "samples", "outputs", "grid",
    "sweep", "log_base", "sign_convention", "eta",
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; see load_config for the text format."""

    xi: complex = 1.0
    q: int = 0
    phi: float = 0.0
    tail_epsilon: float = 1e-12
    initial_internal: str = "excited"
    profile_kind: str = "constant"
    lam: float = 1.0
    varpi: float = 0.5
    knots: tuple = ()
    t_max: float = 25.0
    samples: int = 501
    outputs: frozenset = frozenset({"inversion", "entropies"})
    grid: GridSpec | None = None
    sweep_parameter: str | None = None
    sweep_values: tuple = ()
    log_base: str = "natural"
    sign_convention: str = "excited_minus_ground"
    eta: float | None = None
    notes: tuple = ()

    def coupling_profile(self) -> CouplingProfile:
        if self.profile_kind == "constant":
            return ConstantProfile(lam=self.lam)
        if self.profile_kind == "sinh":
            return SinhProfile(lam=self.lam, varpi=self.varpi * self.lam)
        return PiecewiseProfile(knots=self.knots)

    def state_spec(self) -> PairCatSpec:
        return PairCatSpec(
            xi=self.xi, q=self.q, phi=self.phi, tail_epsilon=self.tail_epsilon
        )


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run, plus runtime bookkeeping.

    wall_seconds is the single non-deterministic field; exports meant to be
    byte-reproducible leave it out.
    """

    config: dict
    n_max: int
    certified_tail: float
    version: str
    wall_seconds: float
    notes: tuple = ()

    def to_dict(self, include_volatile: bool = True) -> dict:
        out = {
            "config": self.config,
            "n_max": self.n_max,
            "certified_tail": self.certified_tail,
            "version": self.version,
            "notes": list(self.notes),
        }
        if include_volatile:
            out["wall_seconds"] = self.wall_seconds
        return out


@dataclass(frozen=True)
class RunResult:
    config: ExperimentConfig
    manifest: RunManifest
    series: TimeSeries | None = None
    raster: Raster | None = None


@dataclass(frozen=True)
class SweepPoint:
    parameter: str
    value: object
    result: RunResult | None = None
    error: Exception | None = None


_PI_EXPR = re.compile(
    r"^\s*(-?)\s*(?:(\d+(?:\.\d*)?)\s*\*\s*)?pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$"
)


def parse_angle(text: str) -> float:
    """Float literal or a pi fraction like 'pi', '-pi/2', '0.5*pi'."""
    m = _PI_EXPR.match(text)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        num = float(m.group(2)) if m.group(2) else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        return sign * num * math.pi / den
    return float(text)


def _parse_grid(text: str) -> GridSpec:
    def axis(part):
        lo, hi, n = part.split(":")
        return float(lo), float(hi), int(n)

    parts = text.split(",")
    if len(parts) == 1:
        x_min, x_max, nx = axis(parts[0])
        return GridSpec(x_min, x_max, x_min, x_max, nx, nx)
    if len(parts) == 2:
        x_min, x_max, nx = axis(parts[0])
        y_min, y_max, ny = axis(parts[1])
        return GridSpec(x_min, x_max, y_min, y_max, nx, ny)
    raise ValueError("grid must be 'lo:hi:n' or 'xlo:xhi:nx,ylo:yhi:ny'")


def _parse_knots(text: str) -> tuple:
    knots = []
    for piece in text.split(","):
        t, v = piece.split(":")
        knots.append((float(t), float(v)))
    return tuple(knots)


def load_config(text: str) -> ExperimentConfig:
    """Parse and validate a flat key = value config.

    Raises ConfigError carrying every problem found, not just the first;
    parse failures report their line number.
    """
    raw = {}
    errors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KNOWN_KEYS:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in raw:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        raw[key] = (lineno, value)

    fields = {}
    notes = []

    def take(key, parser, default=None):
        if key not in raw:
            return default
        lineno, value = raw[key]
        try:
            return parser(value)
        except (ValueError, TypeError) as exc:
            errors.append(f"line {lineno}: bad value for {key!r}: {exc}")
            return default

    fields["xi"] = take("xi", complex, 1.0)
    q = take("q", int, 0)
    if q is not None and q < 0:
        notes.append(
            f"q = {q} relabeled to {-q} by swapping the two mode labels"
        )
        q = -q
    fields["q"] = q
    fields["phi"] = take("phi", parse_angle, 0.0)
    fields["tail_epsilon"] = take("tail_epsilon", float, 1e-12)
    fields["initial_internal"] = take("initial_internal", str, "excited")
    fields["profile_kind"] = take("profile", str, "constant")
    fields["lam"] = take("lambda", float, 1.0)
    fields["varpi"] = take("varpi", float, 0.5)
    fields["knots"] = take("knots", _parse_knots, ())
    fields["t_max"] = take("t_max", float, 25.0)
    fields["samples"] = take("samples", int, 501)
    outputs = take(
        "outputs",
        lambda v: frozenset(p.strip() for p in v.split(",") if p.strip()),
        frozenset({"inversion", "entropies"}),
    )
    fields["outputs"] = outputs
    fields["grid"] = take("grid", _parse_grid, None)
    fields["log_base"] = take("log_base", str, "natural")
    fields["sign_convention"] = take("sign_convention", str, "excited_minus_ground")
    fields["eta"] = take("eta", float, None)
    if fields["eta"] is not None:
        notes.append(
            "eta only rescales the coupling prefactor and has no effect on "
            "scaled-time outputs; recorded for provenance"
        )

    def parse_sweep(value):
        name, _, rest = value.partition(":")
        name = name.strip()
        if name not in SWEEPABLE:
            raise ValueError(f"sweep parameter must be one of {sorted(SWEEPABLE)}")
        items = [p.strip() for p in rest.split(",") if p.strip()]
        if not items:
            raise ValueError("sweep value list is empty")
        caster = {"xi": complex, "q": int, "phi": parse_angle, "varpi": float}[name]
        return name, tuple(caster(p) for p in items)

    sweep = take("sweep", parse_sweep, None)
    if sweep is not None:
        fields["sweep_parameter"], fields["sweep_values"] = sweep

    # range validation mirrors the type invariants
    if fields.get("tail_epsilon") is not None and not (
        0.0 < fields["tail_epsilon"] <= 1e-6
    ):
        errors.append("tail_epsilon must lie in (0, 1e-6]")
    if fields.get("samples") is not None and fields["samples"] < 2:
        errors.append("samples must be >= 2")
    if fields.get("t_max") is not None and fields["t_max"] <= 0:
        errors.append("t_max must be > 0")
    if fields.get("initial_internal") not in (None, "excited", "ground"):
        errors.append("initial_internal must be 'excited' or 'ground'")
    if fields.get("profile_kind") not in (None, "constant", "sinh", "piecewise"):
        errors.append("profile must be 'constant', 'sinh', or 'piecewise'")
    if fields.get("profile_kind") == "piecewise" and not fields.get("knots"):
        errors.append("piecewise profile requires a knots list")
    if fields.get("lam") is not None and fields["lam"] <= 0:
        errors.append("lambda must be > 0")
    if fields.get("varpi") is not None and fields["varpi"] <= 0:
        errors.append("varpi must be > 0")
    if outputs is not None and not outputs <= VALID_OUTPUTS:
        errors.append(
            f"outputs may only contain {sorted(VALID_OUTPUTS)}, "
            f"got {sorted(outputs)}"
        )
    if fields.get("log_base") not in (None, "natural", "two"):
        errors.append("log_base must be 'natural' or 'two'")
    if fields.get("sign_convention") not in (
        None, "excited_minus_ground", "ground_minus_excited",
    ):
        errors.append(
            "sign_convention must be 'excited_minus_ground' or "
            "'ground_minus_excited'"
        )
    if (
        fields.get("sweep_parameter") == "varpi"
        and fields.get("profile_kind") != "sinh"
    ):
        errors.append("sweeping varpi requires profile = sinh")

    if errors:
        raise ConfigError(errors)
    fields["notes"] = tuple(notes)
    return ExperimentConfig(**fields)


def config_echo(config: ExperimentConfig) -> dict:
    """Resolved config as a plain dict (manifest embedding and round trips)."""
    return {
        "xi": [config.xi.real, config.xi.imag]
        if isinstance(config.xi, complex)
        else [float(config.xi), 0.0],
        "q": config.q,
        "phi": config.phi,
        "tail_epsilon": config.tail_epsilon,
        "initial_internal": config.initial_internal,
        "profile": config.profile_kind,
        "lambda": config.lam,
        "varpi": config.varpi,
        "knots": [list(k) for k in config.knots],
        "t_max": config.t_max,
        "samples": config.samples,
        "outputs": sorted(config.outputs),
        "grid": None
        if config.grid is None
        else [
            config.grid.x_min, config.grid.x_max,
            config.grid.y_min, config.grid.y_max,
            config.grid.nx, config.grid.ny,
        ],
        "sweep_parameter": config.sweep_parameter,
        "sweep_values": [
            [v.real, v.imag] if isinstance(v, complex) else v
            for v in config.sweep_values
        ],
        "log_base": config.log_base,
        "sign_convention": config.sign_convention,
        "eta": config.eta,
    }


def config_from_echo(echo: dict) -> ExperimentConfig:
    """Rebuild a config from a manifest echo (exact re-execution)."""
    sweep_param = echo.get("sweep_parameter")
    sweep_values = tuple(
        complex(v[0], v[1]) if isinstance(v, list) else v
        for v in echo.get("sweep_values", [])
    )
    grid = echo.get("grid")
    return ExperimentConfig(
        xi=complex(echo["xi"][0], echo["xi"][1]),
        q=echo["q"],
        phi=echo["phi"],
        tail_epsilon=echo["tail_epsilon"],
        initial_internal=echo["initial_internal"],
        profile_kind=echo["profile"],
        lam=echo["lambda"],
        varpi=echo["varpi"],
        knots=tuple(tuple(k) for k in echo.get("knots", [])),
        t_max=echo["t_max"],
        samples=echo["samples"],
        outputs=frozenset(echo["outputs"]),
        grid=None if grid is None else GridSpec(*grid),
        sweep_parameter=sweep_param,
        sweep_values=sweep_values,
        log_base=echo["log_base"],
        sign_convention=echo["sign_convention"],
        eta=echo.get("eta"),
    )


def run(config: ExperimentConfig, threads: int = 1) -> RunResult:
    """Build the state, evolve over the sample grid, collect observables."""
    started = time.perf_counter()
    spec = config.state_spec()
    n_max, tail_bound = choose_truncation_detail(
        spec.xi, spec.q, spec.tail_epsilon
    )
    ladder = pair_cat(spec)
    profile = config.coupling_profile()

    series = None
    if config.outputs & {"inversion", "entropies"}:
        joint0 = joint_from_ladder(ladder, config.initial_internal)
        scaled = np.linspace(0.0, config.t_max, config.samples)
        inversion = np.empty(config.samples)
        alpha = np.empty(config.samples)
        s_atom = np.empty(config.samples)
        s_field = np.empty(config.samples)
        s_lin2 = np.empty(config.samples)
        s_lin3 = np.empty(config.samples)
        norm_err = np.empty(config.samples)
        sign = 1.0 if config.sign_convention == "excited_minus_ground" else -1.0
        for i, lt in enumerate(scaled):
            t_phys = lt / config.lam
            alpha[i] = pulse_area(profile, t_phys)
            psi = evolve_analytic(joint0, profile, t_phys)
            rho = reduced_atom(psi)
            inversion[i] = sign * atomic_inversion(psi)
            s_atom[i] = von_neumann_entropy(rho, config.log_base)
            s_f = field_entropy(psi)
            s_field[i] = s_f if config.log_base == "natural" else s_f / math.log(2.0)
            s_lin2[i] = linear_entropy(rho, 2)
            s_lin3[i] = linear_entropy(rho, 3)
            norm_err[i] = abs(psi.norm() - 1.0)
        series = TimeSeries(
            times=scaled,
            alpha=alpha,
            inversion=inversion,
            s_vn_atom=s_atom,
            s_vn_field=s_field,
            s_lin_2=s_lin2,
            s_lin_3=s_lin3,
            norm_error=norm_err,
        )

    raster = None
    if "quadrature" in config.outputs:
        raster = quadrature_distribution(
            ladder, config.grid or default_grid(), threads=threads
        )

    manifest = RunManifest(
        config=config_echo(config),
        n_max=n_max,
        certified_tail=tail_bound,
        version=__version__,
        wall_seconds=time.perf_counter() - started,
        notes=config.notes,
    )
    return RunResult(config=config, manifest=manifest, series=series, raster=raster)


def sweep(config: ExperimentConfig, threads: int = 1) -> list[SweepPoint]:
    """Run each sweep point independently; failures do not stop the rest."""
    if config.sweep_parameter is None:
        return [SweepPoint(parameter="", value=None, result=run(config, threads))]
    param = config.sweep_parameter
    points = []

    def one(value):
        notes = config.notes
        if param == "q" and value < 0:
            notes = notes + (
                f"q = {value} relabeled to {-value} by swapping the two mode labels",
            )
            value = -value
        point_config = replace(
            config, sweep_parameter=None, sweep_values=(), notes=notes,
            **{param: value},
        )
        return run(point_config, threads=1)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(one, v) for v in config.sweep_values]
            for value, fut in zip(config.sweep_values, futures):
                try:
                    points.append(SweepPoint(param, value, result=fut.result()))
                except Exception as exc:  # collected, not raised
                    points.append(SweepPoint(param, value, error=exc))
    else:
        for value in config.sweep_values:
            try:
                points.append(SweepPoint(param, value, result=one(value)))
            except Exception as exc:
                points.append(SweepPoint(param, value, error=exc))
    return points


def format_series_csv(series: TimeSeries) -> str:
    """Fixed column order, 17 significant digits, mandatory header."""
    cols = series.column_arrays()
    lines = [",".join(TimeSeries.COLUMNS)]
    for i in range(len(series.times)):
        lines.append(
            ",".join(f"{cols[name][i]:.17g}" for name in TimeSeries.COLUMNS)
        )
    return "\n".join(lines) + "\n"


def series_json_payload(result: RunResult) -> dict:
    """Series columns plus the manifest, deterministic fields only."""
    payload = {
        name: [float(v) for v in col]
        for name, col in result.series.column_arrays().items()
    }
    payload["manifest"] = result.manifest.to_dict(include_volatile=False)
    return payload
