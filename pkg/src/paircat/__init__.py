"""Two-mode pair cat states of a trapped ion: state construction, quadrature
distributions, exchange-coupling dynamics, and entanglement measures."""

__version__ = "0.1.0"

from .dynamics import (
    ConstantProfile,
    CouplingProfile,
    JointState,
    PiecewiseProfile,
    SinhProfile,
    build_dense_generator,
    conserved_quantities,
    evolve_analytic,
    evolve_oracle,
    joint_from_ladder,
    pulse_area,
)
from .fockspace import (
    LadderState,
    PairCatSpec,
    apply_pair_annihilation,
    choose_truncation,
    number_difference,
    pair_cat,
    pair_coherent,
)
from .observables import (
    QubitDensity,
    TimeSeries,
    atomic_inversion,
    field_entropy,
    linear_entropy,
    reduced_atom,
    von_neumann_entropy,
)
from .quadrature import (
    GridSpec,
    Raster,
    cat_wavefunction,
    default_grid,
    quadrature_distribution,
)
from .runner import ExperimentConfig, RunManifest, load_config, run, sweep
from .specfun import (
    WavefunctionColumn,
    bessel_i,
    log_factorial,
    oscillator_column,
)

__all__ = [
    "__version__",
    "ConstantProfile", "CouplingProfile", "JointState", "PiecewiseProfile",
    "SinhProfile", "build_dense_generator", "conserved_quantities",
    "evolve_analytic", "evolve_oracle", "joint_from_ladder", "pulse_area",
    "LadderState", "PairCatSpec", "apply_pair_annihilation",
    "choose_truncation", "number_difference", "pair_cat", "pair_coherent",
    "QubitDensity", "TimeSeries", "atomic_inversion", "field_entropy",
    "linear_entropy", "reduced_atom", "von_neumann_entropy",
    "GridSpec", "Raster", "cat_wavefunction", "default_grid",
    "quadrature_distribution",
    "ExperimentConfig", "RunManifest", "load_config", "run", "sweep",
    "WavefunctionColumn", "bessel_i", "log_factorial", "oscillator_column",
]
