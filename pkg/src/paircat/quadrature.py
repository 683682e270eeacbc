"""Coordinate-space wavefunction and quadrature distribution rasterization.

psi(x, y) = sum_n c_n phi_{n+q}(x) phi_n(y) for a ladder state, and
P(x, y) = |psi(x, y)|^2 sampled on a rectangular grid.  Oscillator columns
are computed once per axis and reused across the raster.
"""

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import GridTooSmallError
from .fockspace import LadderState
from .specfun import oscillator_values

BOUNDARY_AMPLITUDE_TOL = 1e-8

# Rows are rasterized in fixed-size slabs so the output is bit-identical
# no matter how many workers dispatch them.
_ROW_CHUNK = 32


@dataclass(frozen=True)
class GridSpec:
    """Rectangular raster grid (node counts include both edges)."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("grid bounds must satisfy min < max on both axes")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 nodes per axis")

    def x_nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def y_nodes(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)


def default_grid() -> GridSpec:
    """[-8, 8]^2 with 321 nodes per axis; covers the shipped presets with
    boundary amplitude far below the clipping tolerance."""
    return GridSpec(-8.0, 8.0, -8.0, 8.0, 321, 321)


@dataclass(frozen=True)
class Raster:
    """Sampled quadrature distribution with its trapezoid normalization."""

    grid: GridSpec
    values: np.ndarray  # shape (nx, ny), values[i, j] = P(x_i, y_j)
    norm_estimate: float


def cat_wavefunction(state: LadderState, x: float, y: float) -> complex:
    """psi(x, y) = sum_n c_n phi_{n+q}(x) phi_n(y)."""
    q = state.q
    n_max = state.n_max
    col_x = oscillator_values(np.array([x], dtype=float), n_max + q)[0]
    col_y = oscillator_values(np.array([y], dtype=float), n_max)[0]
    return complex(np.dot(state.coeffs * col_x[q : q + n_max + 1], col_y))


def _amplitude_matrix(state: LadderState, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    q, n_max = state.q, state.n_max
    phi_x = oscillator_values(xs, n_max + q)[:, q : q + n_max + 1]
    phi_y = oscillator_values(ys, n_max)
    return (phi_x * state.coeffs) @ phi_y.T


def quadrature_distribution(
    state: LadderState, grid: GridSpec, threads: int = 1
) -> Raster:
    """Rasterize P(x, y) = |psi(x, y)|^2 over the grid.

    Refuses grids whose boundary still carries wavefunction amplitude above
    1e-8, which would visibly clip the state.  The trapezoid integral of the
    raster is reported as norm_estimate.
    """
    xs = grid.x_nodes()
    ys = grid.y_nodes()
    q, n_max = state.q, state.n_max
    phi_x = oscillator_values(xs, n_max + q)[:, q : q + n_max + 1] * state.coeffs
    phi_y = oscillator_values(ys, n_max)

    edge_x = np.abs(phi_x[[0, -1], :] @ phi_y.T).max()
    edge_y = np.abs(phi_x @ phi_y[[0, -1], :].T).max()
    boundary = max(float(edge_x), float(edge_y))
    if boundary >= BOUNDARY_AMPLITUDE_TOL:
        raise GridTooSmallError(
            f"boundary amplitude {boundary:.3e} >= {BOUNDARY_AMPLITUDE_TOL}; "
            f"the grid would clip the state, widen it"
        )

    chunks = [
        (lo, min(lo + _ROW_CHUNK, grid.nx)) for lo in range(0, grid.nx, _ROW_CHUNK)
    ]

    def render(span):
        lo, hi = span
        amp = phi_x[lo:hi, :] @ phi_y.T
        return amp.real**2 + amp.imag**2

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(render, chunks))
    else:
        parts = [render(span) for span in chunks]
    values = np.vstack(parts)

    wx = np.full(grid.nx, xs[1] - xs[0])
    wx[0] *= 0.5
    wx[-1] *= 0.5
    wy = np.full(grid.ny, ys[1] - ys[0])
    wy[0] *= 0.5
    wy[-1] *= 0.5
    norm = float(wx @ values @ wy)
    return Raster(grid=grid, values=values, norm_estimate=norm)


def write_raster_matrix(raster: Raster, stream: io.TextIOBase, state_label: str):
    """Plain-text matrix: 4 header lines then one row of P values per x node."""
    g = raster.grid
    stream.write(f"# grid: x [{g.x_min:.17g}, {g.x_max:.17g}] "
                 f"y [{g.y_min:.17g}, {g.y_max:.17g}]\n")
    stream.write(f"# nodes: {g.nx} x {g.ny}\n")
    stream.write(f"# norm_estimate: {raster.norm_estimate:.17g}\n")
    stream.write(f"# state: {state_label}\n")
    for row in raster.values:
        stream.write(" ".join(f"{v:.17g}" for v in row))
        stream.write("\n")


def write_raster_csv(raster: Raster, stream: io.TextIOBase, state_label: str):
    """Long-form CSV (x, y, p) with the same 4-line header as the matrix form."""
    g = raster.grid
    stream.write(f"# grid: x [{g.x_min:.17g}, {g.x_max:.17g}] "
                 f"y [{g.y_min:.17g}, {g.y_max:.17g}]\n")
    stream.write(f"# nodes: {g.nx} x {g.ny}\n")
    stream.write(f"# norm_estimate: {raster.norm_estimate:.17g}\n")
    stream.write(f"# state: {state_label}\n")
    stream.write("x,y,p\n")
    xs = g.x_nodes()
    ys = g.y_nodes()
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            stream.write(f"{x:.17g},{y:.17g},{raster.values[i, j]:.17g}\n")


def raster_symmetry_errors(raster: Raster) -> dict:
    """Max asymmetries under coordinate swap, per-axis parity, and inversion.

    Meaningful for grids symmetric about the origin (and square, for the
    swap entry); exposed for the selftest and the symmetry regressions.
    """
    v = raster.values
    out = {}
    if raster.grid.nx == raster.grid.ny:
        out["swap"] = float(np.abs(v - v.T).max())
    out["parity_x"] = float(np.abs(v - v[::-1, :]).max())
    out["parity_y"] = float(np.abs(v - v[:, ::-1]).max())
    out["point"] = float(np.abs(v - v[::-1, ::-1]).max())
    return out
