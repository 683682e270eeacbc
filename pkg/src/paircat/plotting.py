"""Figure rendering for the report path.

Matplotlib is imported lazily and driven through the Agg backend so report
generation works headless; every figure lands next to its delimited data
file rather than on screen.
"""

from pathlib import Path

import numpy as np

from .observables import TimeSeries
from .quadrature import Raster


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def render_series_figure(series: TimeSeries, path: Path, title: str) -> Path:
    """Inversion and entanglement panels over the scaled-time axis."""
    plt = _pyplot()
    fig, (ax_w, ax_s) = plt.subplots(2, 1, figsize=(7.0, 5.4), sharex=True)
    ax_w.plot(series.times, series.inversion, lw=0.8, color="tab:blue")
    ax_w.set_ylabel(r"$\langle\sigma_z\rangle$")
    ax_w.set_ylim(-1.05, 1.05)
    ax_w.grid(alpha=0.3)

    ax_s.plot(series.times, series.s_vn_atom, lw=0.9, color="tab:red",
              label="von Neumann")
    ax_s.plot(series.times, series.s_lin_2, lw=0.9, color="tab:green",
              ls="--", label="linear n=2")
    ax_s.plot(series.times, series.s_lin_3, lw=0.9, color="tab:purple",
              ls=":", label="linear n=3")
    ax_s.axhline(np.log(2.0), color="gray", lw=0.6, ls="-.")
    ax_s.set_xlabel(r"scaled time $\lambda t$")
    ax_s.set_ylabel("entropy")
    ax_s.legend(loc="lower right", fontsize=8)
    ax_s.grid(alpha=0.3)

    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_raster_figure(raster: Raster, path: Path, title: str) -> Path:
    """Filled contour map of the quadrature distribution."""
    plt = _pyplot()
    g = raster.grid
    fig, ax = plt.subplots(figsize=(5.6, 5.0))
    xs = g.x_nodes()
    ys = g.y_nodes()
    # values are indexed [x, y]; imshow wants rows = y
    mesh = ax.contourf(xs, ys, raster.values.T, levels=40, cmap="viridis")
    ax.contour(xs, ys, raster.values.T, levels=10, colors="k", linewidths=0.3)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    ax.set_title(title)
    fig.colorbar(mesh, ax=ax, label="P(x, y)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
