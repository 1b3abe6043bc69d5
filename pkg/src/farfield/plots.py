"""Figure rendering for the CLI report paths.

Each function writes one matplotlib figure to a file next to the delimited
output; the CSV remains the data contract.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import ErrorBound, ErrorSweep
from .discretization import SampledField


def render_sweep_figure(sweep: ErrorSweep, path) -> None:
    """Semilog plot of truncation/projection errors against the bound."""
    ls = [r.L for r in sweep.records]
    err_k = [r.empirical_error for r in sweep.records]
    err_p = [r.projection_error for r in sweep.records]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(ls, err_k, "o-", label="truncation error")
    ax.semilogy(ls, err_p, "s-", ms=4, label="projection error")
    bl = [(r.L, r.bound) for r in sweep.records if r.bound is not None]
    if bl:
        ax.semilogy([p[0] for p in bl], [p[1] for p in bl], "k--", label="bound")
    ax.axvline(sweep.l_b, color="gray", lw=0.8)
    ax.text(sweep.l_b, ax.get_ylim()[0], "  effective bandwidth", rotation=90,
            va="bottom", fontsize=8, color="gray")
    ax.set_xlabel("truncation degree L")
    ax.set_ylabel("operator-norm error")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_bound_figure(bound: ErrorBound, l_max: int, path) -> None:
    """Bound value and decay exponent over the valid degree range."""
    ls = np.arange(bound.l_b, l_max + 1)
    vals = [bound.evaluate(int(L)) for L in ls]
    betas = [bound.beta(int(L)) for L in ls]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.5))
    ax1.semilogy(ls, vals, "o-")
    ax1.set_xlabel("L")
    ax1.set_ylabel("bound")
    ax2.plot(ls, betas, "o-")
    ax2.set_xlabel("L")
    ax2.set_ylabel("decay exponent beta(L)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_pattern_figure(fld: SampledField, path) -> None:
    """Magnitude of the angular spectrum over the (theta, phi) grid."""
    g = fld.grid
    mag = np.linalg.norm(fld.values, axis=1)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if g.n_theta and g.n_phi:
        img = mag.reshape(g.n_theta, g.n_phi)
        th = g.theta.reshape(g.n_theta, g.n_phi)[:, 0]
        ph = g.phi.reshape(g.n_theta, g.n_phi)[0, :]
        pm = ax.pcolormesh(np.degrees(ph), np.degrees(th), img, shading="nearest")
        fig.colorbar(pm, ax=ax, label="|f|")
        ax.set_xlabel("phi [deg]")
        ax.set_ylabel("theta [deg]")
    else:
        sc = ax.scatter(np.degrees(g.phi), np.degrees(g.theta), c=mag, s=12)
        fig.colorbar(sc, ax=ax, label="|f|")
        ax.set_xlabel("phi [deg]")
        ax.set_ylabel("theta [deg]")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
