"""Reference far-field operator: the radiation sum and E/H reconstruction.

The angular spectrum of a point-source ensemble is

    f(r_hat) = omega*mu0 / (j 4 pi sqrt(Z0)) (I - r_hat r_hat^T)
               sum_i exp(j k r_hat . r_i) w_i p_i,

a tangential complex field on the sphere of directions.  Physical fields at a
finite far-field radius follow by attaching the outgoing factor exp(-jkr)/r.
"""

import math
from dataclasses import dataclass

import numpy as np

from .context import FrequencyContext
from .discretization import CurrentEnsemble, SampledField, SphereQuadrature
from .errors import ContainmentError
from .specfun import Direction


def radiation_scale(ctx: FrequencyContext) -> complex:
    """Kernel prefactor omega*mu0 / (j 4 pi sqrt(Z0))."""
    return ctx.omega * ctx.mu0 / (1j * 4.0 * math.pi * math.sqrt(ctx.Z0))


def _check_contained(ens: CurrentEnsemble, ctx: FrequencyContext) -> None:
    if len(ens) == 0:
        return
    r = np.linalg.norm(ens.positions, axis=1)
    if np.any(r > ctx.a * (1.0 + 1e-12) + 1e-300):
        raise ContainmentError(
            f"source at distance {r.max()} outside analysis ball of radius {ctx.a}"
        )


def direct_far_field(
    ens: CurrentEnsemble, grid: SphereQuadrature, ctx: FrequencyContext
) -> SampledField:
    """Evaluate the angular spectrum of ``ens`` at every grid node.

    The per-node sum runs over sources in index order, so results do not
    depend on any parallel schedule.  Every returned vector is tangential.
    """
    _check_contained(ens, ctx)
    n = len(grid)
    if len(ens) == 0:
        return SampledField(grid=grid, values=np.zeros((n, 3), dtype=complex))
    rhat = grid.unit_vectors                              # (N, 3)
    phases = np.exp(1j * ctx.k * (rhat @ ens.positions.T))  # (N, S)
    raw = phases @ (ens.weights[:, None] * ens.moments)     # (N, 3)
    radial = np.sum(rhat * raw, axis=1)
    tangential = raw - rhat * radial[:, None]
    return SampledField(grid=grid, values=radiation_scale(ctx) * tangential)


@dataclass(frozen=True)
class FarFieldSample:
    """E and H at one far-field point (radius r, direction)."""

    E: np.ndarray  # (3,) complex [V/m]
    H: np.ndarray  # (3,) complex [A/m]
    r: float
    direction: Direction


def em_far_field(
    spectrum_value, direction: Direction, r: float, ctx: FrequencyContext
) -> FarFieldSample:
    """Reconstruct (E, H) at radius ``r`` from one angular-spectrum value.

    E = sqrt(Z0) f exp(-jkr)/r and H = (r_hat x f) exp(-jkr)/(sqrt(Z0) r),
    so H = (r_hat x E)/Z0 holds by construction.
    """
    if not (r > 0.0):
        raise ValueError(f"radius must be positive, got {r}")
    f = np.asarray(spectrum_value, dtype=complex).reshape(3)
    rhat = direction.unit_vector()
    prop = np.exp(-1j * ctx.k * r) / r
    e = math.sqrt(ctx.Z0) * f * prop
    h = np.cross(rhat, f) * (prop / math.sqrt(ctx.Z0))
    return FarFieldSample(E=e, H=h, r=r, direction=direction)


# --- CSV form: theta, phi, weight, Re/Im of the 3 Cartesian components ---

_CSV_HEADER = "theta,phi,weight,re_x,im_x,re_y,im_y,re_z,im_z"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def field_to_csv(fld: SampledField) -> str:
    """Serialize a sampled field; one row per node, 17 significant digits."""
    lines = [_CSV_HEADER]
    g = fld.grid
    for i in range(len(g)):
        v = fld.values[i]
        cells = [g.theta[i], g.phi[i], g.weights[i]]
        for c in range(3):
            cells.extend([v[c].real, v[c].imag])
        lines.append(",".join(_fmt(x) for x in cells))
    return "\n".join(lines) + "\n"


def field_from_csv(text: str) -> SampledField:
    """Parse a field CSV back into a :class:`SampledField`.

    The grid is reconstructed from the node columns; if the nodes form the
    product structure written by :func:`~farfield.discretization.sphere_grid`,
    the exactness degree is recovered, otherwise it is conservatively 0.
    """
    lines = [ln for ln in text.strip().split("\n") if ln]
    if not lines or lines[0] != _CSV_HEADER:
        raise ValueError("missing or malformed field CSV header")
    rows = np.array(
        [[float(c) for c in ln.split(",")] for ln in lines[1:]], dtype=float
    ).reshape(-1, 9)
    theta, phi, weights = rows[:, 0], rows[:, 1], rows[:, 2]
    n_theta = np.unique(theta).shape[0]
    n_phi = np.unique(phi).shape[0]
    if n_theta * n_phi == rows.shape[0] and n_phi == 2 * (n_theta - 1) + 1:
        exactness = 2 * (n_theta - 1)
        grid = SphereQuadrature(theta, phi, weights, exactness, n_theta, n_phi)
    else:
        grid = SphereQuadrature(theta, phi, weights, 0)
    values = rows[:, 3::2] + 1j * rows[:, 4::2]
    return SampledField(grid=grid, values=values)
