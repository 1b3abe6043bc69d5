"""Finite-rank expansion machinery.

Multipole coefficients of a current ensemble, the degree-truncated synthesis
of its far field, partial sums of the plane-wave (Jacobi-Anger) kernel, and
the orthogonal projector onto vector spherical harmonics of bounded degree.

Degree conventions, kept deliberately distinct: the truncated synthesis of
``truncated_far_field`` sums degrees l = 0 .. L-1, while ``project_onto_VL``
keeps degrees l <= L.
"""

import math
from dataclasses import dataclass

import numpy as np

from .context import FrequencyContext
from .discretization import CurrentEnsemble, SampledField, SphereQuadrature
from .errors import GridExactnessError
from .radiation import _check_contained, radiation_scale
from .specfun import (
    Direction,
    sh_index,
    sh_table,
    spherical_bessel_j,
    vsh_tangent_table,
)


def synthesis_scale(ctx: FrequencyContext) -> complex:
    """Prefactor omega*mu0 / (j sqrt(Z0)) of the truncated synthesis.

    Equals 4*pi times the radiation kernel prefactor; the 4*pi of the
    radiation sum cancels against the one of the harmonic addition theorem.
    """
    return 4.0 * math.pi * radiation_scale(ctx)


def source_spherical(ens: CurrentEnsemble):
    """Radii and angular coordinates of the ensemble's source positions.

    Sources at the exact origin get placeholder angles; every quantity that
    multiplies them (j_l(0) for l >= 1) vanishes, and Y_0^0 is constant.
    """
    r = np.linalg.norm(ens.positions, axis=1)
    safe = np.where(r > 0.0, r, 1.0)
    theta = np.arccos(np.clip(ens.positions[:, 2] / safe, -1.0, 1.0))
    phi = np.mod(np.arctan2(ens.positions[:, 1], ens.positions[:, 0]), 2.0 * np.pi)
    return r, theta, phi


def _bessel_table(l_max: int, k: float, radii: np.ndarray) -> np.ndarray:
    """j_l(k r_i) table of shape (l_max+1, n_sources)."""
    if radii.shape[0] == 0:
        return np.zeros((l_max + 1, 0))
    return np.stack([spherical_bessel_j(l_max, k * r) for r in radii], axis=1)


@dataclass(eq=False)
class MultipoleCoefficients:
    """The C^3-valued moments c_{l,m} for degrees 0 <= l < L."""

    L: int
    coeffs: dict  # (l, m) -> (3,) complex ndarray

    def __post_init__(self):
        expected = {(l, m) for l in range(self.L) for m in range(-l, l + 1)}
        if set(self.coeffs.keys()) != expected:
            raise ValueError(f"coefficient map must hold exactly L^2 = {self.L**2} entries")

    def get(self, l: int, m: int) -> np.ndarray:
        return self.coeffs[(l, m)]


def multipole_coefficients(
    ens: CurrentEnsemble, L: int, ctx: FrequencyContext
) -> MultipoleCoefficients:
    """Moments c_{l,m} = j^l sum_i j_l(k r_i) conj(Y_l^m(r_hat_i)) w_i p_i.

    Covers all 0 <= |m| <= l < L.
    """
    if L < 0:
        raise ValueError(f"truncation degree must be non-negative, got {L}")
    _check_contained(ens, ctx)
    coeffs: dict = {}
    if L == 0:
        return MultipoleCoefficients(L=0, coeffs=coeffs)
    if len(ens) == 0:
        for l in range(L):
            for m in range(-l, l + 1):
                coeffs[(l, m)] = np.zeros(3, dtype=complex)
        return MultipoleCoefficients(L=L, coeffs=coeffs)
    r, theta, phi = source_spherical(ens)
    y = sh_table(L - 1, theta, phi)                      # (L^2, S)
    bes = _bessel_table(L - 1, ctx.k, r)                 # (L, S)
    weighted = ens.weights[:, None] * ens.moments        # (S, 3)
    for l in range(L):
        j_pow = 1j**l
        for m in range(-l, l + 1):
            row = bes[l] * np.conj(y[sh_index(l, m)])
            coeffs[(l, m)] = j_pow * (row @ weighted)
    return MultipoleCoefficients(L=L, coeffs=coeffs)


def _require_exactness(grid: SphereQuadrature, L: int, what: str) -> None:
    needed = 2 * (L + 1)
    if grid.exactness_degree < needed:
        raise GridExactnessError(
            f"{what} at degree L={L} needs grid exactness >= {needed}, "
            f"grid provides {grid.exactness_degree}"
        )


def truncated_far_field(
    coeffs: MultipoleCoefficients, grid: SphereQuadrature, ctx: FrequencyContext
) -> SampledField:
    """Tangential synthesis sum_{l<L} sum_m c_{l,m} Y_l^m over the grid."""
    _require_exactness(grid, coeffs.L, "truncated synthesis")
    n = len(grid)
    if coeffs.L == 0:
        return SampledField(grid=grid, values=np.zeros((n, 3), dtype=complex))
    y = sh_table(coeffs.L - 1, grid.theta, grid.phi)     # (L^2, N)
    cmat = np.zeros((coeffs.L**2, 3), dtype=complex)
    for l in range(coeffs.L):
        for m in range(-l, l + 1):
            cmat[sh_index(l, m)] = coeffs.coeffs[(l, m)]
    raw = y.T @ cmat                                     # (N, 3)
    rhat = grid.unit_vectors
    radial = np.sum(rhat * raw, axis=1)
    tangential = raw - rhat * radial[:, None]
    return SampledField(grid=grid, values=synthesis_scale(ctx) * tangential)


def jacobi_anger_kernel(direction: Direction, r_prime, k: float, l_terms: int) -> complex:
    """Partial sum S_L of the plane-wave expansion of exp(j k r_hat . r').

    S_L(r') = sum_{l=0}^{L} j^l (2l+1) j_l(k r') P_l(r_hat . r_hat'), with
    ``l_terms`` playing the role of L (the sum is inclusive).
    """
    if l_terms < 0:
        raise ValueError(f"l_terms must be non-negative, got {l_terms}")
    rp = np.asarray(r_prime, dtype=float).reshape(3)
    rnorm = float(np.linalg.norm(rp))
    rhat = direction.unit_vector()
    t = float(rhat @ (rp / rnorm)) if rnorm > 0.0 else 1.0
    t = min(1.0, max(-1.0, t))
    bes = spherical_bessel_j(l_terms, k * rnorm)
    # Legendre P_l(t) by the three-term recurrence, accumulated on the fly.
    total = 0.0j
    p_prev, p_curr = 1.0, t
    for l in range(l_terms + 1):
        if l == 0:
            pl = 1.0
        elif l == 1:
            pl = t
        else:
            pl = ((2.0 * l - 1.0) * t * p_curr - (l - 1.0) * p_prev) / l
            p_prev, p_curr = p_curr, pl
        total += (1j**l) * (2.0 * l + 1.0) * bes[l] * pl
    return complex(total)


def project_onto_VL(fld: SampledField, L: int) -> SampledField:
    """Orthogonal projection onto vector spherical harmonics of degree <= L.

    Expands the field with quadrature inner products (radial part against the
    unit-norm Y_l^m r_hat, tangential parts against Psi/Phi scaled by the
    analytic norm sqrt(l(l+1))), keeps degrees <= L, and resynthesizes.  The
    degree-0 tangential harmonics vanish identically and are skipped.
    """
    if L < 0:
        raise ValueError(f"projection degree must be non-negative, got {L}")
    _require_exactness(fld.grid, L, "projection")
    grid = fld.grid
    w = grid.weights
    rhat = grid.unit_vectors
    that, phat = grid.theta_hat, grid.phi_hat

    f_r = np.sum(rhat * fld.values, axis=1)
    f_t = np.sum(that * fld.values, axis=1)
    f_p = np.sum(phat * fld.values, axis=1)

    y = sh_table(L, grid.theta, grid.phi)                    # ((L+1)^2, N)
    psi_t, psi_p = vsh_tangent_table(L, grid.theta, grid.phi)

    # <f, Y r_hat> for every (l, m) at once
    rad_coeff = np.conj(y) @ (w * f_r)
    out_r = y.T @ rad_coeff

    out_t = np.zeros(len(grid), dtype=complex)
    out_p = np.zeros(len(grid), dtype=complex)
    if L >= 1:
        norms = np.zeros((L + 1) ** 2)
        for l in range(1, L + 1):
            norms[l * l : (l + 1) * (l + 1)] = 1.0 / math.sqrt(l * (l + 1.0))
        psi_t_n = psi_t * norms[:, None]
        psi_p_n = psi_p * norms[:, None]
        psi_coeff = np.conj(psi_t_n) @ (w * f_t) + np.conj(psi_p_n) @ (w * f_p)
        # Phi_hat has components (-psi_phi, psi_theta)
        phi_coeff = -np.conj(psi_p_n) @ (w * f_t) + np.conj(psi_t_n) @ (w * f_p)
        out_t = psi_t_n.T @ psi_coeff - psi_p_n.T @ phi_coeff
        out_p = psi_p_n.T @ psi_coeff + psi_t_n.T @ phi_coeff

    values = out_r[:, None] * rhat + out_t[:, None] * that + out_p[:, None] * phat
    return SampledField(grid=grid, values=values)


def coefficients_to_dict(coeffs: MultipoleCoefficients) -> dict:
    """JSON-ready document, entries sorted by (l, m)."""
    entries = []
    for l in range(coeffs.L):
        for m in range(-l, l + 1):
            c = coeffs.coeffs[(l, m)]
            entries.append(
                {
                    "l": l,
                    "m": m,
                    "re": [float(v) for v in c.real],
                    "im": [float(v) for v in c.imag],
                }
            )
    return {"L": coeffs.L, "coeffs": entries}


def coefficients_from_dict(doc: dict) -> MultipoleCoefficients:
    coeffs = {}
    for e in doc["coeffs"]:
        coeffs[(int(e["l"]), int(e["m"]))] = np.asarray(e["re"], dtype=float) + 1j * np.asarray(
            e["im"], dtype=float
        )
    return MultipoleCoefficients(L=int(doc["L"]), coeffs=coeffs)
