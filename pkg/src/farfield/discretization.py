"""Sphere quadrature grids, discrete inner products, and current ensembles.

The quadrature is a product rule: Gauss-Legendre nodes in cos(theta) crossed
with equally spaced azimuth nodes carrying trapezoid weights.  Products of
spherical harmonics up to the grid's exactness degree integrate exactly, which
is what makes the discrete projections and operator norms downstream trustworthy.

Current densities are represented as weighted complex point sources inside the
ball of radius ``a``; volume integrals against them become exact finite sums.
"""

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import ContainmentError, GridMismatchError
from .specfun import Direction

FOUR_PI = 4.0 * math.pi


@dataclass(eq=False)
class SphereQuadrature:
    """Quadrature nodes and positive weights on the unit sphere.

    Treat instances as immutable.  ``exactness_degree`` is the largest D such
    that products of spherical harmonics of total degree D are integrated
    exactly by the node/weight set.
    """

    theta: np.ndarray
    phi: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    n_theta: int | None = None
    n_phi: int | None = None

    def __len__(self) -> int:
        return self.theta.shape[0]

    @property
    def nodes(self) -> list[Direction]:
        return [Direction(float(t), float(p)) for t, p in zip(self.theta, self.phi)]

    @cached_property
    def unit_vectors(self) -> np.ndarray:
        """(N, 3) Cartesian radial unit vectors."""
        st, ct = np.sin(self.theta), np.cos(self.theta)
        sp, cp = np.sin(self.phi), np.cos(self.phi)
        return np.stack([st * cp, st * sp, ct], axis=1)

    @cached_property
    def theta_hat(self) -> np.ndarray:
        st, ct = np.sin(self.theta), np.cos(self.theta)
        sp, cp = np.sin(self.phi), np.cos(self.phi)
        return np.stack([ct * cp, ct * sp, -st], axis=1)

    @cached_property
    def phi_hat(self) -> np.ndarray:
        sp, cp = np.sin(self.phi), np.cos(self.phi)
        return np.stack([-sp, cp, np.zeros_like(sp)], axis=1)


def sphere_grid(l_max: int) -> SphereQuadrature:
    """Product quadrature exact for harmonic products of degree <= 2*l_max.

    Parameters
    ----------
    l_max : int
        Harmonic band the grid must resolve; uses l_max+1 Gauss-Legendre
        nodes in cos(theta) and 2*l_max+1 uniform azimuth nodes.
    """
    if l_max < 0:
        raise ValueError(f"l_max must be non-negative, got {l_max}")
    x, w = np.polynomial.legendre.leggauss(l_max + 1)
    order = np.argsort(-x)  # theta ascending
    x, w = x[order], w[order]
    theta_1d = np.arccos(np.clip(x, -1.0, 1.0))
    n_phi = 2 * l_max + 1
    phi_1d = 2.0 * np.pi * np.arange(n_phi) / n_phi
    theta = np.repeat(theta_1d, n_phi)
    phi = np.tile(phi_1d, l_max + 1)
    weights = np.repeat(w * (2.0 * np.pi / n_phi), n_phi)
    return SphereQuadrature(
        theta=theta,
        phi=phi,
        weights=weights,
        exactness_degree=2 * l_max,
        n_theta=l_max + 1,
        n_phi=n_phi,
    )


@dataclass(eq=False)
class SampledField:
    """Complex 3-vector field sampled at every node of a quadrature grid."""

    grid: SphereQuadrature
    values: np.ndarray  # (N, 3) complex, Cartesian components

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (len(self.grid), 3):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid with "
                f"{len(self.grid)} nodes"
            )


def _same_grid(g1: SphereQuadrature, g2: SphereQuadrature) -> bool:
    if g1 is g2:
        return True
    return (
        len(g1) == len(g2)
        and np.array_equal(g1.theta, g2.theta)
        and np.array_equal(g1.phi, g2.phi)
        and np.array_equal(g1.weights, g2.weights)
    )


def inner_product(u: SampledField, v: SampledField) -> complex:
    """Discrete L2 inner product over the sphere, linear in ``u``."""
    if not _same_grid(u.grid, v.grid):
        raise GridMismatchError("fields are sampled on different grids")
    return complex(np.sum(u.grid.weights * np.sum(u.values * np.conj(v.values), axis=1)))


def field_norm(u: SampledField) -> float:
    """Discrete L2 norm of a sampled field."""
    return math.sqrt(max(inner_product(u, u).real, 0.0))


@dataclass(eq=False)
class CurrentEnsemble:
    """Weighted complex point sources inside the ball of radius ``radius``."""

    positions: np.ndarray  # (n, 3) float [m]
    moments: np.ndarray    # (n, 3) complex [A*m]
    weights: np.ndarray    # (n,) positive float [m^3]
    radius: float

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        self.moments = np.asarray(self.moments, dtype=complex).reshape(-1, 3)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        n = self.positions.shape[0]
        if self.moments.shape[0] != n or self.weights.shape[0] != n:
            raise ValueError("positions, moments, and weights must have equal length")
        if n and np.any(self.weights <= 0.0):
            raise ValueError("all source weights must be positive")
        if self.radius < 0.0:
            raise ValueError(f"radius must be non-negative, got {self.radius}")
        r = np.linalg.norm(self.positions, axis=1) if n else np.zeros(0)
        if n and np.any(r > self.radius * (1.0 + 1e-12) + 1e-300):
            raise ContainmentError(
                f"source at distance {r.max()} lies outside the ball of radius {self.radius}"
            )

    def __len__(self) -> int:
        return self.positions.shape[0]

    def norm(self) -> float:
        """Discrete L2(V) norm of the current density."""
        return math.sqrt(
            float(np.sum(self.weights * np.sum(np.abs(self.moments) ** 2, axis=1)))
        )


def random_current_ensemble(a: float, n: int, seed: int) -> CurrentEnsemble:
    """Draw ``n`` sources uniformly in the ball of radius ``a``.

    Moments are unit-magnitude random complex 3-vectors; weights split the
    ball volume evenly.  Deterministic for a given seed.
    """
    if not (a > 0.0):
        raise ValueError(f"radius must be positive, got {a}")
    if n < 1:
        raise ValueError(f"need at least one source, got {n}")
    rng = np.random.default_rng(seed)
    u = rng.random(n)
    directions = rng.normal(size=(n, 3))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    positions = directions * (a * u ** (1.0 / 3.0))[:, None]
    moments = rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))
    moments /= np.linalg.norm(moments, axis=1)[:, None]
    weights = np.full(n, FOUR_PI / 3.0 * a**3 / n)
    return CurrentEnsemble(positions=positions, moments=moments, weights=weights, radius=a)


def dipole_at_origin(moment) -> CurrentEnsemble:
    """A single unit-weight source at the origin."""
    m = np.asarray(moment, dtype=complex).reshape(3)
    return CurrentEnsemble(
        positions=np.zeros((1, 3)),
        moments=m[None, :],
        weights=np.ones(1),
        radius=0.0,
    )


def empty_ensemble(radius: float = 0.0) -> CurrentEnsemble:
    """Ensemble with no sources (the zero current density)."""
    return CurrentEnsemble(
        positions=np.zeros((0, 3)),
        moments=np.zeros((0, 3), dtype=complex),
        weights=np.zeros(0),
        radius=radius,
    )


def ensemble_to_dict(ens: CurrentEnsemble) -> dict:
    """JSON-ready document for a current ensemble."""
    return {
        "radius": float(ens.radius),
        "sources": [
            {
                "pos": [float(v) for v in ens.positions[i]],
                "moment_re": [float(v) for v in ens.moments[i].real],
                "moment_im": [float(v) for v in ens.moments[i].imag],
                "weight": float(ens.weights[i]),
            }
            for i in range(len(ens))
        ],
    }


def ensemble_from_dict(doc: dict) -> CurrentEnsemble:
    sources = doc["sources"]
    n = len(sources)
    positions = np.zeros((n, 3))
    moments = np.zeros((n, 3), dtype=complex)
    weights = np.zeros(n)
    for i, s in enumerate(sources):
        positions[i] = s["pos"]
        moments[i] = np.asarray(s["moment_re"], dtype=float) + 1j * np.asarray(
            s["moment_im"], dtype=float
        )
        weights[i] = s["weight"]
    return CurrentEnsemble(
        positions=positions, moments=moments, weights=weights, radius=float(doc["radius"])
    )


def save_ensemble(ens: CurrentEnsemble, path) -> None:
    with open(path, "w") as fh:
        json.dump(ensemble_to_dict(ens), fh, indent=1)
        fh.write("\n")


def load_ensemble(path) -> CurrentEnsemble:
    with open(path) as fh:
        return ensemble_from_dict(json.load(fh))
