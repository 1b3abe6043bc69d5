"""Operator-level error analysis.

Discretized far-field operator matrices, largest-singular-value estimation,
the closed-form truncation-error bound alpha * exp(-beta(L) L), and the
error-versus-degree sweep that exhibits the super-exponential step transition
past the effective bandwidth.

The matrices act on weighted moment vectors and produce weighted tangential
samples, so Euclidean norms coincide with the discrete L2 norms of current
and field.  A largest singular value measured this way lower-bounds the true
operator norm over square-integrable currents, which keeps every bound check
sound (the check is conservative, not tight).
"""

import math
import time
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .context import FrequencyContext, effective_bandwidth
from .discretization import CurrentEnsemble, SampledField, SphereQuadrature, sphere_grid
from .expansion import _bessel_table, source_spherical, synthesis_scale
from .radiation import _check_contained, radiation_scale
from .specfun import bound_fn, sh_table, vsh_tangent_table


@dataclass(frozen=True)
class ErrorBound:
    """Closed-form bound alpha * f(ka/(L+1/2))^L, valid for L >= l_b."""

    alpha: float
    ka: float
    l_b: int

    def beta(self, L: int) -> float:
        """Per-degree decay exponent -ln f(ka/(L+1/2)); increases without
        bound as L grows."""
        self._check_domain(L)
        return -math.log(bound_fn(self.ka / (L + 0.5)))

    def evaluate(self, L: int) -> float:
        """Bound value alpha * exp(-beta(L) L)."""
        self._check_domain(L)
        return self.alpha * bound_fn(self.ka / (L + 0.5)) ** L

    def _check_domain(self, L: int) -> None:
        if L < self.l_b:
            raise ValueError(
                f"bound is only valid for L >= {self.l_b} (effective bandwidth), got L={L}"
            )


def error_bound(ctx: FrequencyContext) -> ErrorBound:
    """Truncation-error bound for the radiation operator of a ball of radius a.

    alpha = omega*mu0*sqrt(pi)*a / (2*sqrt(k*Z0)).
    """
    if not (ctx.a > 0.0):
        raise ValueError("error bound requires a positive enclosing radius")
    alpha = ctx.omega * ctx.mu0 * math.sqrt(math.pi) * ctx.a / (2.0 * math.sqrt(ctx.k * ctx.Z0))
    return ErrorBound(alpha=alpha, ka=ctx.ka, l_b=effective_bandwidth(ctx))


# --- discretized operators -------------------------------------------------


@dataclass(eq=False)
class OperatorMatrix:
    """Norm-isometric matrix form of a far-field map.

    Rows run over (node, tangent component) pairs scaled by sqrt(quadrature
    weight); columns over (source, Cartesian axis) pairs scaled by
    sqrt(source weight).
    """

    matrix: np.ndarray  # (2*N, 3*S) complex
    grid: SphereQuadrature
    ensemble: CurrentEnsemble

    @property
    def shape(self):
        return self.matrix.shape

    def apply_moments(self, moments) -> SampledField:
        """Field samples produced by replacing the ensemble's moments."""
        p = np.asarray(moments, dtype=complex).reshape(len(self.ensemble), 3)
        q = (np.sqrt(self.ensemble.weights)[:, None] * p).reshape(-1)
        out = (self.matrix @ q).reshape(len(self.grid), 2)
        out /= np.sqrt(self.grid.weights)[:, None]
        values = out[:, 0:1] * self.grid.theta_hat + out[:, 1:2] * self.grid.phi_hat
        return SampledField(grid=self.grid, values=values)


def _expand_kernel(G: np.ndarray, grid: SphereQuadrature, ens: CurrentEnsemble) -> np.ndarray:
    """Lift a scalar node-by-source kernel to the weighted (2N, 3S) matrix."""
    sqrt_wn = np.sqrt(grid.weights)
    sqrt_ws = np.sqrt(ens.weights)
    frame = np.stack([grid.theta_hat, grid.phi_hat], axis=1)  # (N, 2, 3)
    mat = np.einsum("n,nte,ni,i->ntie", sqrt_wn, frame, G, sqrt_ws)
    return mat.reshape(2 * len(grid), 3 * len(ens))


def assemble_direct_matrix(
    ens: CurrentEnsemble, grid: SphereQuadrature, ctx: FrequencyContext
) -> OperatorMatrix:
    """Matrix of the reference radiation operator on the discrete source space."""
    _check_contained(ens, ctx)
    if len(ens) == 0:
        return OperatorMatrix(
            matrix=np.zeros((2 * len(grid), 0), dtype=complex), grid=grid, ensemble=ens
        )
    phases = np.exp(1j * ctx.k * (grid.unit_vectors @ ens.positions.T))
    return OperatorMatrix(
        matrix=_expand_kernel(radiation_scale(ctx) * phases, grid, ens),
        grid=grid,
        ensemble=ens,
    )


class _SweepTables:
    """Spherical-harmonic and Bessel tables shared across truncation degrees."""

    def __init__(self, ens, grid, ctx, l_top: int):
        self.l_top = l_top
        self.y_nodes = sh_table(l_top, grid.theta, grid.phi)
        r, th, ph = source_spherical(ens)
        self.y_src = sh_table(l_top, th, ph) if len(ens) else None
        self.bes = _bessel_table(l_top, ctx.k, r)

    def kernel_block(self, l: int) -> np.ndarray:
        """Degree-l slice of the truncated kernel, node-by-source."""
        sl = slice(l * l, (l + 1) * (l + 1))
        weighted = (1j**l) * self.bes[l][None, :] * np.conj(self.y_src[sl])
        return self.y_nodes[sl].T @ weighted


def assemble_truncated_matrix(
    ens: CurrentEnsemble, grid: SphereQuadrature, ctx: FrequencyContext, L: int
) -> OperatorMatrix:
    """Matrix of the degree-L truncated operator (coefficients then synthesis)."""
    if L < 0:
        raise ValueError(f"truncation degree must be non-negative, got {L}")
    _check_contained(ens, ctx)
    if len(ens) == 0:
        return OperatorMatrix(
            matrix=np.zeros((2 * len(grid), 0), dtype=complex), grid=grid, ensemble=ens
        )
    if L == 0:
        return OperatorMatrix(
            matrix=np.zeros((2 * len(grid), 3 * len(ens)), dtype=complex),
            grid=grid,
            ensemble=ens,
        )
    tables = _SweepTables(ens, grid, ctx, L - 1)
    G = np.zeros((len(grid), len(ens)), dtype=complex)
    for l in range(L):
        G += tables.kernel_block(l)
    return OperatorMatrix(
        matrix=_expand_kernel(synthesis_scale(ctx) * G, grid, ens), grid=grid, ensemble=ens
    )


# --- largest singular value ------------------------------------------------


@dataclass(frozen=True)
class NormEstimate:
    value: float
    converged: bool
    iterations: int


def _as_matrix(a) -> np.ndarray:
    return a.matrix if isinstance(a, OperatorMatrix) else np.asarray(a)


def operator_norm(a, seed: int = 0, tol: float = 1e-8, max_iter: int = 1000) -> NormEstimate:
    """Largest singular value by power iteration on the Gram matrix.

    Starts from a seeded random complex vector and stops once the Rayleigh
    quotient changes by less than ``tol`` (relative) between iterations.
    Hitting ``max_iter`` returns the best estimate flagged as not converged.
    """
    mat = _as_matrix(a)
    m, n = mat.shape
    if m == 0 or n == 0 or not np.any(mat):
        return NormEstimate(value=0.0, converged=True, iterations=0)
    gram = mat.conj().T @ mat if n <= m else mat @ mat.conj().T
    rng = np.random.default_rng(seed)
    v = rng.normal(size=gram.shape[0]) + 1j * rng.normal(size=gram.shape[0])
    v /= np.linalg.norm(v)
    rayleigh_prev = None
    for it in range(1, max_iter + 1):
        w = gram @ v
        rayleigh = float(np.real(np.vdot(v, w)))
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return NormEstimate(value=0.0, converged=True, iterations=it)
        v = w / norm_w
        if rayleigh_prev is not None and abs(rayleigh - rayleigh_prev) <= tol * abs(rayleigh):
            return NormEstimate(value=math.sqrt(max(rayleigh, 0.0)), converged=True, iterations=it)
        rayleigh_prev = rayleigh
    return NormEstimate(value=math.sqrt(max(rayleigh_prev, 0.0)), converged=False, iterations=max_iter)


def dense_svd_norm(a) -> float:
    """Largest singular value via full SVD; verification path for small matrices."""
    mat = _as_matrix(a)
    if mat.size == 0:
        return 0.0
    return float(np.linalg.svd(mat, compute_uv=False)[0])


# --- error sweep -----------------------------------------------------------


@dataclass(frozen=True)
class SweepRecord:
    """Per-degree entry of an error sweep.

    ``empirical_error`` is sigma_max(A - A_L) for the degree-L truncated
    operator; ``projection_error`` applies the degree-L harmonic projection to
    the reference operator's output instead.  ``bound``/``beta`` are present
    only where the bound is valid (L >= effective bandwidth).
    """

    L: int
    empirical_error: float
    projection_error: float
    bound: float | None
    beta: float | None
    wall_time_s: float
    converged: bool


@dataclass(eq=False)
class ErrorSweep:
    records: list
    l_b: int
    bound: ErrorBound


def _projection_blocks(grid: SphereQuadrature, l_top: int):
    """Per-degree orthonormal tangential column blocks in weighted row space."""
    psi_t, psi_p = vsh_tangent_table(l_top, grid.theta, grid.phi)
    sqrt_w = np.sqrt(grid.weights)
    blocks = []
    n = len(grid)
    for l in range(l_top + 1):
        if l == 0:
            blocks.append(np.zeros((2 * n, 0), dtype=complex))
            continue
        sl = slice(l * l, (l + 1) * (l + 1))
        cnt = 2 * l + 1
        scale = 1.0 / math.sqrt(l * (l + 1.0))
        pt = (sqrt_w[:, None] * psi_t[sl].T) * scale
        pp = (sqrt_w[:, None] * psi_p[sl].T) * scale
        u = np.zeros((2 * n, 2 * cnt), dtype=complex)
        u[0::2, :cnt] = pt
        u[1::2, :cnt] = pp
        u[0::2, cnt:] = -pp
        u[1::2, cnt:] = pt
        blocks.append(u)
    return blocks


def error_sweep(
    ctx: FrequencyContext,
    ensemble: CurrentEnsemble,
    l_min: int,
    l_max: int,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 3000,
    threads: int = 1,
) -> ErrorSweep:
    """Empirical truncation errors and the theoretical bound over a degree range.

    For each L in [l_min, l_max] the sweep records sigma_max(A - A_L) for the
    truncated operator, the corresponding projection error, and the bound where
    valid.  The grid carries two degrees of headroom beyond ``l_max``.  The
    per-degree entries are independent and may run on ``threads`` workers; the
    result is identical for any thread count.
    """
    if l_min > l_max or l_min < 0:
        raise ValueError(f"need 0 <= l_min <= l_max, got [{l_min}, {l_max}]")
    grid = sphere_grid(l_max + 2)
    bound = error_bound(ctx)
    l_b = bound.l_b
    direct = assemble_direct_matrix(ensemble, grid, ctx)
    a_mat = direct.matrix
    tables = _SweepTables(ensemble, grid, ctx, max(l_max - 1, 0)) if len(ensemble) else None
    u_blocks = _projection_blocks(grid, l_max)
    coef_blocks = [u.conj().T @ a_mat for u in u_blocks]
    k_scale = synthesis_scale(ctx)

    def one_degree(L: int) -> SweepRecord:
        t0 = time.perf_counter()
        if tables is not None and L > 0:
            g = np.zeros((len(grid), len(ensemble)), dtype=complex)
            for l in range(L):
                g += tables.kernel_block(l)
            a_trunc = _expand_kernel(k_scale * g, grid, ensemble)
        else:
            a_trunc = np.zeros_like(a_mat)
        proj = np.zeros_like(a_mat)
        for l in range(1, L + 1):
            proj += u_blocks[l] @ coef_blocks[l]
        est_k = operator_norm(a_mat - a_trunc, seed=seed + L, tol=tol, max_iter=max_iter)
        est_p = operator_norm(a_mat - proj, seed=seed + L, tol=tol, max_iter=max_iter)
        b = bound.evaluate(L) if L >= l_b else None
        beta = bound.beta(L) if L >= l_b else None
        return SweepRecord(
            L=L,
            empirical_error=est_k.value,
            projection_error=est_p.value,
            bound=b,
            beta=beta,
            wall_time_s=time.perf_counter() - t0,
            converged=est_k.converged and est_p.converged,
        )

    degrees = list(range(l_min, l_max + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(one_degree, degrees))
    else:
        records = [one_degree(L) for L in degrees]
    return ErrorSweep(records=records, l_b=l_b, bound=bound)


def decay_rates(sweep: ErrorSweep, noise_floor_rel: float = 1e-13):
    """Per-step decay rates -ln(err(L+1)/err(L)) of the truncation curve.

    Records whose error falls below ``noise_floor_rel`` times the first
    record's error are excluded before forming ratios.
    """
    recs = sweep.records
    if not recs:
        return []
    floor = noise_floor_rel * recs[0].empirical_error
    kept = [r for r in recs if r.empirical_error >= floor]
    rates = []
    for r0, r1 in zip(kept, kept[1:]):
        if r1.L == r0.L + 1 and r0.empirical_error > 0.0:
            rates.append((r0.L, -math.log(r1.empirical_error / r0.empirical_error)))
    return rates


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def sweep_to_csv(sweep: ErrorSweep) -> str:
    """CSV form of a sweep; bound and beta cells are empty below the
    effective bandwidth.  Wall-time cells are left empty so that repeated
    runs of the same scenario produce byte-identical output."""
    lines = ["L,empirical_error,bound,beta,wall_time_s"]
    for r in sweep.records:
        bound = _fmt(r.bound) if r.bound is not None else ""
        beta = _fmt(r.beta) if r.beta is not None else ""
        lines.append(f"{r.L},{_fmt(r.empirical_error)},{bound},{beta},")
    return "\n".join(lines) + "\n"


def sweep_to_dict(sweep: ErrorSweep) -> dict:
    """JSON-ready mirror of the sweep records (timings omitted for
    determinism)."""
    return {
        "l_b": sweep.l_b,
        "alpha": sweep.bound.alpha,
        "records": [
            {
                "L": r.L,
                "empirical_error": r.empirical_error,
                "projection_error": r.projection_error,
                "bound": r.bound,
                "beta": r.beta,
                "converged": r.converged,
            }
            for r in sweep.records
        ],
    }
