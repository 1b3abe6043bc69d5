"""Special functions on the sphere.

Associated Legendre functions, scalar and vector spherical harmonics,
spherical Bessel functions of the first kind, and the error-bound majorant.
Scalar entry points operate on single :class:`Direction` values; the
``*_table`` functions are vectorized over arrays of angles and feed the
quadrature, expansion, and operator-assembly code.

Phase convention: the Condon-Shortley factor (-1)^m lives inside the
associated Legendre function, so that Y_l^{-m} = (-1)^m conj(Y_l^m).
"""

import math
from dataclasses import dataclass

import numpy as np

FOUR_PI = 4.0 * math.pi

# Below this argument the spherical Bessel downward recurrence gives way to
# the small-argument series (avoids 0/0 in the normalization).
_BESSEL_SERIES_CUTOFF = 1.0e-3


@dataclass(frozen=True)
class Direction:
    """A point on the unit sphere: polar angle theta, azimuth phi."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not (0.0 <= self.phi < 2.0 * math.pi):
            raise ValueError(f"phi must lie in [0, 2*pi), got {self.phi}")

    def unit_vector(self) -> np.ndarray:
        """Cartesian radial unit vector r_hat."""
        st, ct = math.sin(self.theta), math.cos(self.theta)
        sp, cp = math.sin(self.phi), math.cos(self.phi)
        return np.array([st * cp, st * sp, ct])

    def frame(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Local orthonormal frame (r_hat, theta_hat, phi_hat)."""
        st, ct = math.sin(self.theta), math.cos(self.theta)
        sp, cp = math.sin(self.phi), math.cos(self.phi)
        rhat = np.array([st * cp, st * sp, ct])
        that = np.array([ct * cp, ct * sp, -st])
        phat = np.array([-sp, cp, 0.0])
        return rhat, that, phat


@dataclass(frozen=True)
class TangentVector:
    """Complex vector tangent to the sphere at ``direction``.

    Components are taken along theta_hat and phi_hat, so the Cartesian
    embedding is radial-free by construction.
    """

    v_theta: complex
    v_phi: complex
    direction: Direction

    def to_cartesian(self) -> np.ndarray:
        _, that, phat = self.direction.frame()
        return self.v_theta * that + self.v_phi * phat

    def norm(self) -> float:
        return math.hypot(abs(self.v_theta), abs(self.v_phi))


def assoc_legendre(l: int, m: int, x: float) -> float:
    """Associated Legendre function P_l^m(x), Condon-Shortley phase included.

    Parameters
    ----------
    l, m : int
        Degree l >= 0 and order with |m| <= l.
    x : float
        Argument in [-1, 1].

    Negative orders follow the standard reflection
    P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m.
    """
    if l < 0:
        raise ValueError(f"degree must be non-negative, got l={l}")
    if abs(m) > l:
        raise ValueError(f"|m| must not exceed l, got l={l}, m={m}")
    if not (-1.0 <= x <= 1.0):
        raise ValueError(f"argument must lie in [-1, 1], got {x}")
    ma = abs(m)
    # P_m^m = (-1)^m (2m-1)!! (1-x^2)^{m/2}, then two-term upward recurrence in l.
    pmm = 1.0
    if ma > 0:
        s = math.sqrt((1.0 - x) * (1.0 + x))
        fact = 1.0
        for _ in range(ma):
            pmm *= -fact * s
            fact += 2.0
    if l == ma:
        p = pmm
    else:
        pmmp1 = x * (2.0 * ma + 1.0) * pmm
        if l == ma + 1:
            p = pmmp1
        else:
            for ll in range(ma + 2, l + 1):
                p_next = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + ma - 1.0) * pmm) / (ll - ma)
                pmm, pmmp1 = pmmp1, p_next
            p = pmmp1
    if m < 0:
        p *= (-1.0 if ma % 2 else 1.0) * math.factorial(l - ma) / math.factorial(l + ma)
    return p


def norm_legendre_table(lmax: int, cos_theta: np.ndarray, sin_theta: np.ndarray) -> np.ndarray:
    """Fully normalized associated Legendre table for m >= 0.

    Returns ``p`` with ``p[l, m, n]`` equal to
    sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) P_l^m(cos theta_n), evaluated with a
    stable three-term recurrence on the normalized functions (no factorial
    overflow at high degree).
    """
    ct = np.atleast_1d(np.asarray(cos_theta, dtype=float))
    st = np.atleast_1d(np.asarray(sin_theta, dtype=float))
    p = np.zeros((lmax + 1, lmax + 1, ct.shape[0]))
    p[0, 0] = 1.0 / math.sqrt(FOUR_PI)
    for m in range(1, lmax + 1):
        p[m, m] = -math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * st * p[m - 1, m - 1]
    for m in range(0, lmax):
        p[m + 1, m] = math.sqrt(2.0 * m + 3.0) * ct * p[m, m]
    for m in range(0, lmax + 1):
        for l in range(m + 2, lmax + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            p[l, m] = a * (ct * p[l - 1, m] - b * p[l - 2, m])
    return p


def sh_index(l: int, m: int) -> int:
    """Packed index of (l, m) in a degree-major spherical-harmonic table."""
    return l * l + l + m


def _pbar(p: np.ndarray, l: int, m: int):
    """Normalized Legendre value with reflection for m < 0; 0 outside |m| <= l."""
    if abs(m) > l or l < 0:
        return 0.0
    if m >= 0:
        return p[l, m]
    return (-1.0 if (-m) % 2 else 1.0) * p[l, -m]


def sh_table(lmax: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Scalar spherical harmonics Y_l^m at the given angles.

    Returns a complex array of shape ``((lmax+1)**2, N)`` whose rows are
    packed by :func:`sh_index` for all 0 <= |m| <= l <= lmax.
    """
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    ph = np.atleast_1d(np.asarray(phi, dtype=float))
    p = norm_legendre_table(lmax, np.cos(th), np.sin(th))
    out = np.zeros(((lmax + 1) ** 2, th.shape[0]), dtype=complex)
    for l in range(lmax + 1):
        out[sh_index(l, 0)] = p[l, 0]
        for m in range(1, l + 1):
            e = np.exp(1j * m * ph)
            out[sh_index(l, m)] = p[l, m] * e
            out[sh_index(l, -m)] = (-1.0 if m % 2 else 1.0) * p[l, m] * np.conj(e)
    return out


def vsh_tangent_table(lmax: int, theta: np.ndarray, phi: np.ndarray):
    """Tangential vector spherical harmonics at the given angles.

    Returns ``(psi_theta, psi_phi)``, the components of Psi_l^m = r grad Y_l^m
    along theta_hat and phi_hat, packed like :func:`sh_table`.  The rotated
    harmonic Phi_l^m = r_hat x Psi_l^m has components (-psi_phi, psi_theta).
    Both vanish identically for l = 0.

    The theta-derivative and m/sin(theta) factors are evaluated through
    order-ladder identities that stay finite at the poles.
    """
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    ph = np.atleast_1d(np.asarray(phi, dtype=float))
    p = norm_legendre_table(lmax, np.cos(th), np.sin(th))
    n = th.shape[0]
    psi_t = np.zeros(((lmax + 1) ** 2, n), dtype=complex)
    psi_p = np.zeros(((lmax + 1) ** 2, n), dtype=complex)
    for l in range(1, lmax + 1):
        rat = math.sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0))
        for m in range(-l, l + 1):
            # d Pbar_l^m / d theta
            dth = 0.5 * (
                math.sqrt((l - m) * (l + m + 1.0)) * _pbar(p, l, m + 1)
                - math.sqrt((l + m) * (l - m + 1.0)) * _pbar(p, l, m - 1)
            )
            # m Pbar_l^m / sin theta
            mps = -0.5 * rat * (
                math.sqrt((l - m) * (l - m - 1.0)) * _pbar(p, l - 1, m + 1)
                + math.sqrt((l + m) * (l + m - 1.0)) * _pbar(p, l - 1, m - 1)
            )
            e = np.exp(1j * m * ph)
            idx = sh_index(l, m)
            psi_t[idx] = dth * e
            psi_p[idx] = 1j * mps * e
    return psi_t, psi_p


def scalar_sh(l: int, m: int, direction: Direction) -> complex:
    """Orthonormal scalar spherical harmonic Y_l^m(theta, phi)."""
    if l < 0 or abs(m) > l:
        raise ValueError(f"need 0 <= |m| <= l, got l={l}, m={m}")
    row = sh_table(l, np.array([direction.theta]), np.array([direction.phi]))
    return complex(row[sh_index(l, m), 0])


def vsh_eval(l: int, m: int, direction: Direction):
    """Vector spherical harmonics of degree l and order m at one direction.

    Returns ``(y_vec, psi, phi)`` where ``y_vec`` is the radial harmonic
    Y_l^m r_hat as a Cartesian 3-vector and ``psi``/``phi`` are the two
    tangential harmonics as :class:`TangentVector` values.
    """
    if l < 0 or abs(m) > l:
        raise ValueError(f"need 0 <= |m| <= l, got l={l}, m={m}")
    th = np.array([direction.theta])
    phv = np.array([direction.phi])
    y = sh_table(l, th, phv)[sh_index(l, m), 0]
    psi_t, psi_p = vsh_tangent_table(l, th, phv)
    vt = complex(psi_t[sh_index(l, m), 0])
    vp = complex(psi_p[sh_index(l, m), 0])
    y_vec = complex(y) * direction.unit_vector().astype(complex)
    psi = TangentVector(vt, vp, direction)
    phi = TangentVector(-vp, vt, direction)
    return y_vec, psi, phi


def spherical_bessel_j(l_max: int, x: float) -> np.ndarray:
    """Spherical Bessel functions of the first kind j_0(x) .. j_{l_max}(x).

    Parameters
    ----------
    l_max : int
        Highest degree, >= 0.
    x : float
        Argument, >= 0.

    Uses Miller's downward recurrence normalized against the closed forms at
    degree 0 or 1 (whichever is larger in magnitude, which sidesteps the
    zeros of sin(x)/x).  Arguments below 1e-3 use the ascending series.
    """
    if l_max < 0:
        raise ValueError(f"l_max must be non-negative, got {l_max}")
    if x < 0.0:
        raise ValueError(f"argument must be non-negative, got {x}")
    out = np.zeros(l_max + 1)
    if x < _BESSEL_SERIES_CUTOFF:
        # j_l(x) = x^l/(2l+1)!! [1 - (x^2/2)/(2l+3) + (x^2/2)^2/(2 (2l+3)(2l+5)) - ...]
        half_x2 = 0.5 * x * x
        term = 1.0  # x^l / (2l+1)!!
        for l in range(l_max + 1):
            out[l] = term * (
                1.0
                - half_x2 / (2.0 * l + 3.0)
                + half_x2 * half_x2 / (2.0 * (2.0 * l + 3.0) * (2.0 * l + 5.0))
            )
            term *= x / (2.0 * l + 3.0)
            if term == 0.0:
                break
        return out
    l_start = max(l_max, math.ceil(x)) + 6 * math.ceil(x ** (1.0 / 3.0)) + 60
    raw = np.zeros(l_start + 2)
    raw[l_start] = 1.0e-30
    for l in range(l_start, 0, -1):
        raw[l - 1] = (2.0 * l + 1.0) / x * raw[l] - raw[l + 1]
        if abs(raw[l - 1]) > 1.0e250:
            raw[l - 1:] *= 1.0e-250
    j0 = math.sin(x) / x
    j1 = math.sin(x) / (x * x) - math.cos(x) / x
    if abs(raw[0]) >= abs(raw[1]):
        scale = j0 / raw[0]
    else:
        scale = j1 / raw[1]
    out[:] = raw[: l_max + 1] * scale
    # Closed forms beat the recurrence near their zeros; below x ~ 1 the
    # naive j_1 expression cancels catastrophically, so keep the recurrence.
    out[0] = j0
    if l_max >= 1 and x >= 1.0:
        out[1] = j1
    return out


def bound_fn(x: float) -> float:
    """Majorant f(x) = x exp(sqrt(1-x^2)) / (1 + sqrt(1-x^2)) on [0, 1].

    Satisfies 0 <= f <= 1 and is strictly increasing; it controls the
    per-degree decay factor of the truncation-error bound.
    """
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"argument must lie in [0, 1], got {x}")
    s = math.sqrt((1.0 - x) * (1.0 + x))
    return x * math.exp(s) / (1.0 + s)
