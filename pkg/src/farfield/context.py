"""Analysis frequency, free-space constants, and enclosing-ball geometry."""

import math
from dataclasses import dataclass

# SI free-space constants, fixed in source for reproducibility.
MU_0 = 4.0e-7 * math.pi          # permeability [H/m]
EPS_0 = 8.8541878128e-12         # permittivity [F/m]


@dataclass(frozen=True)
class FrequencyContext:
    """Frequency plus every derived free-space constant used downstream.

    ``ka`` is stored rather than recomputed so that all derived bounds are
    bit-deterministic.
    """

    f: float        # analysis frequency [Hz]
    mu0: float      # [H/m]
    eps0: float     # [F/m]
    omega: float    # angular frequency [rad/s]
    k: float        # wavenumber [1/m]
    Z0: float       # wave impedance [Ohm]
    a: float        # enclosing-ball radius [m]
    ka: float       # electrical size (dimensionless)


def make_context(f: float, a: float) -> FrequencyContext:
    """Build a :class:`FrequencyContext` for frequency ``f`` and ball radius ``a``.

    Parameters
    ----------
    f : float
        Analysis frequency in Hz, must be positive.
    a : float
        Radius of the ball enclosing all sources, in m, must be >= 0.
    """
    if not (f > 0.0):
        raise ValueError(f"frequency must be positive, got {f}")
    if a < 0.0:
        raise ValueError(f"radius must be non-negative, got {a}")
    omega = 2.0 * math.pi * f
    k = omega * math.sqrt(MU_0 * EPS_0)
    z0 = math.sqrt(MU_0 / EPS_0)
    return FrequencyContext(
        f=f, mu0=MU_0, eps0=EPS_0, omega=omega, k=k, Z0=z0, a=a, ka=k * a
    )


def effective_bandwidth(ctx: FrequencyContext) -> int:
    """Smallest integer >= k*a; harmonic degrees beyond it contribute
    super-exponentially little to the radiated far field."""
    return int(math.ceil(ctx.ka))
