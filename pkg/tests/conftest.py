import math

import numpy as np
import pytest

from farfield import EPS_0, MU_0, make_context

LIGHT_SPEED = 1.0 / math.sqrt(MU_0 * EPS_0)


def context_for_ka(ka: float, a: float = 1.0):
    """Context whose electrical size lands a hair below ``ka``.

    The tiny downward nudge keeps ceil(k*a) stable when ``ka`` is an integer.
    """
    f = ka * LIGHT_SPEED / (2.0 * math.pi * a) * (1.0 - 1e-13)
    return make_context(f, a)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random proper rotation from a QR factorization."""
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
