"""Exception types shared across the package."""


class ContainmentError(ValueError):
    """A current source lies outside the enclosing ball."""


class GridMismatchError(ValueError):
    """Two sampled fields do not share the same sphere quadrature."""


class GridExactnessError(ValueError):
    """Quadrature grid cannot integrate the requested harmonic degree exactly."""


class ScenarioError(ValueError):
    """A scenario document is malformed or inconsistent."""
