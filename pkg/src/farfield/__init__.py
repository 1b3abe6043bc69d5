"""Far-field radiation operator of bounded current distributions, its
finite-rank spherical-harmonic truncation, and the closed-form
truncation-error bound with its super-exponential decay past the effective
bandwidth."""

from .analysis import (
    ErrorBound,
    ErrorSweep,
    NormEstimate,
    OperatorMatrix,
    SweepRecord,
    assemble_direct_matrix,
    assemble_truncated_matrix,
    decay_rates,
    dense_svd_norm,
    error_bound,
    error_sweep,
    operator_norm,
    sweep_to_csv,
    sweep_to_dict,
)
from .context import (
    EPS_0,
    MU_0,
    FrequencyContext,
    effective_bandwidth,
    make_context,
)
from .discretization import (
    CurrentEnsemble,
    SampledField,
    SphereQuadrature,
    dipole_at_origin,
    empty_ensemble,
    ensemble_from_dict,
    ensemble_to_dict,
    field_norm,
    inner_product,
    load_ensemble,
    random_current_ensemble,
    save_ensemble,
    sphere_grid,
)
from .errors import (
    ContainmentError,
    GridExactnessError,
    GridMismatchError,
    ScenarioError,
)
from .expansion import (
    MultipoleCoefficients,
    coefficients_from_dict,
    coefficients_to_dict,
    jacobi_anger_kernel,
    multipole_coefficients,
    project_onto_VL,
    truncated_far_field,
)
from .radiation import (
    FarFieldSample,
    direct_far_field,
    em_far_field,
    field_from_csv,
    field_to_csv,
)
from .specfun import (
    Direction,
    TangentVector,
    assoc_legendre,
    bound_fn,
    scalar_sh,
    spherical_bessel_j,
    vsh_eval,
)

__version__ = "0.1.0"
