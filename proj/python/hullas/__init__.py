"""Active-subspace hull design: subspaces, response surfaces, FFD, hydrostatics."""

from hullas._core import (
    Error,
    NumericalError,
    PolySurface,
    ValidationError,
    bootstrap_eigenvalues,
    covariance,
    default_hull,
    deform_hull,
    eigendecompose,
    error_matrix,
    fit_surface,
    graded_exponents,
    hydrostatic_equilibrium,
    icosphere,
    local_linear_gradients,
    normalize,
    read_stl,
    run_study,
    signed_volume,
    steady_value,
    subspace_distance,
    suggest_dim,
    write_stl,
)

__all__ = [
    "Error",
    "NumericalError",
    "PolySurface",
    "ValidationError",
    "bootstrap_eigenvalues",
    "covariance",
    "default_hull",
    "deform_hull",
    "eigendecompose",
    "error_matrix",
    "fit_surface",
    "graded_exponents",
    "hydrostatic_equilibrium",
    "icosphere",
    "local_linear_gradients",
    "normalize",
    "read_stl",
    "run_study",
    "signed_volume",
    "steady_value",
    "subspace_distance",
    "suggest_dim",
    "write_stl",
]
