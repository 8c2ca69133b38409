"""Orthogonal decompositions of matrix-valued fields on the periodic box, with
strain-space identities, max-mid extremal problems and Navier-Stokes in
velocity and matrix-potential form."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DivergenceError,
    FieldFileError,
    KindMismatchError,
    MalformedHeaderError,
    PreconditionError,
    ResolutionError,
    StrainspaceError,
    TruncatedPayloadError,
    UnsupportedRotationError,
    UsageError,
)
from .spectral import (
    AntiSymMatrixField,
    Grid,
    ScalarField,
    SymMatrixField,
    VectorField,
    make_grid,
    random_field,
)
from .decomp import (
    DecompositionResult,
    decompose_antisym,
    decompose_general,
    decompose_sym,
    helmholtz_vector,
    project_divfree,
    project_hess,
    project_id_tilde,
    project_st,
    project_trdivfree,
)
from .fieldio import read_field, write_field

__all__ = [
    "AntiSymMatrixField",
    "ConfigurationError",
    "DecompositionResult",
    "DivergenceError",
    "FieldFileError",
    "Grid",
    "KindMismatchError",
    "MalformedHeaderError",
    "PreconditionError",
    "ResolutionError",
    "ScalarField",
    "StrainspaceError",
    "SymMatrixField",
    "TruncatedPayloadError",
    "UnsupportedRotationError",
    "UsageError",
    "VectorField",
    "__version__",
    "decompose_antisym",
    "decompose_general",
    "decompose_sym",
    "helmholtz_vector",
    "make_grid",
    "project_divfree",
    "project_hess",
    "project_id_tilde",
    "project_st",
    "project_trdivfree",
    "random_field",
    "read_field",
    "write_field",
]
