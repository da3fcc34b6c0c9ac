"""Exact computations with noncommutative polynomials evaluated on matrices."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DimensionMismatchError,
    FieldMismatchError,
    InvalidInputError,
    NcImageError,
    NotLinearError,
    ParseError,
    PreconditionError,
    SynthesisFailure,
    TheoryViolation,
    UnsupportedDimension,
    WitnessNotFound,
)
from .exactmat import Matrix, char_poly, is_similar, rank_sequence, shoda_zero_diagonal, wj_matrix  # noqa: F401
from .freealg import (  # noqa: F401
    LieWord,
    NcPoly,
    capelli_poly,
    commutator,
    lie_expand,
    multilinearize,
    razmyslov_transform,
    standard_poly,
    substitute,
)
from .evaluator import evaluate, trace_tuple  # noqa: F401
