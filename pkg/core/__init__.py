"""Schatten-class linear algebra, exponents and error types."""
from core.errors import (
    BudgetExhaustedError,
    CapacityError,
    DegenerateEstimateError,
    DegeneratePackingError,
    DivergedError,
    EmptySupportError,
    InvalidInputError,
    LabError,
    NumericFailureError,
)
from core.exponents import INF, Exponent, exponent, rate_gap
from core.schatten import (
    BallSpec,
    RateQuery,
    SvdFactors,
    as_matrix,
    embedding_norm,
    factorization_upper,
    in_ball,
    lq_norm,
    numerical_rank,
    operator_norm,
    schatten_norm,
    schatten_norms,
    singular_values,
    svd,
    theory_rate,
    truncate_rank,
)
