"""regpart: exact and arbitrary-precision (r,s)-regular partition counts.

p_{r,s}(n) counts the partitions of n into parts divisible by neither r nor
s.  The package computes it two independent ways: an exact q-series /
dynamic-programming oracle, and a convergent Bessel-function series whose
phases are assembled in exact rational arithmetic, cross-validating the two.
The classical Rademacher series for unrestricted p(n) is included as a
baseline.
"""

from .floats import BigComplex, BigFloat, workprec
from .hrr import (
    EvaluationError,
    HrrParams,
    SeriesReport,
    TruncationPolicy,
    a_km,
    bessel_i1,
    choose_precision,
    delta_k,
    evaluate,
    term_k,
)
from .numtheory import (
    ExactRational,
    Phase,
    dedekind_sum,
    dedekind_sum_definition,
    eta_transform_check,
    is_squarefree,
    jacobi,
    mod_inverse_neg,
    omega,
    omega_ratio,
    omega_ratio_closed,
)
from .qseries import (
    IntSeries,
    cmk_coeffs,
    default_cmk_order,
    euler_product,
    generating_coeffs,
    oracle_prs,
    series_div,
    series_mul,
)
from .rademacher import (
    RademacherParams,
    a_k,
    bessel_i32,
    bessel_i32_series,
    evaluate_p,
    partition_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "BigComplex",
    "BigFloat",
    "EvaluationError",
    "ExactRational",
    "HrrParams",
    "IntSeries",
    "Phase",
    "RademacherParams",
    "SeriesReport",
    "TruncationPolicy",
    "a_k",
    "a_km",
    "bessel_i1",
    "bessel_i32",
    "bessel_i32_series",
    "choose_precision",
    "cmk_coeffs",
    "dedekind_sum",
    "dedekind_sum_definition",
    "default_cmk_order",
    "delta_k",
    "eta_transform_check",
    "euler_product",
    "evaluate",
    "evaluate_p",
    "generating_coeffs",
    "is_squarefree",
    "jacobi",
    "mod_inverse_neg",
    "omega",
    "omega_ratio",
    "omega_ratio_closed",
    "oracle_prs",
    "partition_oracle",
    "series_div",
    "series_mul",
    "term_k",
    "workprec",
    "__version__",
]
