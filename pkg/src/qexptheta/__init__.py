"""Verification-grade q-series: q-shifted factorials, theta functions and
the theta main term of the scaled q-exponential ``(-q^(-n t + 1/2) u; q)_inf``.
"""

from .dioph import (
    CFExpansion,
    DiophantineHit,
    IrrationalScale,
    RationalScale,
    best_hits,
    cf_expansion,
    chebyshev_hits,
    fractional_parts,
    parse_scale,
    rational_hits,
)
from .errors import (
    DomainError,
    InsufficientDataError,
    PrecisionError,
    PrecisionInsufficientError,
    QThetaError,
    SingularityError,
)
from .laplace import (
    M0,
    DecompositionReport,
    IrrationalReport,
    RateEstimate,
    RationalReport,
    Scenario,
    irrational_residual,
    irrational_table,
    laplace_decomposition,
    lhs_product,
    lhs_series,
    nu_n,
    rate_constant_estimate,
    rational_bound,
    rational_main_term,
    rational_residual,
    rational_table,
    residual_from_lhs,
)
from .qseries import (
    LimitProbe,
    QBase,
    euler_qexp_series,
    pochhammer_finite,
    pochhammer_infinite,
    pochhammer_infinite_minus_one,
    q1_limit_probe,
    qbinomial_check,
    qbinomial_series,
)
from .theta import theta_cutoff, theta_product, theta_series
from .xnum import PrecisionContext, pow_real, rel_diff, render

__version__ = "0.1.0"
