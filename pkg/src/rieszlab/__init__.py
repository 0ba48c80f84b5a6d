"""rieszlab: high-precision numerics around the Riesz function.

Submodules
----------
arith      Moebius sieve, Hermite numbers, PrecisionConfig
zeta       zeta, zeta', log-gamma (Euler-Maclaurin, multiprecision)
zeros      zero ordinate tables: refine, enrich, persist
riesz      Riesz function by four representations, explicit formula
kernels    Moebius kernels s(t), kbar(t), A(z), B(t), P_z(y)
integrals  oscillatory / Laplace quadrature and identity checks
probe      envelope extraction and growth-exponent fits
cli        command-line front end
"""

from .arith import FLOAT64, PrecisionConfig, build_mobius, hermite_numbers, log_factorial
from .errors import (
    BracketError,
    ConsistencyError,
    ConvergenceError,
    PoleError,
    PrecisionDowngradeWarning,
    PrecisionError,
    ResourceError,
    RieszLabError,
    SingularFitError,
    StripError,
    TableFormatError,
)

__version__ = "0.1.0"

__all__ = [
    "FLOAT64",
    "PrecisionConfig",
    "build_mobius",
    "hermite_numbers",
    "log_factorial",
    "BracketError",
    "ConsistencyError",
    "ConvergenceError",
    "PoleError",
    "PrecisionDowngradeWarning",
    "PrecisionError",
    "ResourceError",
    "RieszLabError",
    "SingularFitError",
    "StripError",
    "TableFormatError",
]
