"""Hilbert C*-modules over compact operators at finite truncation.

Fredholm index, the localization isomorphism and the bounded transform of
regular operators, checked numerically on truncation towers.
"""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DefectSingular,
    DimensionMismatch,
    DomainError,
    IndexNonzero,
    KModuleError,
    NoPseudoInverse,
    NotFredholm,
    NotHermitian,
    NotMinimalProjection,
    SchemaError,
)
from .module import CompactElement, ModuleVector, OrthonormalBasis, LocalizedVector  # noqa: E402
from .operators import AdjointableOp, psi, psi_inverse, theta  # noqa: E402
from .towers import OperatorTower, parse_generator  # noqa: E402
from .regular import bounded_transform, inverse_transform, verify_kernel_range_identities  # noqa: E402
from .fredholm import FredholmReport, fredholm_check_bounded, fredholm_check_regular, index  # noqa: E402

__all__ = [
    "DefectSingular", "DimensionMismatch", "DomainError", "IndexNonzero", "KModuleError", "NoPseudoInverse",
    "NotFredholm", "NotHermitian", "NotMinimalProjection", "SchemaError",
    "CompactElement", "ModuleVector", "OrthonormalBasis", "LocalizedVector",
    "AdjointableOp", "psi", "psi_inverse", "theta",
    "OperatorTower", "parse_generator",
    "bounded_transform", "inverse_transform", "verify_kernel_range_identities",
    "FredholmReport", "fredholm_check_bounded", "fredholm_check_regular", "index",
]
