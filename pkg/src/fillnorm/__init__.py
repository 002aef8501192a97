"""fillnorm: exact l1 filling norms and expansion diagnostics for finite complexes."""

from .complexes import (
    CellComplex2,
    Chain,
    HomologySummary,
    attach_cells,
    euler_characteristic,
    homology,
    l1_norm,
    parse_complex,
    presentation_to_complex,
)
from .filling import (
    ExpansionReport,
    FillProblem,
    FillResult,
    SolveCaps,
    check_integral_real_agreement,
    fill,
    l1_operator_norm,
    primitive,
    rho,
    verify_transfer_inequality,
)

__version__ = "0.1.0"

__all__ = [
    "CellComplex2", "Chain", "HomologySummary", "attach_cells",
    "euler_characteristic", "homology", "l1_norm", "parse_complex",
    "presentation_to_complex", "ExpansionReport", "FillProblem", "FillResult",
    "SolveCaps", "check_integral_real_agreement", "fill", "l1_operator_norm",
    "primitive", "rho", "verify_transfer_inequality", "__version__",
]
