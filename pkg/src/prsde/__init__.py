"""Exact symbolic and randomized checks for the PR self-duality system on a 4-manifold."""

from .algebra import Poly, Q, RatExpr, Var, format_q
from .jets import DualScalar, JetGerm, Series, total_derivative
from .report import CheckReport, RunConfig

__all__ = [
    "Poly",
    "Q",
    "RatExpr",
    "Var",
    "format_q",
    "DualScalar",
    "JetGerm",
    "Series",
    "total_derivative",
    "CheckReport",
    "RunConfig",
]
__version__ = "0.1.0"
