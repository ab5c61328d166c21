"""Bit-vector symbolic execution and satisfiability backends."""

from .backends import (
    BitBlastBackend,
    EnumeratorBackend,
    ProcessBackend,
    SolverFailure,
    SolverResult,
    SolverTimeout,
)
from .executor import (
    AssertViolation,
    SolverError,
    SymState,
    Timeout,
    UnsupportedExpr,
    Verdict,
    Verified,
    eval_expr,
    verify,
)
from .kernels import available_kernels
from .types import FieldType, KernelTypeMap
from .values import Concrete, Op, SymExpr, Symbol, Uninterpreted

__all__ = [
    "AssertViolation",
    "BitBlastBackend",
    "Concrete",
    "EnumeratorBackend",
    "FieldType",
    "KernelTypeMap",
    "Op",
    "ProcessBackend",
    "SolverError",
    "SolverFailure",
    "SolverResult",
    "SolverTimeout",
    "SymExpr",
    "SymState",
    "Symbol",
    "Timeout",
    "Uninterpreted",
    "UnsupportedExpr",
    "Verdict",
    "Verified",
    "available_kernels",
    "eval_expr",
    "verify",
]
