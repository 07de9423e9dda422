"""nccalc: exact-arithmetic workbench for noncommutative differential calculus.

The package computes Hochschild and cyclic (co)homology of finite-dimensional
(differential graded) algebras over Q, verifies operator identities of the
Cartan calculus both strictly and up to homotopy, runs the bar-construction
comparison machinery, and drives the Gauss-Manin superconnection for
polynomial families of algebras.  All arithmetic is exact.
"""

from .errors import (NcError, InputError, ValidationError, TruncationError,
                     CapError, SupportError)
from .exact import (Fraction, koszul_sign, ParamPoly, USeries, SparseMatrix,
                    kernel_basis, image_membership, rank, param_derivative,
                    u_multiply)

__all__ = [
    "NcError", "InputError", "ValidationError", "TruncationError", "CapError",
    "SupportError", "Fraction", "koszul_sign", "ParamPoly", "USeries",
    "SparseMatrix", "kernel_basis", "image_membership", "rank",
    "param_derivative", "u_multiply",
]
