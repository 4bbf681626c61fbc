"""Exact tree matrices, production matrices and total-positivity checks."""

from .polyring import Polynomial, Var, X, Y, Z, XI, phi, parse
from .linalg import PolyMatrix, check_tp_order
from .treematrices import matrix_T, matrix_T_yz, matrix_T_yphi, prodmat_explicit
from .bijections import verify_bijection

__all__ = [
    "Polynomial", "Var", "X", "Y", "Z", "XI", "phi", "parse",
    "PolyMatrix", "check_tp_order",
    "matrix_T", "matrix_T_yz", "matrix_T_yphi", "prodmat_explicit",
    "verify_bijection",
]
__version__ = "0.1.0"
