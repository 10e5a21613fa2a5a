"""Dense non-Hermitian quaternion eigensolver.

Schur decomposition by the quaternion QR algorithm (optionally with
aggressive early deflation), eigenvalue reordering, triangular Sylvester
solvers and eigenvectors, plus an independent complex-embedding oracle.
"""
from ._kernels import BACKEND
from .eigvec import EigenSystem, eig, full_eigenvectors, triangular_eigenvectors
from .errors import (
    EigenvalueCollisionError,
    NonConvergenceError,
    NonDistinctSpectrumError,
    QeigError,
    QMatFormatError,
    SameClassError,
)
from .qmat import QMatrix, fullrand, hessrand, read_qmatrix, write_qmatrix
from .quat import Quaternion, standardize
from .reorder import AedConfig, AedOutcome, aed_step, reorder_selected, swap_adjacent
from .schur import SchurDecomposition, schur_decompose
from .sylvester import oracle_scalar, solve_scalar, solve_triu

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "QMatrix", "Quaternion", "standardize",
    "fullrand", "hessrand", "read_qmatrix", "write_qmatrix",
    "solve_scalar", "oracle_scalar", "solve_triu",
    "schur_decompose", "SchurDecomposition",
    "AedConfig", "AedOutcome", "aed_step", "swap_adjacent", "reorder_selected",
    "triangular_eigenvectors", "full_eigenvectors", "EigenSystem", "eig",
    "QeigError", "SameClassError", "EigenvalueCollisionError", "NonDistinctSpectrumError",
    "NonConvergenceError", "QMatFormatError",
]
