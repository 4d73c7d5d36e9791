"""
Sparse assembly and SPD solve shared by the elasticity and phase-field modules
"""

import logging

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.linalg import splu

from fpfm.core.errors import SolverError

logger = logging.getLogger("fpfm.sparse")

MAX_REFINEMENTS = 3


def assemble_matrix(element_matrices: np.ndarray, element_dofs: np.ndarray, n_dofs: int) -> csr_matrix:
    """Scatter (M, k, k) element blocks into an (n, n) CSR matrix

    COO duplicates are summed in a fixed order during the CSR conversion, so
    the result does not depend on how the element blocks were produced.
    """
    k = element_dofs.shape[1]
    rows = np.repeat(element_dofs, k, axis=1).ravel()
    cols = np.tile(element_dofs, (1, k)).ravel()
    matrix = coo_matrix((element_matrices.ravel(), (rows, cols)), shape=(n_dofs, n_dofs)).tocsr()
    matrix.sum_duplicates()
    return matrix


def assemble_vector(element_vectors: np.ndarray, element_dofs: np.ndarray, n_dofs: int) -> np.ndarray:
    out = np.zeros(n_dofs)
    np.add.at(out, element_dofs.ravel(), element_vectors.ravel())
    return out


def solve_spd(matrix: csr_matrix, rhs: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Direct sparse solve with iterative refinement

    Contract: ||A x - b|| <= tol * ||b||. Raises SolverError with the final
    residual if refinement cannot reach it.
    """
    if rhs.size == 0:
        return np.zeros(0)
    b_norm = np.linalg.norm(rhs)
    if b_norm == 0.0:
        return np.zeros_like(rhs)

    try:
        lu = splu(matrix.tocsc())
    except RuntimeError as e:
        raise SolverError(f"factorization failed: {e}") from e

    x = lu.solve(rhs)
    residual = np.linalg.norm(rhs - matrix @ x)
    iterations = 0
    while residual > tol * b_norm and iterations < MAX_REFINEMENTS:
        x += lu.solve(rhs - matrix @ x)
        residual = np.linalg.norm(rhs - matrix @ x)
        iterations += 1

    if not np.isfinite(residual) or residual > tol * b_norm:
        raise SolverError("linear solve did not reach tolerance", residual=residual / b_norm, iterations=iterations)
    if iterations:
        logger.debug(f"Solve needed {iterations} refinement step(s), relative residual {residual / b_norm:.2e}")
    return x
