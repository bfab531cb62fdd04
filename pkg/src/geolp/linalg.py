"""Dense square solves by Gaussian elimination with partial pivoting."""
from __future__ import annotations

import numpy as np

PIVOT_TOL = 1e-10


class SingularMatrixError(ArithmeticError):
    pass


def solve_square(B, rhs, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Solve ``B x = rhs`` without forming an inverse.

    Raises :class:`SingularMatrixError` when a pivot falls below
    ``pivot_tol`` times the largest initial row norm of ``B``.
    """
    M = np.array(B, dtype=float)
    y = np.array(rhs, dtype=float)
    n = M.shape[0]
    if M.shape != (n, n) or y.shape != (n,):
        raise ValueError(f"shape mismatch: B {M.shape}, rhs {y.shape}")
    scale = float(np.max(np.linalg.norm(M, axis=1))) if n else 0.0
    threshold = pivot_tol * scale
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")
    for k in range(n):
        p = k + int(np.argmax(np.abs(M[k:, k])))
        if abs(M[p, k]) < threshold:
            raise SingularMatrixError(f"pivot {k} below tolerance")
        if p != k:
            M[[k, p]] = M[[p, k]]
            y[[k, p]] = y[[p, k]]
        f = M[k + 1:, k] / M[k, k]
        M[k + 1:, k:] -= np.outer(f, M[k, k:])
        y[k + 1:] -= f * y[k]
    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (y[k] - M[k, k + 1:] @ x[k + 1:]) / M[k, k]
    return x
