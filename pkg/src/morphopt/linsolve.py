"""Sparse SPD linear algebra: operator container and Jacobi-PCG solver.

The conjugate-gradient loop is written out explicitly so the iteration is
deterministic (fixed summation order, no threading) and so indefiniteness
is detected through the curvature p'Ap rather than discovered as silent
non-convergence.
"""

import numpy as np
import scipy.sparse as sp

from .errors import InvalidParameterError, MatrixNotSPDError, SolverFailureError


def _dot(a, b):
    # pairwise numpy reduction: deterministic, not delegated to threaded BLAS
    return float(np.sum(a * b))


class SparseOperator:
    """Row-compressed sparse matrix with an explicit symmetry flag."""

    def __init__(self, matrix, symmetric=True):
        m = sp.csr_matrix(matrix)
        if m.shape[0] != m.shape[1]:
            raise InvalidParameterError("operator must be square")
        m.sum_duplicates()
        self.matrix = m
        self.symmetric = symmetric

    @classmethod
    def from_triplets(cls, n, rows, cols, vals, symmetric=True):
        m = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        return cls(m, symmetric=symmetric)

    @property
    def n(self):
        return self.matrix.shape[0]

    def matvec(self, x):
        return self.matrix @ x

    def diagonal(self):
        return self.matrix.diagonal()

    def write_matrix_market(self, path):
        """Dump in MatrixMarket coordinate format (1-based indices)."""
        coo = self.matrix.tocoo()
        with open(path, "w") as fh:
            fh.write("%%MatrixMarket matrix coordinate real "
                     + ("symmetric\n" if self.symmetric else "general\n"))
            if self.symmetric:
                keep = coo.row >= coo.col
                rows, cols, vals = coo.row[keep], coo.col[keep], coo.data[keep]
            else:
                rows, cols, vals = coo.row, coo.col, coo.data
            fh.write(f"{self.n} {self.n} {len(vals)}\n")
            for r, c, v in zip(rows, cols, vals):
                fh.write(f"{r + 1} {c + 1} {float(v)!r}\n")


def eliminate_dirichlet_triplets(rows, cols, vals, n, fixed_dofs):
    """Symmetric elimination at the triplet level: drop every entry in a
    constrained row or column, then put 1 on the constrained diagonal."""
    fixed = np.zeros(n, dtype=bool)
    fixed[np.asarray(fixed_dofs, dtype=np.int64)] = True
    keep = ~(fixed[rows] | fixed[cols])
    rows = np.concatenate([rows[keep], np.nonzero(fixed)[0]])
    cols = np.concatenate([cols[keep], np.nonzero(fixed)[0]])
    vals = np.concatenate([vals[keep], np.ones(int(fixed.sum()))])
    return rows, cols, vals


def solve_spd(A, b, tol=1e-10, maxit=None, x0=None, callback=None):
    """Jacobi-preconditioned conjugate gradients for an SPD operator.

    Guarantees ||A x - b|| <= tol * ||b|| on return.  Raises
    MatrixNotSPDError on nonpositive curvature or a nonpositive diagonal,
    SolverFailureError when maxit iterations do not reach the tolerance.
    """
    b = np.asarray(b, dtype=float)
    if not np.all(np.isfinite(b)):
        raise InvalidParameterError("right-hand side contains non-finite entries")
    n = A.n
    if maxit is None:
        maxit = 10 * n
    diag = A.diagonal()
    if np.any(diag <= 0.0):
        raise MatrixNotSPDError("operator has a nonpositive diagonal entry")
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)

    bnorm = np.sqrt(_dot(b, b))
    if bnorm == 0.0 and x0 is None:
        return x
    r = b - A.matvec(x)
    rnorm = np.sqrt(_dot(r, r))
    target = tol * bnorm
    if rnorm <= target:
        return x
    z = r / diag
    p = z.copy()
    rz = _dot(r, z)
    for it in range(maxit):
        q = A.matvec(p)
        curvature = _dot(p, q)
        if curvature <= 0.0:
            raise MatrixNotSPDError(
                f"nonpositive curvature p'Ap = {curvature!r} at iteration {it}")
        alpha = rz / curvature
        x += alpha * p
        r -= alpha * q
        rnorm = np.sqrt(_dot(r, r))
        if callback is not None:
            callback(it, rnorm)
        if rnorm <= target:
            return x
        z = r / diag
        rz_new = _dot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverFailureError(
        f"PCG did not converge in {maxit} iterations (residual {rnorm:.3e}, "
        f"target {target:.3e})", residual=rnorm, iterations=maxit)
