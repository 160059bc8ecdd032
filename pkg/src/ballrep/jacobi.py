"""Cyclic Jacobi eigendecomposition for small symmetric matrices.

One hand-rolled kernel is shared by the PSD projection and the matrix
optimality certificates, so both sides of those checks agree on the exact
same spectral arithmetic.  Matrices here are tiny (the Gram bases of
low-degree polynomials), where Jacobi is accurate and simple.
"""

from __future__ import annotations

import math

import numpy as np


def jacobi_eigh(matrix, tol: float = 1e-12, max_sweeps: int = 60):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.

    Cyclic-by-row sweeps of Givens rotations until the off-diagonal
    Frobenius norm drops below tol times the matrix norm.  Returns
    (eigenvalues, eigenvectors) with eigenvectors in columns, like
    numpy.linalg.eigh.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix has non-finite entries")
    size = a.shape[0]
    scale = max(1.0, float(np.linalg.norm(a)))
    if np.abs(a - a.T).max() > 1e-10 * scale:
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    vecs = np.eye(size)

    def off_norm(m):
        return math.sqrt(max(0.0, float((m * m).sum() - (np.diag(m) ** 2).sum())))

    for _ in range(max_sweeps):
        if off_norm(a) <= tol * scale:
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # rotation angle that zeroes a[p, q]
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-36 * abs(diff):
                    t = apq / diff
                else:
                    phi = diff / (2.0 * apq)
                    t = 1.0 / (abs(phi) + math.sqrt(phi * phi + 1.0))
                    if phi < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * vecs[:, p] - s * vecs[:, q]
                rot_q = s * vecs[:, p] + c * vecs[:, q]
                vecs[:, p], vecs[:, q] = rot_p, rot_q

    eigenvalues = np.diag(a).copy()
    order = np.argsort(eigenvalues)
    return eigenvalues[order], vecs[:, order]
