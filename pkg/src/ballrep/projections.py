"""Euclidean projections onto the solver feasible sets.

All three are exact: the sort-based simplex projection (and the l1 ball
projection built on it by sign symmetry), radial scaling for weighted l2
balls, and eigenvalue clipping plus a trace-simplex shift for the
intersection of the PSD cone with a trace ball, which is the exact
Frobenius projection because the set is unitarily invariant.
"""

from __future__ import annotations

import numpy as np

from .jacobi import jacobi_eigh


def project_simplex(v, total: float) -> np.ndarray:
    """Project onto {x >= 0, sum x = total} (sort-based)."""
    if not total > 0:
        raise ValueError(f"simplex total must be positive, got {total}")
    v = np.asarray(v, dtype=float)
    # stable descending sort keeps ties in canonical index order
    dropping = np.sort(v, kind="stable")[::-1]
    cumulative = np.cumsum(dropping) - total
    counts = np.arange(1, v.size + 1)
    feasible = dropping - cumulative / counts > 0
    rho = int(np.nonzero(feasible)[0][-1])
    shift = cumulative[rho] / (rho + 1)
    return np.maximum(v - shift, 0.0)


def project_l1_ball(v, radius: float) -> np.ndarray:
    """Project onto {x : sum |x_i| <= radius}."""
    if not radius > 0:
        raise ValueError(f"l1 radius must be positive, got {radius}")
    v = np.asarray(v, dtype=float)
    if np.abs(v).sum() <= radius:
        return v.copy()
    magnitudes = project_simplex(np.abs(v), radius)
    return np.sign(v) * magnitudes


def project_weighted_l2_ball(v, weights, radius_sq: float) -> np.ndarray:
    """Project onto {x : sum w_i x_i^2 <= r^2}, exact radial scaling.

    Radial scaling is the true projection in the weighted inner product
    <x, y> = sum w_i x_i y_i, which is the geometry the solver works in.
    """
    if not radius_sq > 0:
        raise ValueError(f"squared radius must be positive, got {radius_sq}")
    v = np.asarray(v, dtype=float)
    w = np.asarray(weights, dtype=float)
    norm_sq = float(np.dot(w, v * v))
    if norm_sq <= radius_sq:
        return v.copy()
    return v * np.sqrt(radius_sq / norm_sq)


def project_psd_trace(matrix, trace_bound: float) -> np.ndarray:
    """Project a symmetric matrix onto {X >= 0, trace X <= bound} (Frobenius).

    Eigenvalues are clipped at zero and, if their sum still exceeds the
    bound, shifted by the simplex projection; applied in the eigenbasis
    this is the exact projection onto the intersection.
    """
    if not trace_bound > 0:
        raise ValueError(f"trace bound must be positive, got {trace_bound}")
    eigenvalues, vectors = jacobi_eigh(matrix)
    clipped = np.maximum(eigenvalues, 0.0)
    if clipped.sum() > trace_bound:
        clipped = project_simplex(eigenvalues, trace_bound)
    return (vectors * clipped) @ vectors.T
