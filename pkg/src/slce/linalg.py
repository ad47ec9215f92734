"""Shared numerical kernels: symmetric eigendecomposition, reconstruction cost, subspace tools."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# Seed for the deterministic draw that completes a thin range basis to the
# requested dimension; fixed so repeated fits are byte-stable.
_COMPLEMENT_SEED = 0x51CE


@dataclass(frozen=True)
class SymmetricEigen:
    """Eigenpairs of a symmetric matrix, eigenvalues descending.

    Column i of ``eigenvectors`` pairs with ``eigenvalues[i]``. Each column is
    sign-fixed so its largest-magnitude entry is positive (ties resolved to the
    lowest index), which makes repeated decompositions byte-stable.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    if vectors.shape[1] == 0:
        return vectors
    lead = np.argmax(np.abs(vectors), axis=0)
    flips = np.where(vectors[lead, np.arange(vectors.shape[1])] < 0.0, -1.0, 1.0)
    return vectors * flips


def sym_eig(S) -> SymmetricEigen:
    """Eigendecomposition of a symmetric matrix with a deterministic contract.

    The input may deviate from exact symmetry by at most 1e-8 relative in
    Frobenius norm; it is symmetrized as (S + S^T)/2 before factorization.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("matrix contains non-finite entries")
    norm = np.linalg.norm(S)
    skew = np.linalg.norm(S - S.T)
    if skew > 1e-8 * max(norm, 1e-300):
        raise ValueError(
            f"matrix is not symmetric: ||S - S^T|| = {skew:.3e} vs ||S|| = {norm:.3e}"
        )
    S = 0.5 * (S + S.T)
    try:
        values, vectors = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            f"symmetric eigendecomposition failed to converge: {exc}; "
            f"||S||_F = {norm:.3e}, extreme diagonal = "
            f"[{S.diagonal().min():.3e}, {S.diagonal().max():.3e}]"
        ) from exc
    values = values[::-1]
    vectors = _fix_signs(vectors[:, ::-1])
    return SymmetricEigen(eigenvalues=values, eigenvectors=vectors)


def centroid_cost(Ctilde, A, X) -> float:
    """Squared Frobenius distance ||Ctilde - A A^T X||_F^2.

    A is expected to have orthonormal columns (a non-orthonormal A only draws
    a warning; the cost of the corresponding oblique projector is still
    returned). An empty A (k = 0) yields ||Ctilde||_F^2.
    """
    Ctilde = np.asarray(Ctilde, dtype=float)
    X = np.asarray(X, dtype=float)
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if Ctilde.shape != X.shape:
        raise ValueError(f"Ctilde shape {Ctilde.shape} != data shape {X.shape}")
    if A.shape[0] != X.shape[0]:
        raise ValueError(f"basis has {A.shape[0]} rows, data has {X.shape[0]}")
    k = A.shape[1]
    if k:
        gram_err = np.linalg.norm(A.T @ A - np.eye(k))
        if gram_err > 1e-8 * max(1.0, np.sqrt(k)):
            warnings.warn(
                f"basis columns are not orthonormal (||A^T A - I|| = {gram_err:.3e}); "
                "cost computed for the oblique projector anyway"
            )
    residual = Ctilde - A @ (A.T @ X)
    return float(np.linalg.norm(residual) ** 2)


def principal_angles(U, V) -> np.ndarray:
    """Canonical angles (radians, ascending) between the column spans of U and V.

    Small angles come from a sine-based residual so they resolve well below
    the sqrt(eps) floor of the plain arccos formula.
    """
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if U.ndim != 2 or V.ndim != 2 or U.shape[1] != V.shape[1]:
        raise ValueError(f"expected equal column counts, got {U.shape} and {V.shape}")
    Qu, _ = np.linalg.qr(U)
    Qv, _ = np.linalg.qr(V)
    C = Qu.T @ Qv
    cosines = np.clip(np.linalg.svd(C, compute_uv=False), -1.0, 1.0)  # descending
    sines = np.linalg.svd(Qv - Qu @ C, compute_uv=False)
    sines = np.clip(sines[::-1], 0.0, 1.0)  # ascending, paired with the cosines
    return np.where(cosines ** 2 > 0.5, np.arcsin(sines), np.arccos(cosines))


def range_basis(X, rtol=1e-12) -> np.ndarray:
    """Thin orthonormal basis for the column range of X (numerical rank by rtol)."""
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return np.zeros((X.shape[0], 0))
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return U[:, :0]
    r = int(np.sum(s > rtol * s[0]))
    return U[:, :r]


def eig_via_range(basis, small, k):
    """Top-k eigenpairs of B = basis @ small @ basis^T, where B vanishes off range(basis).

    ``basis`` is d x r with orthonormal columns and ``small`` is the r x r
    symmetric restriction of B to that range. The spectrum of B is the
    spectrum of ``small`` plus d - r exact zeros; eigenvectors for the zero
    block outside the range are completed deterministically.

    Returns (values, vectors, full_spectrum): the top-k eigenvalues, their
    d x k eigenvector matrix, and the full length-d descending spectrum.
    """
    basis = np.asarray(basis, dtype=float)
    d, r = basis.shape
    if not 0 <= k <= d:
        raise ValueError(f"k must lie in 0..{d}, got {k}")
    reduced = sym_eig(small)
    entries = [(val, i) for i, val in enumerate(reduced.eigenvalues)]
    entries += [(0.0, None)] * (d - r)
    entries.sort(key=lambda e: -e[0])  # stable: reduced zeros precede padded zeros

    full_spectrum = np.array([val for val, _ in entries])
    picked = entries[:k]
    n_padded = sum(1 for _, src in picked if src is None)
    complement = _complement_vectors(basis, n_padded)

    vectors = np.empty((d, k))
    values = np.empty(k)
    pad_at = 0
    for col, (val, src) in enumerate(picked):
        values[col] = val
        if src is None:
            vectors[:, col] = complement[:, pad_at]
            pad_at += 1
        else:
            vectors[:, col] = basis @ reduced.eigenvectors[:, src]
    return values, _fix_signs(vectors), full_spectrum


def _complement_vectors(basis, count):
    """Deterministic orthonormal vectors orthogonal to range(basis)."""
    d = basis.shape[0]
    if count == 0:
        return np.zeros((d, 0))
    rng = np.random.default_rng(_COMPLEMENT_SEED)
    G = rng.standard_normal((d, count))
    for _ in range(2):  # twice-is-enough re-orthogonalization
        G -= basis @ (basis.T @ G)
        G, _ = np.linalg.qr(G)
    return G
