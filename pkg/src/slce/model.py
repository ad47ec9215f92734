"""Supervised linear centroid-encoder: closed-form fit, projection, reconstruction.

The fitted basis solves, over orthonormal d x k matrices A, the minimization
of the centroid-reconstruction loss ||Ctilde - A A^T X||_F^2 on centered
training data. The minimizers are the top-k eigenvectors of the symmetric
system matrix X Ctilde^T + Ctilde X^T - X X^T.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from slce.dataset import LabeledDataset, center, centroid_matrix
from slce.linalg import centroid_cost, eig_via_range, range_basis, sym_eig

# Relative tolerance that separates "positive" spectrum entries from the
# zero/negative tail; scale-free so huge-magnitude data behaves like toy data.
POSITIVE_TOL = 1e-8


@dataclass(frozen=True)
class SlceModel:
    """Fitted centroid-encoder: orthonormal basis, spectrum, and training statistics.

    ``trace_ctc`` is the squared Frobenius norm of the centered training
    centroid matrix; ``positive_count`` counts system-matrix eigenvalues above
    tolerance, the number of directions that actually reduce the loss.
    """

    basis: np.ndarray       # d x k, orthonormal columns
    spectrum: np.ndarray    # k eigenvalues, descending
    mean: np.ndarray        # training global mean, length d
    n_classes: int
    trace_ctc: float
    positive_count: int

    @property
    def d(self):
        return self.basis.shape[0]

    @property
    def k(self):
        return self.basis.shape[1]


def build_system_matrix(X, Ctilde) -> np.ndarray:
    """X Ctilde^T + Ctilde X^T - X X^T, explicitly symmetrized.

    X is expected to be column-centered; a visibly nonzero mean only draws a
    warning since the algebra stays valid for uncentered input.
    """
    X = np.asarray(X, dtype=float)
    Ctilde = np.asarray(Ctilde, dtype=float)
    if X.shape != Ctilde.shape:
        raise ValueError(f"data shape {X.shape} != centroid-matrix shape {Ctilde.shape}")
    if X.shape[1]:
        mean_norm = np.linalg.norm(X.mean(axis=1))
        scale = max(np.linalg.norm(X) / np.sqrt(X.shape[1]), 1e-300)
        if mean_norm > 1e-6 * scale:
            warnings.warn(
                f"data does not look centered (||column mean|| = {mean_norm:.3e}); "
                "rank and positivity guarantees assume centered input"
            )
    S = X @ Ctilde.T + Ctilde @ X.T - X @ X.T
    return 0.5 * (S + S.T)


def fit_slce(train: LabeledDataset, k: int, solver="auto", switch_ratio=2.0) -> SlceModel:
    """Fit a rank-k centroid-encoder on the training set.

    The data is centered internally and the centroid matrix is built from the
    centered columns. ``solver`` picks the eigenproblem route: "dense" forms
    the d x d system matrix, "reduced" solves in an orthonormal basis of the
    range of the centered data (the right choice when d >> n), and "auto"
    switches to the reduced path when d > switch_ratio * n.
    """
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > train.d:
        raise ValueError(f"k must be <= d = {train.d}, got {k}")
    if solver not in ("auto", "dense", "reduced"):
        raise ValueError(f"unknown solver {solver!r}")

    centered, mean = center(train)
    Xc = centered.data
    Ct = centroid_matrix(centered).data

    if solver == "auto":
        solver = "reduced" if train.d > switch_ratio * train.n else "dense"
    if solver == "dense":
        eig = sym_eig(build_system_matrix(Xc, Ct))
        full = eig.eigenvalues
        spectrum = full[:k].copy()
        basis = eig.eigenvectors[:, :k].copy()
    else:
        Q = range_basis(Xc)
        small = build_system_matrix(Q.T @ Xc, Q.T @ Ct)
        spectrum, basis, full = eig_via_range(Q, small, k)

    tol = POSITIVE_TOL * (np.max(np.abs(full)) if full.size else 0.0)
    positive_count = int(np.sum(full > tol))
    if k > positive_count:
        warnings.warn(
            f"requested {k} directions but only {positive_count} carry positive "
            "spectrum; the extra directions do not reduce the centroid-"
            "reconstruction loss"
        )

    return SlceModel(
        basis=basis,
        spectrum=spectrum,
        mean=mean,
        n_classes=train.n_classes,
        trace_ctc=float(np.linalg.norm(Ct) ** 2),
        positive_count=positive_count,
    )


def transform(model, X) -> np.ndarray:
    """Project columns of X to the fitted subspace: basis^T (X - mean)."""
    X = np.asarray(X, dtype=float)
    basis, mean = model.basis, model.mean
    if X.ndim != 2 or X.shape[0] != basis.shape[0]:
        raise ValueError(
            f"expected {basis.shape[0]} rows to match the model, got shape {X.shape}"
        )
    return basis.T @ (X - mean[:, None])


def reconstruct(model, X) -> np.ndarray:
    """Lift the projection back to the ambient space: basis basis^T (X - mean) + mean."""
    X = np.asarray(X, dtype=float)
    basis, mean = model.basis, model.mean
    if X.ndim != 2 or X.shape[0] != basis.shape[0]:
        raise ValueError(
            f"expected {basis.shape[0]} rows to match the model, got shape {X.shape}"
        )
    centered = X - mean[:, None]
    return basis @ (basis.T @ centered) + mean[:, None]


def training_cost(model: SlceModel, train: LabeledDataset) -> float:
    """Centroid-reconstruction loss of the fitted basis on its own training set.

    Equals trace_ctc minus the sum of the model spectrum (up to roundoff);
    the direct Frobenius evaluation is returned.
    """
    if train.d != model.d:
        raise ValueError(f"model has d = {model.d}, dataset has d = {train.d}")
    mean = train.data.mean(axis=1)
    scale = max(float(np.linalg.norm(mean)), float(np.linalg.norm(model.mean)), 1.0)
    if np.linalg.norm(mean - model.mean) > 1e-8 * scale:
        raise ValueError("dataset mean does not match the model; was it fitted on this data?")
    Xc = train.data - mean[:, None]
    Ct = centroid_matrix(LabeledDataset(Xc, train.labels, train.n_classes, train.label_tokens)).data
    return centroid_cost(Ct, model.basis, Xc)
