"""Reference linear reducers sharing one transform contract: y = basis^T (x - mean).

Four methods: plain PCA, shrinkage-regularized Fisher LDA, screening-based
supervised PCA (per-feature regression coefficients, cross-validated
threshold), and dependence-maximizing supervised PCA with a delta label
kernel.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from slce.dataset import LabeledDataset, center
from slce.knn import accuracy, knn_predict
from slce.linalg import _fix_signs, eig_via_range, range_basis, sym_eig
from slce.model import transform

METHODS = ("pca", "lda", "bair_spca", "hsic_spca", "slce")


@dataclass(frozen=True)
class LinearReducer:
    """Fitted linear reducer: method tag, projection basis, spectrum, training mean.

    Basis columns are orthonormal for pca/hsic_spca (and for bair_spca within
    the selected-feature subspace, zero elsewhere); lda columns are only
    unit-normalized. ``aux`` carries method-specific metadata.
    """

    method: str
    basis: np.ndarray     # d x k
    spectrum: np.ndarray  # length k, descending
    mean: np.ndarray      # length d
    aux: dict = field(default_factory=dict)

    @property
    def d(self):
        return self.basis.shape[0]

    @property
    def k(self):
        return self.basis.shape[1]


def _one_hot(labels, n_classes) -> np.ndarray:
    Y = np.zeros((n_classes, labels.size))
    Y[labels, np.arange(labels.size)] = 1.0
    return Y


def _topk_gram_eig(Xc, small_factory, k, solver):
    """Top-k eigenpairs of a symmetric matrix of the form F(Xc) living on range(Xc).

    ``small_factory`` maps a (possibly reduced) data matrix to the symmetric
    matrix whose eigenvectors are wanted; the reduced route restricts to an
    orthonormal basis of range(Xc), where every eigenvector with nonzero
    eigenvalue must lie.
    """
    d, n = Xc.shape
    if solver == "auto":
        solver = "reduced" if d > 2 * n else "dense"
    if solver == "dense":
        eig = sym_eig(small_factory(Xc))
        return eig.eigenvalues[:k].copy(), eig.eigenvectors[:, :k].copy()
    Q = range_basis(Xc)
    values, vectors, _ = eig_via_range(Q, small_factory(Q.T @ Xc), k)
    return values, vectors


def fit_pca(train: LabeledDataset, k: int, solver="auto") -> LinearReducer:
    """Top-k principal directions of the centered data (eigenvectors of X X^T)."""
    k = int(k)
    if not 1 <= k <= min(train.d, train.n):
        raise ValueError(f"k must lie in 1..min(d, n) = {min(train.d, train.n)}, got {k}")
    centered, mean = center(train)
    values, vectors = _topk_gram_eig(centered.data, lambda Z: Z @ Z.T, k, solver)
    return LinearReducer(method="pca", basis=vectors, spectrum=values, mean=mean)


def fit_lda(train: LabeledDataset, k: int, shrinkage=1e-4) -> LinearReducer:
    """Fisher discriminant directions with trace-scaled shrinkage on the within scatter.

    Solves the generalized eigenproblem of the between scatter against
    S_w + shrinkage * (tr(S_w)/d) * I; at most M-1 directions exist.
    """
    k = int(k)
    M = train.n_classes
    if M < 2:
        raise ValueError("lda needs at least two classes")
    if not 1 <= k <= M - 1:
        raise ValueError(f"k must lie in 1..M-1 = {M - 1} for lda, got {k}")
    if not 0.0 <= shrinkage <= 1.0:
        raise ValueError(f"shrinkage must lie in [0, 1], got {shrinkage}")

    centered, mean = center(train)
    Xc = centered.data
    d = train.d
    Sw = np.zeros((d, d))
    Sb = np.zeros((d, d))
    for j, idx in enumerate(train.class_indices):
        block = Xc[:, idx]
        cj = block.mean(axis=1)
        resid = block - cj[:, None]
        Sw += resid @ resid.T
        Sb += idx.size * np.outer(cj, cj)

    B = Sw + shrinkage * (np.trace(Sw) / d) * np.eye(d)
    try:
        values, vectors = scipy.linalg.eigh(Sb, B)
    except np.linalg.LinAlgError as exc:
        raise ValueError(
            "within-class scatter is singular; raise the shrinkage parameter"
        ) from exc
    values = values[::-1][:k]
    vectors = vectors[:, ::-1][:, :k]
    vectors = _fix_signs(vectors / np.linalg.norm(vectors, axis=0, keepdims=True))
    return LinearReducer(
        method="lda",
        basis=vectors,
        spectrum=values,
        mean=mean,
        aux={"shrinkage": float(shrinkage)},
    )


def fit_hsic_spca(train: LabeledDataset, k: int, solver="auto") -> LinearReducer:
    """Supervised PCA maximizing dependence on the labels under a delta kernel.

    With one-hot label matrix Y and centering matrix H, the solution is the
    top eigenvectors of X H (Y^T Y) H X^T, a Gram matrix of the per-class sums
    of the centered data.
    """
    k = int(k)
    if train.n_classes < 2:
        raise ValueError(
            "degenerate single-class supervision: the centered label kernel vanishes"
        )
    if not 1 <= k <= min(train.d, train.n):
        raise ValueError(f"k must lie in 1..min(d, n) = {min(train.d, train.n)}, got {k}")
    centered, mean = center(train)
    Y = _one_hot(train.labels, train.n_classes)

    def dependence_gram(Z):
        G = Z @ Y.T
        return G @ G.T

    values, vectors = _topk_gram_eig(centered.data, dependence_gram, k, solver)
    return LinearReducer(
        method="hsic_spca",
        basis=vectors,
        spectrum=values,
        mean=mean,
        aux={"label_kernel": "delta"},
    )


def fit_bair_spca(
    train: LabeledDataset,
    k: int,
    threshold_grid=(0.01, 0.05, 0.1, 0.25, 0.5, 1.0),
    cv_folds=5,
    seed=0,
) -> LinearReducer:
    """Screening-based supervised PCA: select features, then run PCA on the survivors.

    Each feature j gets the score max_c |x_j^T y_c| / sqrt(x_j^T x_j) over
    centered one-hot responses y_c (for two classes this is the plain
    regression-coefficient screen). Every fraction in ``threshold_grid`` keeps
    that share of the top-scoring features; the fraction with the best
    cross-validated 5-NN accuracy at dimension k wins. Basis rows of
    unselected features are zero.
    """
    k = int(k)
    d, n = train.d, train.n
    if not 1 <= k <= min(d, n):
        raise ValueError(f"k must lie in 1..min(d, n) = {min(d, n)}, got {k}")
    grid = tuple(float(f) for f in threshold_grid)
    if not grid:
        raise ValueError("threshold grid must be non-empty")
    if any(not 0.0 < f <= 1.0 for f in grid):
        raise ValueError(f"threshold fractions must lie in (0, 1], got {grid}")
    cv_folds = int(cv_folds)
    if cv_folds < 2:
        raise ValueError(f"cv_folds must be >= 2, got {cv_folds}")

    centered, mean = center(train)
    Xc = centered.data
    Yc = _one_hot(train.labels, train.n_classes)
    Yc = Yc - Yc.mean(axis=1, keepdims=True)

    feat_norms = np.linalg.norm(Xc, axis=1)
    valid = feat_norms > 0.0
    n_valid = int(valid.sum())
    if n_valid == 0:
        raise ValueError("every feature has zero spread; nothing to screen")
    if n_valid < d:
        warnings.warn(f"dropping {d - n_valid} zero-spread feature(s) from screening")
    scores = np.full(d, -np.inf)
    scores[valid] = np.max(np.abs(Xc[valid] @ Yc.T), axis=1) / feat_norms[valid]
    ranking = np.argsort(-scores, kind="stable")

    rng = np.random.default_rng(seed)
    folds = _stratified_folds(train, cv_folds, rng)
    all_cols = np.arange(n)

    cv_accuracy = {}
    for frac in grid:
        n_keep = min(max(1, math.ceil(frac * d)), n_valid)
        if n_keep < k:
            cv_accuracy[frac] = -np.inf
            continue
        sel = np.sort(ranking[:n_keep])
        fold_accs = []
        for fold in folds:
            tr_cols = np.setdiff1d(all_cols, fold)
            if fold.size == 0 or tr_cols.size <= k:
                continue
            sub = LabeledDataset(
                train.data[np.ix_(sel, tr_cols)],
                train.labels[tr_cols],
                train.n_classes,
                train.label_tokens,
            )
            reducer = fit_pca(sub, k)
            emb_tr = transform(reducer, sub.data)
            emb_va = transform(reducer, train.data[np.ix_(sel, fold)])
            neighbors = min(5, tr_cols.size)
            preds = knn_predict(emb_tr, sub.labels, emb_va, neighbors)
            fold_accs.append(accuracy(preds, train.labels[fold]))
        cv_accuracy[frac] = float(np.mean(fold_accs)) if fold_accs else -np.inf

    best = max(grid, key=lambda f: cv_accuracy[f])
    if not np.isfinite(cv_accuracy[best]):
        raise ValueError(
            f"no threshold fraction keeps enough features to embed at dim {k}"
        )

    n_keep = min(max(1, math.ceil(best * d)), n_valid)
    sel = np.sort(ranking[:n_keep])
    inner = fit_pca(
        LabeledDataset(train.data[sel, :], train.labels, train.n_classes, train.label_tokens),
        k,
    )
    basis = np.zeros((d, k))
    basis[sel, :] = inner.basis
    return LinearReducer(
        method="bair_spca",
        basis=basis,
        spectrum=inner.spectrum,
        mean=mean,
        aux={
            "selected": [int(j) for j in sel],
            "threshold": float(best),
            "grid": list(grid),
            "cv_folds": cv_folds,
            # infeasible fractions (too few features for dim k) recorded as null
            "cv_accuracy": {
                str(f): (float(a) if np.isfinite(a) else None)
                for f, a in cv_accuracy.items()
            },
            "dropped_features": int(d - n_valid),
        },
    )


def _stratified_folds(ds: LabeledDataset, n_folds: int, rng) -> list:
    """Round-robin per-class fold assignment after a seeded shuffle."""
    folds = [[] for _ in range(n_folds)]
    for idx in ds.class_indices:
        perm = rng.permutation(idx)
        for pos, column in enumerate(perm):
            folds[pos % n_folds].append(int(column))
    return [np.sort(np.array(f, dtype=int)) for f in folds]
