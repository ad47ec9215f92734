"""Labeled data handling: CSV loading, stratified splits, centering, centroid matrices.

Data lives column-major: a d x n matrix holds n samples of d features each,
one sample per column. Labels are dense integers 0..M-1.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class LabeledDataset:
    """Immutable d x n data matrix with integer labels and per-class index sets.

    ``n_classes`` is normally inferred from the labels, in which case every
    class must be non-empty. A split partition may carry its parent's class
    count explicitly, so a test partition is allowed to miss a class.
    """

    data: np.ndarray
    labels: np.ndarray
    n_classes: int = None
    label_tokens: tuple = None
    class_indices: tuple = field(init=False, repr=False)
    class_counts: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        labels = np.asarray(self.labels)
        if data.ndim != 2:
            raise ValueError(f"data must be a 2-D matrix, got shape {data.shape}")
        if labels.ndim != 1 or labels.shape[0] != data.shape[1]:
            raise ValueError(
                f"labels must be a vector of length {data.shape[1]}, got shape {labels.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("data contains non-finite entries")
        if labels.size and not np.issubdtype(labels.dtype, np.integer):
            as_int = labels.astype(int)
            if not np.array_equal(as_int, labels):
                raise ValueError("labels must be integers")
            labels = as_int
        labels = labels.astype(int)

        inferred = self.n_classes is None
        if inferred:
            if labels.size == 0:
                raise ValueError("cannot infer class count from an empty dataset")
            n_classes = int(labels.max()) + 1
        else:
            n_classes = int(self.n_classes)
        if n_classes < 1:
            raise ValueError("n_classes must be >= 1")
        if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
            raise ValueError(f"labels must lie in 0..{n_classes - 1}")

        indices = tuple(np.flatnonzero(labels == j) for j in range(n_classes))
        counts = np.array([idx.size for idx in indices])
        if inferred and np.any(counts == 0):
            empty = int(np.flatnonzero(counts == 0)[0])
            raise ValueError(f"class {empty} has no samples")

        tokens = self.label_tokens
        if tokens is None:
            tokens = tuple(str(j) for j in range(n_classes))
        else:
            tokens = tuple(str(t) for t in tokens)
            if len(tokens) != n_classes:
                raise ValueError(f"expected {n_classes} label tokens, got {len(tokens)}")

        data.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_classes", n_classes)
        object.__setattr__(self, "label_tokens", tokens)
        object.__setattr__(self, "class_indices", indices)
        object.__setattr__(self, "class_counts", counts)

    @property
    def d(self):
        return self.data.shape[0]

    @property
    def n(self):
        return self.data.shape[1]

    def subset(self, columns) -> "LabeledDataset":
        """Dataset restricted to the given column indices, keeping the class encoding."""
        columns = np.asarray(columns, dtype=int)
        return LabeledDataset(
            data=self.data[:, columns],
            labels=self.labels[columns],
            n_classes=self.n_classes,
            label_tokens=self.label_tokens,
        )


@dataclass(frozen=True)
class CentroidMatrix:
    """Per-sample class centroids: column i of ``data`` is the centroid of sample i's class."""

    data: np.ndarray       # d x n
    centroids: np.ndarray  # d x M


@dataclass(frozen=True)
class SplitPair:
    train: LabeledDataset
    test: LabeledDataset
    seed: int
    ratio: float


def load_csv(path, label_column="last", header=True) -> LabeledDataset:
    """Load a samples-as-rows CSV into the internal features-by-samples layout.

    ``label_column`` selects the label field by header name, integer position,
    or the literal string "last". Label tokens are encoded densely 0..M-1 in
    first-appearance order; the token list is retained on the dataset.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")

    names = None
    if header:
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: no data rows after header")

    width = len(rows[0])
    if names is not None and len(names) != width:
        raise ValueError(
            f"{path}: header has {len(names)} fields but data rows have {width}"
        )
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(
                f"{path}: ragged row {i + 1}: expected {width} fields, got {len(row)}"
            )

    label_idx = _resolve_label_column(label_column, names, width, path)
    feature_idx = [j for j in range(width) if j != label_idx]
    if not feature_idx:
        raise ValueError(f"{path}: no feature columns besides the label")

    def colname(j):
        return names[j] if names else str(j)

    data = np.empty((len(rows), len(feature_idx)))
    tokens = []
    token_codes = {}
    labels = np.empty(len(rows), dtype=int)
    for i, row in enumerate(rows):
        for out_j, j in enumerate(feature_idx):
            cell = row[j].strip()
            try:
                value = float(cell)
            except ValueError:
                value = math.nan
            if not math.isfinite(value):
                raise ValueError(
                    f"{path}: row {i + 1}, column {colname(j)!r}: "
                    f"could not parse {cell!r} as a finite number"
                )
            data[i, out_j] = value
        token = row[label_idx].strip()
        if token not in token_codes:
            token_codes[token] = len(tokens)
            tokens.append(token)
        labels[i] = token_codes[token]

    return LabeledDataset(data=data.T, labels=labels, label_tokens=tuple(tokens))


def _resolve_label_column(label_column, names, width, path):
    if isinstance(label_column, int):
        idx = label_column
    elif label_column == "last":
        idx = width - 1
    else:
        try:
            idx = int(label_column)
        except (TypeError, ValueError):
            if names is None:
                raise ValueError(
                    f"{path}: label column {label_column!r} needs a header row"
                ) from None
            if label_column not in names:
                raise ValueError(
                    f"{path}: no column named {label_column!r}; header has {names}"
                ) from None
            idx = names.index(label_column)
    if idx < 0:
        idx += width
    if not 0 <= idx < width:
        raise ValueError(f"{path}: label column index {label_column} out of range")
    return idx


def split(ds: LabeledDataset, ratio: float, seed: int) -> SplitPair:
    """Stratified train/test split: ceil(ratio * |C_j|) samples of each class to train.

    The per-class shuffle is driven by a single seeded generator, so identical
    (ds, ratio, seed) always produce identical partitions. Rounding favors the
    training side; every class stays represented in train. Products within
    1e-9 of an integer count as that integer, so float artifacts like
    0.07 * 100 = 7.000000000000001 cannot inflate the ceiling.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    for j, count in enumerate(ds.class_counts):
        if count == 1:
            raise ValueError(f"class {j} has a single sample and cannot be stratified")

    rng = np.random.default_rng(seed)
    train_idx = []
    test_idx = []
    for j in range(ds.n_classes):
        perm = rng.permutation(ds.class_indices[j])
        take = max(1, math.ceil(ratio * perm.size - 1e-9))
        train_idx.append(perm[:take])
        test_idx.append(perm[take:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))

    return SplitPair(
        train=ds.subset(train_idx),
        test=ds.subset(test_idx),
        seed=int(seed),
        ratio=float(ratio),
    )


def center(ds: LabeledDataset):
    """Subtract the global column mean; returns (centered dataset, mean vector)."""
    mean = ds.data.mean(axis=1)
    centered = LabeledDataset(
        data=ds.data - mean[:, None],
        labels=ds.labels,
        n_classes=ds.n_classes,
        label_tokens=ds.label_tokens,
    )
    return centered, mean


def standardize(ds: LabeledDataset) -> LabeledDataset:
    """Per-feature z-scoring; features with zero spread are only mean-shifted."""
    mean = ds.data.mean(axis=1)
    std = ds.data.std(axis=1)
    std[std == 0.0] = 1.0
    return LabeledDataset(
        data=(ds.data - mean[:, None]) / std[:, None],
        labels=ds.labels,
        n_classes=ds.n_classes,
        label_tokens=ds.label_tokens,
    )


def centroid_matrix(ds: LabeledDataset) -> CentroidMatrix:
    """Build the d x n matrix whose column i is the centroid of sample i's class."""
    centroids = np.empty((ds.d, ds.n_classes))
    for j, idx in enumerate(ds.class_indices):
        if idx.size == 0:
            raise ValueError(f"class {j} has no samples; centroid undefined")
        centroids[:, j] = ds.data[:, idx].mean(axis=1)
    return CentroidMatrix(data=centroids[:, ds.labels], centroids=centroids)
