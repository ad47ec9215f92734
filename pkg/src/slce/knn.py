"""Deterministic brute-force k-nearest-neighbor classification in embedding space.

Distances are Euclidean. Every tie is broken by a fixed rule so repeated runs
agree bit for bit: distance ties go to the lower training index, vote ties to
the tied class owning the single nearest neighbor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Cap on floats held by one distance-matrix chunk (~160 MB).
_CHUNK_BUDGET = 20_000_000


@dataclass(frozen=True)
class KnnResult:
    predictions: np.ndarray
    accuracy: float
    k: int


def knn_predict(train_emb, train_labels, query_emb, neighbors) -> np.ndarray:
    """Majority-vote labels of the ``neighbors`` nearest training points per query."""
    train_emb = np.asarray(train_emb, dtype=float)
    query_emb = np.asarray(query_emb, dtype=float)
    train_labels = np.asarray(train_labels, dtype=int)
    if train_emb.ndim != 2 or query_emb.ndim != 2:
        raise ValueError("embeddings must be 2-D (features x points)")
    if train_emb.shape[0] != query_emb.shape[0]:
        raise ValueError(
            f"embedding dimensions differ: train {train_emb.shape[0]}, "
            f"query {query_emb.shape[0]}"
        )
    dim, n = train_emb.shape
    m = query_emb.shape[1]
    if train_labels.shape != (n,):
        raise ValueError(f"expected {n} training labels, got shape {train_labels.shape}")
    if n == 0:
        raise ValueError("empty training set")
    neighbors = int(neighbors)
    if neighbors < 1:
        raise ValueError(f"neighbors must be >= 1, got {neighbors}")
    if neighbors > n:
        raise ValueError(f"neighbors = {neighbors} exceeds training size {n}")

    predictions = np.empty(m, dtype=int)
    order_index = np.arange(n)
    chunk = max(1, _CHUNK_BUDGET // (max(dim, 1) * n))
    for start in range(0, m, chunk):
        stop = min(start + chunk, m)
        block = query_emb[:, start:stop]
        d2 = ((block[:, :, None] - train_emb[:, None, :]) ** 2).sum(axis=0)
        for row, q in enumerate(range(start, stop)):
            order = np.lexsort((order_index, d2[row]))
            predictions[q] = _vote(train_labels[order[:neighbors]])
    return predictions


def _vote(nearest_labels) -> int:
    counts = np.bincount(nearest_labels)
    best = counts.max()
    winners = np.flatnonzero(counts == best)
    if winners.size == 1:
        return int(winners[0])
    winner_set = set(int(w) for w in winners)
    for label in nearest_labels:  # distance order; first tied class wins
        if int(label) in winner_set:
            return int(label)
    raise AssertionError("unreachable: some tied class must appear among neighbors")


def accuracy(predictions, truth) -> float:
    """Exact fraction of matching entries."""
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    if predictions.shape != truth.shape:
        raise ValueError(
            f"length mismatch: predictions {predictions.shape}, truth {truth.shape}"
        )
    if predictions.size == 0:
        raise ValueError("cannot score an empty prediction vector")
    return int(np.count_nonzero(predictions == truth)) / predictions.size


def knn_evaluate(train_emb, train_labels, query_emb, query_labels, neighbors) -> KnnResult:
    """Predict and score in one step."""
    predictions = knn_predict(train_emb, train_labels, query_emb, neighbors)
    return KnnResult(
        predictions=predictions,
        accuracy=accuracy(predictions, np.asarray(query_labels, dtype=int)),
        k=int(neighbors),
    )
