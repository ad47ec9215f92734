"""Shared test helpers: seeded dataset generators and spectral utilities."""

from __future__ import annotations

import os

import numpy as np

from slce.dataset import LabeledDataset

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
IRIS = os.path.join(REPO_ROOT, "data", "iris.csv")


def make_dataset(seed, d, n, M, spread=3.0, noise=1.0) -> LabeledDataset:
    """Gaussian blob dataset: M class means at scale ``spread``, unit-ish noise.

    Every class receives at least one sample; remaining columns are assigned
    round-robin so class sizes differ by at most one.
    """
    rng = np.random.default_rng(seed)
    if M > n:
        raise ValueError("need n >= M")
    labels = np.sort(np.arange(n) % M)
    means = rng.normal(scale=spread, size=(d, M))
    data = means[:, labels] + rng.normal(scale=noise, size=(d, n))
    return LabeledDataset(data=data, labels=labels)


def make_singleton_dataset(seed, d, n) -> LabeledDataset:
    """Every sample is its own class."""
    rng = np.random.default_rng(seed)
    return LabeledDataset(data=rng.normal(size=(d, n)), labels=np.arange(n))


def random_orthogonal(seed, d) -> np.ndarray:
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.normal(size=(d, d)))
    return Q * np.sign(np.diag(R))


def spectral_count(values, rel_tol=1e-8, floor=0.0) -> int:
    """How many entries exceed max(rel_tol * max|values|, floor)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0
    cut = max(rel_tol * float(np.max(np.abs(values))), floor)
    return int(np.sum(values > cut))


def write_csv(path, data, labels, tokens=None, header=True):
    """Write a samples-as-rows CSV in the loader's expected layout."""
    data = np.asarray(data, dtype=float)
    labels = np.asarray(labels)
    d = data.shape[0]
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(",".join(f"f{i}" for i in range(d)) + ",label\n")
        for col in range(data.shape[1]):
            token = tokens[labels[col]] if tokens is not None else str(labels[col])
            fh.write(",".join(repr(float(v)) for v in data[:, col]) + f",{token}\n")
    return path
