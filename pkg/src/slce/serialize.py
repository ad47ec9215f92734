"""JSON round-trip for fitted models: one self-describing schema for every method.

Floats are serialized at full precision (repr), so loading a saved model
reproduces its transforms exactly.
"""

from __future__ import annotations

import json

import numpy as np

from slce.baselines import METHODS, LinearReducer
from slce.model import SlceModel

SCHEMA_VERSION = 1


def model_to_dict(model) -> dict:
    basis = np.asarray(model.basis, dtype=float)
    doc = {
        "version": SCHEMA_VERSION,
        "method": "slce" if isinstance(model, SlceModel) else model.method,
        "d": int(basis.shape[0]),
        "k": int(basis.shape[1]),
        "mean": [float(v) for v in model.mean],
        "basis": [[float(v) for v in basis[:, j]] for j in range(basis.shape[1])],
        "spectrum": [float(v) for v in model.spectrum],
        "centered": True,
    }
    if isinstance(model, SlceModel):
        doc["n_classes"] = int(model.n_classes)
        doc["trace_ctc"] = float(model.trace_ctc)
        doc["positive_count"] = int(model.positive_count)
    else:
        doc["aux"] = model.aux
    return doc


def model_from_dict(doc):
    method = doc.get("method")
    if method not in METHODS:
        raise ValueError(f"unknown model method {method!r}")
    d, k = int(doc["d"]), int(doc["k"])
    basis = np.array(doc["basis"], dtype=float).T if k else np.zeros((d, 0))
    if basis.shape != (d, k):
        raise ValueError(f"basis shape {basis.shape} disagrees with d={d}, k={k}")
    mean = np.array(doc["mean"], dtype=float)
    spectrum = np.array(doc["spectrum"], dtype=float)
    if method == "slce":
        return SlceModel(
            basis=basis,
            spectrum=spectrum,
            mean=mean,
            n_classes=int(doc["n_classes"]),
            trace_ctc=float(doc["trace_ctc"]),
            positive_count=int(doc["positive_count"]),
        )
    return LinearReducer(
        method=method,
        basis=basis,
        spectrum=spectrum,
        mean=mean,
        aux=dict(doc.get("aux", {})),
    )


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
