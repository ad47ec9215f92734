"""Supervised linear centroid-encoder toolkit.

Linear dimensionality reduction that projects samples so their class
centroids are reconstructed as closely as possible, solved in closed form as
a symmetric eigenproblem; plus PCA / LDA / screening-SPCA / dependence-SPCA
baselines and a deterministic 5-NN benchmark harness.
"""

from slce.baselines import (
    METHODS,
    LinearReducer,
    fit_bair_spca,
    fit_hsic_spca,
    fit_lda,
    fit_pca,
)
from slce.dataset import (
    CentroidMatrix,
    LabeledDataset,
    SplitPair,
    center,
    centroid_matrix,
    load_csv,
    split,
    standardize,
)
from slce.harness import (
    EmbeddingTable,
    ExperimentConfig,
    ExperimentReport,
    config_from_file,
    emit_accuracy_curves,
    emit_embedding,
    emit_spectrum_diagnostics,
    run_experiment,
    save_report,
)
from slce.knn import KnnResult, accuracy, knn_evaluate, knn_predict
from slce.linalg import SymmetricEigen, centroid_cost, principal_angles, sym_eig
from slce.model import (
    SlceModel,
    build_system_matrix,
    fit_slce,
    reconstruct,
    training_cost,
    transform,
)
from slce.serialize import load_model, save_model

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "CentroidMatrix",
    "EmbeddingTable",
    "ExperimentConfig",
    "ExperimentReport",
    "KnnResult",
    "LabeledDataset",
    "LinearReducer",
    "SlceModel",
    "SplitPair",
    "SymmetricEigen",
    "accuracy",
    "build_system_matrix",
    "center",
    "centroid_cost",
    "centroid_matrix",
    "config_from_file",
    "emit_accuracy_curves",
    "emit_embedding",
    "emit_spectrum_diagnostics",
    "fit_bair_spca",
    "fit_hsic_spca",
    "fit_lda",
    "fit_pca",
    "fit_slce",
    "knn_evaluate",
    "knn_predict",
    "load_csv",
    "load_model",
    "principal_angles",
    "reconstruct",
    "run_experiment",
    "save_model",
    "save_report",
    "split",
    "standardize",
    "sym_eig",
    "training_cost",
    "transform",
]
