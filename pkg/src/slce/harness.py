"""Benchmark workflow: repeated stratified splits, per-method fits, 5-NN scoring, emitters.

One experiment = one dataset, a method set, an embedding-dimension list, and
R seeded repetitions. Every repetition resplits (unless a fixed test file is
configured), fits each method on the training partition, projects both
partitions, and scores nearest-neighbor accuracy on the test side. Reports
aggregate mean and sample standard deviation per (method, dim) cell; failed
cells are counted explicitly, never silently averaged away.
"""

from __future__ import annotations

import json
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from slce.baselines import METHODS, fit_bair_spca, fit_hsic_spca, fit_lda, fit_pca
from slce.dataset import LabeledDataset, center, centroid_matrix, load_csv, split, standardize
from slce.knn import accuracy, knn_predict
from slce.linalg import eig_via_range, range_basis, sym_eig
from slce.model import SlceModel, build_system_matrix, fit_slce, transform

SCHEMA_VERSION = 1

# Published two-dimensional 5-NN accuracies (percent, mean and std) of the
# low-rank regression-based supervised PCA competitor. Quoted, never
# recomputed; surfaced as static reference rows next to measured results.
LRPCA_REFERENCE = {
    "colon": {"lrpca_cv": (80.80, 10.40), "lrpca_mle": (80.80, 12.50)},
    "ionosphere": {"lrpca_cv": (83.90, 4.20), "lrpca_mle": (85.90, 2.60)},
    "arcene": {"lrpca_cv": (80.67, 11.20), "lrpca_mle": (81.00, 8.40)},
}

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one benchmark run."""

    dataset: str
    methods: tuple = ("slce", "pca")
    dims: tuple = (2, 3, 5, 10, 15, 20)
    split_ratio: float = 0.8
    repetitions: int = 25
    base_seed: int = 0
    knn_k: int = 5
    label_col: str = "last"
    header: bool = True
    standardize: bool = False
    test_dataset: str = None  # fixed train/test partition when set; no resplitting
    reference: str = None     # key into LRPCA_REFERENCE for static comparison rows
    lda_shrinkage: float = 1e-4
    bair_grid: tuple = (0.01, 0.05, 0.1, 0.25, 0.5, 1.0)
    bair_cv_folds: int = 5

    def __post_init__(self):
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "dims", tuple(int(p) for p in self.dims))
        object.__setattr__(self, "bair_grid", tuple(float(f) for f in self.bair_grid))
        if not self.methods:
            raise ValueError("methods must be non-empty")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; choose from {list(METHODS)}")
        if not self.dims or any(p < 1 for p in self.dims):
            raise ValueError("dims must be positive")
        if any(a >= b for a, b in zip(self.dims, self.dims[1:])):
            raise ValueError(f"dims must be strictly ascending, got {self.dims}")
        if not 0.0 < self.split_ratio < 1.0:
            raise ValueError(f"split_ratio must lie in (0, 1), got {self.split_ratio}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.knn_k < 1:
            raise ValueError("knn_k must be >= 1")
        if self.reference is not None and self.reference not in LRPCA_REFERENCE:
            raise ValueError(
                f"unknown reference {self.reference!r}; "
                f"choose from {sorted(LRPCA_REFERENCE)}"
            )


@dataclass
class CellResult:
    """Aggregated accuracies for one (method, dim) cell across repetitions."""

    method: str
    dim: int
    effective_dim: int
    accuracies: list = field(default_factory=list)
    failures: int = 0
    notes: list = field(default_factory=list)

    @property
    def mean(self):
        return float(np.mean(self.accuracies)) if self.accuracies else None

    @property
    def std(self):
        if len(self.accuracies) >= 2:
            return float(np.std(self.accuracies, ddof=1))
        return 0.0 if self.accuracies else None

    def note(self, text):
        if text not in self.notes:
            self.notes.append(text)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    seeds: list
    cells: list
    metadata: dict
    wall_clock_seconds: float


@dataclass(frozen=True)
class EmbeddingTable:
    """Reduced coordinates with labels and train/test partition tags."""

    coordinates: np.ndarray  # dim x (n_train + n_test)
    labels: tuple            # label tokens per point
    partitions: tuple        # "train" or "test" per point
    method: str
    dim: int


def config_from_file(path) -> ExperimentConfig:
    """Read an ExperimentConfig from TOML or JSON (by file extension)."""
    if str(path).endswith(".toml"):
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    else:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    doc.pop("schema_version", None)
    hyper = doc.pop("hyperparameters", {})
    doc.update(hyper)
    fields = set(ExperimentConfig.__dataclass_fields__)
    unknown = sorted(set(doc) - fields)
    if unknown:
        raise ValueError(f"unknown config keys {unknown}")
    if "dataset" not in doc:
        raise ValueError("config must name a dataset")
    return ExperimentConfig(**doc)


def _fit_method(method, train, dim, config, seed):
    if method == "slce":
        return fit_slce(train, dim)
    if method == "pca":
        return fit_pca(train, dim)
    if method == "lda":
        return fit_lda(train, dim, shrinkage=config.lda_shrinkage)
    if method == "bair_spca":
        return fit_bair_spca(
            train, dim,
            threshold_grid=config.bair_grid,
            cv_folds=config.bair_cv_folds,
            seed=seed,
        )
    if method == "hsic_spca":
        return fit_hsic_spca(train, dim)
    raise ValueError(f"unknown method {method!r}")


def align_labels(reference: LabeledDataset, other: LabeledDataset) -> LabeledDataset:
    """Re-encode ``other`` so its integer labels follow ``reference``'s token map."""
    codes = {tok: j for j, tok in enumerate(reference.label_tokens)}
    try:
        relabeled = np.array([codes[other.label_tokens[l]] for l in other.labels])
    except KeyError as exc:
        raise ValueError(f"test set contains unseen class token {exc.args[0]!r}") from None
    return LabeledDataset(
        other.data, relabeled, reference.n_classes, reference.label_tokens
    )


def load_dataset(config: ExperimentConfig) -> LabeledDataset:
    ds = load_csv(config.dataset, label_column=config.label_col, header=config.header)
    if config.standardize:
        ds = standardize(ds)
    return ds


def _run_repetition(config, ds, fixed_test, rep):
    """One seeded repetition; returns {(method, dim): (accuracy | None, eff_dim, notes)}."""
    seed = config.base_seed + rep
    if fixed_test is None:
        pair = split(ds, config.split_ratio, seed)
        train, test = pair.train, pair.test
    else:
        train, test = ds, fixed_test

    out = {}
    for method in config.methods:
        for dim in config.dims:
            notes = []
            eff = dim
            if method == "lda" and dim > train.n_classes - 1:
                eff = train.n_classes - 1
                notes.append(
                    f"dim {dim} capped at n_classes-1 = {eff} for lda"
                )
            try:
                with warnings.catch_warnings(record=True) as caught:
                    warnings.simplefilter("always")
                    model = _fit_method(method, train, eff, config, seed)
                    emb_train = transform(model, train.data)
                    emb_test = transform(model, test.data)
                    preds = knn_predict(emb_train, train.labels, emb_test, config.knn_k)
                    acc = accuracy(preds, test.labels)
                notes.extend(str(w.message) for w in caught)
                out[(method, dim)] = (acc, eff, notes)
            except Exception as exc:
                notes.append(f"rep {rep}: {type(exc).__name__}: {exc}")
                out[(method, dim)] = (None, eff, notes)
    return out


def run_experiment(config: ExperimentConfig, jobs=1) -> ExperimentReport:
    """Execute the full benchmark workflow described by ``config``.

    Deterministic given the config: repetition r uses seed base_seed + r, and
    aggregation folds repetitions in seed order regardless of ``jobs``.
    """
    started = time.perf_counter()
    ds = load_dataset(config)
    fixed_test = None
    if config.test_dataset is not None:
        raw = load_csv(config.test_dataset, label_column=config.label_col, header=config.header)
        if config.standardize:
            raw = standardize(raw)
        fixed_test = align_labels(ds, raw)

    reps = range(config.repetitions)
    if jobs and jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(
                lambda r: _run_repetition(config, ds, fixed_test, r), reps
            ))
    else:
        results = [_run_repetition(config, ds, fixed_test, r) for r in reps]

    cells = []
    for method in config.methods:
        for dim in config.dims:
            cell = CellResult(method=method, dim=dim, effective_dim=dim)
            for rep_result in results:  # seed order
                acc, eff, notes = rep_result[(method, dim)]
                cell.effective_dim = eff
                for text in notes:
                    cell.note(text)
                if acc is None:
                    cell.failures += 1
                else:
                    cell.accuracies.append(acc)
            cells.append(cell)

    metadata = {
        "schema_version": SCHEMA_VERSION,
        "centered": True,
        "stratified": fixed_test is None,
        "fixed_test": fixed_test is not None,
        "std_convention": "sample",
    }
    return ExperimentReport(
        config=config,
        seeds=[config.base_seed + r for r in reps],
        cells=cells,
        metadata=metadata,
        wall_clock_seconds=time.perf_counter() - started,
    )


def report_to_dict(report: ExperimentReport) -> dict:
    """Canonical JSON-ready form; deliberately omits wall-clock so runs are byte-comparable."""
    cfg = report.config
    return {
        "schema_version": SCHEMA_VERSION,
        "config": {
            "dataset": cfg.dataset,
            "methods": list(cfg.methods),
            "dims": list(cfg.dims),
            "split_ratio": cfg.split_ratio,
            "repetitions": cfg.repetitions,
            "base_seed": cfg.base_seed,
            "knn_k": cfg.knn_k,
            "label_col": cfg.label_col,
            "header": cfg.header,
            "standardize": cfg.standardize,
            "test_dataset": cfg.test_dataset,
            "reference": cfg.reference,
            "hyperparameters": {
                "lda_shrinkage": cfg.lda_shrinkage,
                "bair_grid": list(cfg.bair_grid),
                "bair_cv_folds": cfg.bair_cv_folds,
            },
        },
        "seeds": list(report.seeds),
        "metadata": dict(report.metadata),
        "reference_results": [
            {
                "method": name,
                "dim": 2,
                "mean": pct / 100.0,
                "std": spread / 100.0,
                "published_percent": [pct, spread],
                "source": "published",
            }
            for name, (pct, spread) in sorted(
                LRPCA_REFERENCE.get(cfg.reference, {}).items()
            )
        ],
        "results": [
            {
                "method": c.method,
                "dim": c.dim,
                "effective_dim": c.effective_dim,
                "mean": c.mean,
                "std": c.std,
                "accuracies": list(c.accuracies),
                "failures": c.failures,
                "notes": list(c.notes),
            }
            for c in report.cells
        ],
    }


def report_to_json(report: ExperimentReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def save_report(report: ExperimentReport, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(report_to_json(report))


def emit_accuracy_curves(report: ExperimentReport, path, svg_path=None):
    """Long-format CSV of (method, dim, mean, std); failed cells stay visible."""
    lines = [f"# schema_version: {SCHEMA_VERSION}"]
    lines.append("method,dim,mean,std,repetitions,failures,status")
    for c in report.cells:
        if not c.accuracies:
            status = "failed"
            mean_s = std_s = ""
        else:
            status = "partial" if c.failures else "ok"
            mean_s = repr(c.mean)
            std_s = repr(c.std)
        lines.append(
            f"{c.method},{c.dim},{mean_s},{std_s},{len(c.accuracies)},{c.failures},{status}"
        )
    reference = LRPCA_REFERENCE.get(report.config.reference, {})
    for name, (pct, spread) in sorted(reference.items()):
        lines.append(f"{name},2,{pct / 100.0!r},{spread / 100.0!r},0,0,reference")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    if svg_path is not None:
        _svg_curves(report, svg_path)


def emit_embedding(model, ds_train, ds_test, dim, path, svg_path=None) -> EmbeddingTable:
    """Project both partitions to ``dim`` coordinates and write them as CSV."""
    dim = int(dim)
    k = model.basis.shape[1]
    if dim < 1 or dim > k:
        raise ValueError(f"dim must lie in 1..{k} (model rank), got {dim}")
    coords = np.hstack([
        transform(model, ds_train.data)[:dim],
        transform(model, ds_test.data)[:dim],
    ])
    tokens = tuple(
        [ds_train.label_tokens[l] for l in ds_train.labels]
        + [ds_test.label_tokens[l] for l in ds_test.labels]
    )
    partitions = ("train",) * ds_train.n + ("test",) * ds_test.n
    method = "slce" if isinstance(model, SlceModel) else model.method

    lines = [f"# schema_version: {SCHEMA_VERSION}"]
    lines.append(",".join(f"coord_{i + 1}" for i in range(dim)) + ",label_token,partition")
    for col in range(coords.shape[1]):
        values = ",".join(repr(float(v)) for v in coords[:, col])
        lines.append(f"{values},{tokens[col]},{partitions[col]}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    table = EmbeddingTable(
        coordinates=coords, labels=tokens, partitions=partitions, method=method, dim=dim
    )
    if svg_path is not None and dim in (2, 3):
        _svg_scatter(table, svg_path)
    return table


def emit_spectrum_diagnostics(train: LabeledDataset, path, top=None) -> dict:
    """Eigenvalues of the coupling matrix X Ct^T + Ct X^T and of the full system matrix.

    Each row also carries the one-dimensional reconstruction cost
    trace_ctc - mu_i of the corresponding system eigenvector. The coupling
    spectrum dominates the system spectrum index by index.
    """
    centered, _ = center(train)
    Xc = centered.data
    Ct = centroid_matrix(centered).data
    d, n = Xc.shape
    count = int(top) if top is not None else min(d, 2 * train.n_classes + 5)

    if d > 2 * n:
        Q = range_basis(Xc)
        Yr, Cr = Q.T @ Xc, Q.T @ Ct
        coupling_small = Yr @ Cr.T + Cr @ Yr.T
        _, _, coupling = eig_via_range(Q, 0.5 * (coupling_small + coupling_small.T), 0)
        _, _, system = eig_via_range(Q, build_system_matrix(Yr, Cr), 0)
    else:
        coupling_dense = Xc @ Ct.T + Ct @ Xc.T
        coupling = sym_eig(0.5 * (coupling_dense + coupling_dense.T)).eigenvalues
        system = sym_eig(build_system_matrix(Xc, Ct)).eigenvalues

    trace_ctc = float(np.linalg.norm(Ct) ** 2)
    coupling = coupling[:count]
    system = system[:count]
    costs = trace_ctc - system

    lines = [f"# schema_version: {SCHEMA_VERSION}"]
    lines.append("index,coupling_eigenvalue,system_eigenvalue,one_dim_cost")
    for i in range(len(system)):
        lines.append(
            f"{i},{repr(float(coupling[i]))},{repr(float(system[i]))},{repr(float(costs[i]))}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return {
        "coupling": coupling,
        "system": system,
        "one_dim_cost": costs,
        "trace_ctc": trace_ctc,
    }


def _svg_scatter(table: EmbeddingTable, path, width=640, height=480):
    pad = 40
    xs, ys = table.coordinates[0], table.coordinates[1]
    third = table.coordinates[2] if table.dim >= 3 else None
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    sx = (width - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (height - 2 * pad) / ((y1 - y0) or 1.0)
    classes = sorted(set(table.labels))
    color = {tok: _PALETTE[i % len(_PALETTE)] for i, tok in enumerate(classes)}
    if third is not None:
        t0, t1 = float(third.min()), float(third.max())

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="#999"/>',
        f'<text x="{pad}" y="{pad - 12}" font-size="12">'
        f'{table.method} embedding, dim {table.dim} (filled=train, hollow=test)</text>',
    ]
    for i in range(table.coordinates.shape[1]):
        cx = pad + (float(xs[i]) - x0) * sx
        cy = height - pad - (float(ys[i]) - y0) * sy
        c = color[table.labels[i]]
        opacity = 1.0
        if third is not None and t1 > t0:
            opacity = 0.25 + 0.75 * (float(third[i]) - t0) / (t1 - t0)
        if table.partitions[i] == "train":
            parts.append(
                f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="{c}" '
                f'fill-opacity="{opacity:.3f}"/>'
            )
        else:
            parts.append(
                f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="none" stroke="{c}" '
                f'stroke-opacity="{opacity:.3f}"/>'
            )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def _svg_curves(report: ExperimentReport, path, width=640, height=480):
    pad = 50
    cells = [c for c in report.cells if c.accuracies]
    if not cells:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write('<svg xmlns="http://www.w3.org/2000/svg"/>\n')
        return
    dims = sorted(set(c.dim for c in cells))
    methods = [m for m in report.config.methods if any(c.method == m for c in cells)]
    x_of = {p: pad + i * (width - 2 * pad) / max(len(dims) - 1, 1) for i, p in enumerate(dims)}
    y_of = lambda acc: height - pad - acc * (height - 2 * pad)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
        'fill="none" stroke="#999"/>',
    ]
    for p in dims:
        parts.append(
            f'<text x="{x_of[p]:.1f}" y="{height - pad + 16}" font-size="11" '
            f'text-anchor="middle">{p}</text>'
        )
    for tick in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(
            f'<text x="{pad - 6}" y="{y_of(tick):.1f}" font-size="11" '
            f'text-anchor="end">{tick:.2f}</text>'
        )
    for i, method in enumerate(methods):
        pts = [
            (x_of[c.dim], y_of(c.mean))
            for c in cells
            if c.method == method
        ]
        if not pts:
            continue
        c = _PALETTE[i % len(_PALETTE)]
        poly = " ".join(f"{x:.1f},{y:.1f}" for x, y in sorted(pts))
        parts.append(f'<polyline points="{poly}" fill="none" stroke="{c}" stroke-width="2"/>')
        parts.append(
            f'<text x="{width - pad + 4}" y="{pad + 14 * (i + 1)}" font-size="11" '
            f'fill="{c}">{method}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
