"""Command-line frontend: fit / transform / eval / bench / spectrum / embed.

Models travel between subcommands as JSON files so each pipeline step is
independently inspectable. Exit codes: 0 success, 1 user error (flags or
data), 2 internal numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from slce.baselines import METHODS, fit_bair_spca, fit_hsic_spca, fit_lda, fit_pca
from slce.dataset import load_csv, standardize
from slce.harness import (
    SCHEMA_VERSION,
    align_labels,
    config_from_file,
    emit_accuracy_curves,
    emit_embedding,
    emit_spectrum_diagnostics,
    run_experiment,
    save_report,
)
from slce.knn import accuracy, knn_predict
from slce.model import fit_slce, transform
from slce.serialize import load_model, save_model


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; the CLI contract reserves 2 for numerical failure."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _bool(text):
    lowered = str(text).lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _fraction_list(text):
    return tuple(float(tok) for tok in str(text).split(",") if tok.strip())


def _add_data_flags(sub):
    sub.add_argument("--label-col", default="last",
                     help="label column: a header name, an index, or 'last' (default)")
    sub.add_argument("--header", type=_bool, default=True, metavar="true|false",
                     help="whether the CSV starts with a header row (default true)")
    sub.add_argument("--standardize", action="store_true",
                     help="z-score each feature before fitting (off by default)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="slce", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a reducer and save it as JSON")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--data", required=True, help="training CSV (samples as rows)")
    p.add_argument("--dim", required=True, type=int, help="embedding dimension k (>= 1)")
    p.add_argument("--out", required=True, help="output model JSON path")
    p.add_argument("--shrinkage", type=float, default=1e-4,
                   help="lda within-scatter shrinkage in [0, 1] (default 1e-4)")
    p.add_argument("--bair-grid", type=_fraction_list, default=(0.01, 0.05, 0.1, 0.25, 0.5, 1.0),
                   metavar="F1,F2,...", help="bair_spca feature-fraction grid")
    p.add_argument("--cv-folds", type=int, default=5, help="bair_spca cross-validation folds")
    p.add_argument("--seed", type=int, default=0, help="seed for any randomized step")
    _add_data_flags(p)

    p = sub.add_parser("transform", help="project a CSV through a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="output embedding CSV")
    _add_data_flags(p)

    p = sub.add_parser("eval", help="nearest-neighbor accuracy of a model on a test CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--knn", type=int, default=5, help="neighbor count (default 5)")
    _add_data_flags(p)

    p = sub.add_parser("bench", help="run a benchmark config and save the report")
    p.add_argument("--config", required=True, help="experiment config (.toml or .json)")
    p.add_argument("--out", required=True, help="output report JSON")
    p.add_argument("--curves", help="also write a long-format accuracy CSV here")
    p.add_argument("--svg", help="also write an accuracy-vs-dimension SVG chart")
    p.add_argument("--jobs", type=int, default=1, help="repetitions to run concurrently")

    p = sub.add_parser("spectrum", help="write eigenvalue/cost diagnostics for a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--top", type=int, help="how many leading eigenvalues to keep")
    _add_data_flags(p)

    p = sub.add_parser("embed", help="write train/test embedding coordinates from a model")
    p.add_argument("--model", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--svg", help="optional scatter SVG (dim 2 or 3)")
    _add_data_flags(p)

    return parser


def _load(args, attr="data"):
    ds = load_csv(getattr(args, attr), label_column=args.label_col, header=args.header)
    if getattr(args, "standardize", False):
        ds = standardize(ds)
    return ds


def _cmd_fit(args):
    ds = _load(args)
    if args.method == "slce":
        model = fit_slce(ds, args.dim)
    elif args.method == "pca":
        model = fit_pca(ds, args.dim)
    elif args.method == "lda":
        model = fit_lda(ds, args.dim, shrinkage=args.shrinkage)
    elif args.method == "bair_spca":
        model = fit_bair_spca(ds, args.dim, threshold_grid=args.bair_grid,
                              cv_folds=args.cv_folds, seed=args.seed)
    else:
        model = fit_hsic_spca(ds, args.dim)
    save_model(model, args.out)
    print(f"fitted {args.method} (dim {args.dim}) on {ds.n} samples x {ds.d} features -> {args.out}")
    return 0


def _cmd_transform(args):
    model = load_model(args.model)
    ds = _load(args)
    coords = transform(model, ds.data)
    lines = [f"# schema_version: {SCHEMA_VERSION}"]
    lines.append(",".join(f"coord_{i + 1}" for i in range(coords.shape[0])) + ",label_token")
    for col in range(coords.shape[1]):
        values = ",".join(repr(float(v)) for v in coords[:, col])
        lines.append(f"{values},{ds.label_tokens[ds.labels[col]]}")
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"projected {ds.n} samples to dim {coords.shape[0]} -> {args.out}")
    return 0


def _cmd_eval(args):
    model = load_model(args.model)
    train = _load(args, "train")
    test = align_labels(train, _load(args, "test"))
    emb_train = transform(model, train.data)
    emb_test = transform(model, test.data)
    preds = knn_predict(emb_train, train.labels, emb_test, args.knn)
    acc = accuracy(preds, test.labels)
    correct = round(acc * test.n)
    print(f"{args.knn}-NN accuracy: {acc:.4f} ({correct}/{test.n} correct, embedding dim {emb_train.shape[0]})")
    return 0


def _cmd_bench(args):
    config = config_from_file(args.config)
    report = run_experiment(config, jobs=args.jobs)
    save_report(report, args.out)
    if args.curves:
        emit_accuracy_curves(report, args.curves, svg_path=args.svg)
    elif args.svg:
        emit_accuracy_curves(report, args.svg + ".csv", svg_path=args.svg)
    print(f"benchmark on {config.dataset}: {config.repetitions} repetition(s), "
          f"wall clock {report.wall_clock_seconds:.2f}s -> {args.out}")
    for cell in report.cells:
        if cell.mean is None:
            print(f"  {cell.method} dim {cell.dim}: all {cell.failures} repetition(s) failed")
        else:
            line = f"  {cell.method} dim {cell.dim}: {cell.mean:.4f} +/- {cell.std:.4f}"
            if cell.failures:
                line += f" ({cell.failures} failed)"
            print(line)
    return 0


def _cmd_spectrum(args):
    ds = _load(args)
    diag = emit_spectrum_diagnostics(ds, args.out, top=args.top)
    print(f"wrote {len(diag['system'])} eigenvalue rows -> {args.out}")
    return 0


def _cmd_embed(args):
    model = load_model(args.model)
    train = _load(args, "train")
    test = align_labels(train, _load(args, "test"))
    table = emit_embedding(model, train, test, args.dim, args.out, svg_path=args.svg)
    print(f"embedded {table.coordinates.shape[1]} points at dim {table.dim} -> {args.out}")
    return 0


_COMMANDS = {
    "fit": _cmd_fit,
    "transform": _cmd_transform,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
    "spectrum": _cmd_spectrum,
    "embed": _cmd_embed,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numerical / internal failure
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
