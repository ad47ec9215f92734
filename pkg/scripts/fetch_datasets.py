#!/usr/bin/env python3
"""Optional downloader for the external benchmark datasets.

Nothing in the test suite requires network access: the two dataset-dependent
acceptance tests skip when these files are absent. Run this script once to
enable them.

  python scripts/fetch_datasets.py arcene   # -> data/arcene/
  python scripts/fetch_datasets.py mnist    # -> data/mnist/
"""

import os
import sys
import urllib.request

ROOT = os.path.join(os.path.dirname(__file__), "..", "data")

ARCENE_BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases/arcene/ARCENE"
ARCENE_FILES = [
    ("arcene_train.data", f"{ARCENE_BASE}/arcene_train.data"),
    ("arcene_train.labels", f"{ARCENE_BASE}/arcene_train.labels"),
    ("arcene_valid.data", f"{ARCENE_BASE}/arcene_valid.data"),
    (
        "arcene_valid.labels",
        "https://archive.ics.uci.edu/ml/machine-learning-databases/arcene/arcene_valid.labels",
    ),
]

MNIST_BASE = "https://pjreddie.com/media/files"
MNIST_FILES = [
    ("mnist_train.csv", f"{MNIST_BASE}/mnist_train.csv"),
    ("mnist_test.csv", f"{MNIST_BASE}/mnist_test.csv"),
]


def fetch(name, files):
    target = os.path.join(ROOT, name)
    os.makedirs(target, exist_ok=True)
    for filename, url in files:
        dest = os.path.join(target, filename)
        if os.path.exists(dest):
            print(f"already present: {dest}")
            continue
        print(f"downloading {url}")
        urllib.request.urlretrieve(url, dest)
        print(f"  -> {dest}")


def main():
    wanted = sys.argv[1:] or ["arcene", "mnist"]
    for name in wanted:
        if name == "arcene":
            fetch("arcene", ARCENE_FILES)
        elif name == "mnist":
            fetch("mnist", MNIST_FILES)
        else:
            raise SystemExit(f"unknown dataset {name!r}; choose arcene or mnist")


if __name__ == "__main__":
    main()
