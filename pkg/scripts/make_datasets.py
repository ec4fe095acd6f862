"""Export the bundled benchmark datasets to data/*.csv.

Uses scikit-learn's packaged copies (a dev-only dependency); the library
itself never imports sklearn.  Feature values and targets are written with
exact round-trip precision, so re-running this script is byte-stable.
"""

import os
import sys

import numpy as np
from sklearn.datasets import load_breast_cancer, load_diabetes, load_iris, load_wine

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from slm.dataset import Dataset, save_csv

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "data")

LOADERS = {
    "iris": (load_iris, "classification"),
    "wine": (load_wine, "classification"),
    "breast_cancer": (load_breast_cancer, "classification"),
    "diabetes": (load_diabetes, "regression"),
}


def main() -> int:
    os.makedirs(OUT_DIR, exist_ok=True)
    for name, (loader, task) in sorted(LOADERS.items()):
        bunch = loader()
        names = tuple(str(n).replace(" ", "_") for n in bunch.feature_names)
        y = bunch.target.astype(np.int64 if task == "classification" else np.float64)
        ds = Dataset(bunch.data, y, names, task)
        path = os.path.join(OUT_DIR, f"{name}.csv")
        save_csv(ds, path)
        print(f"{name}: {ds.n_samples} x {ds.n_features} ({task}) -> {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
