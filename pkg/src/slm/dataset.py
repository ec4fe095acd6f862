"""Dataset container, synthetic generators, CSV I/O and train/test splitting.

Generators are pure functions of (name, n_samples, noise, seed).  CSV files
are comma-separated with a header row; floats are written with `repr` so a
write/read round trip recovers the exact same bits.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

TASKS = ("classification", "regression")


@dataclass(frozen=True)
class Dataset:
    """Immutable feature matrix plus targets for one learning task.

    Classification targets are contiguous integer labels starting at 0.
    `n_classes` is inferred from the labels when not given; subsets of a
    larger dataset pass it explicitly so the parent encoding survives even
    when a class is absent from the subset.
    """

    features: np.ndarray
    targets: np.ndarray
    feature_names: tuple[str, ...]
    task: str
    n_classes: int = field(default=0)

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError(f"features must be a non-empty 2-D matrix, got shape {X.shape}")
        if not np.isfinite(X).all():
            raise ValueError("features contain NaN or Inf")
        if self.task not in TASKS:
            raise ValueError(f"task must be one of {TASKS}, got {self.task!r}")
        if len(self.feature_names) != X.shape[1]:
            raise ValueError("feature_names length does not match feature count")

        if self.task == "classification":
            y = np.ascontiguousarray(np.asarray(self.targets, dtype=np.int64))
            if y.ndim != 1 or y.shape[0] != X.shape[0]:
                raise ValueError("targets length does not match sample count")
            if y.min() < 0:
                raise ValueError("class labels must be non-negative")
            if self.n_classes == 0:
                c = int(y.max()) + 1
                if len(np.unique(y)) != c:
                    raise ValueError("class labels must be contiguous integers starting at 0")
                object.__setattr__(self, "n_classes", c)
            elif y.max() >= self.n_classes:
                raise ValueError("class label out of range for declared n_classes")
        else:
            y = np.ascontiguousarray(np.asarray(self.targets, dtype=np.float64))
            if y.ndim != 1 or y.shape[0] != X.shape[0]:
                raise ValueError("targets length does not match sample count")
            if not np.isfinite(y).all():
                raise ValueError("regression targets contain NaN or Inf")
            object.__setattr__(self, "n_classes", 0)

        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "feature_names", tuple(str(n) for n in self.feature_names))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def take(self, rows: np.ndarray) -> "Dataset":
        """Row subset keeping task and label encoding."""
        return Dataset(
            self.features[rows],
            self.targets[rows],
            self.feature_names,
            self.task,
            self.n_classes,
        )


@dataclass(frozen=True)
class SplitSpec:
    """Deterministic train/test split: same spec + dataset => same partition."""

    test_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test_fraction must be in (0, 1), got {self.test_fraction}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def _class_sizes(n_samples: int, n_classes: int) -> list[int]:
    base, extra = divmod(n_samples, n_classes)
    return [base + (1 if c < extra else 0) for c in range(n_classes)]


def _moon_pair(sizes, rng, noise, y_shift=0.0):
    # one "two moons" pair; deterministic arc spacing, gaussian jitter
    n0, n1 = sizes
    t0 = np.linspace(0.0, np.pi, n0)
    t1 = np.linspace(0.0, np.pi, n1)
    upper = np.column_stack([np.cos(t0), np.sin(t0) + y_shift])
    lower = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1) + y_shift])
    X = np.vstack([upper, lower])
    if noise > 0.0:
        X = X + rng.normal(0.0, noise, X.shape)
    y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    return X, y


def _gen_moons2(n, noise, rng):
    X, y = _moon_pair(_class_sizes(n, 2), rng, noise)
    return X, y, "classification"


def _gen_moons4(n, noise, rng):
    sizes = _class_sizes(n, 4)
    Xa, ya = _moon_pair(sizes[:2], rng, noise, y_shift=0.0)
    Xb, yb = _moon_pair(sizes[2:], rng, noise, y_shift=2.0)
    return np.vstack([Xa, Xb]), np.concatenate([ya, yb + 2]), "classification"


def _gen_circle_ring(n, noise, rng):
    n0, n1 = _class_sizes(n, 2)
    # uniform over the disc r<=0.5 and the annulus 0.8<=r<=1.0
    r0 = 0.5 * np.sqrt(rng.random(n0))
    a0 = 2.0 * np.pi * rng.random(n0)
    r1 = np.sqrt(0.8**2 + (1.0**2 - 0.8**2) * rng.random(n1))
    a1 = 2.0 * np.pi * rng.random(n1)
    X = np.column_stack(
        [
            np.concatenate([r0 * np.cos(a0), r1 * np.cos(a1)]),
            np.concatenate([r0 * np.sin(a0), r1 * np.sin(a1)]),
        ]
    )
    if noise > 0.0:
        X = X + rng.normal(0.0, noise, X.shape)
    y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    return X, y, "classification"


def _gen_friedman1(n, noise, rng):
    X = rng.random((n, 10))
    y = (
        10.0 * np.sin(np.pi * X[:, 0] * X[:, 1])
        + 20.0 * (X[:, 2] - 0.5) ** 2
        + 10.0 * X[:, 3]
        + 5.0 * X[:, 4]
    )
    if noise > 0.0:
        y = y + rng.normal(0.0, noise, n)
    return X, y, "regression"


def _friedman_inputs(n, rng):
    X = np.empty((n, 4))
    X[:, 0] = 100.0 * rng.random(n)
    X[:, 1] = 40.0 * np.pi + (560.0 * np.pi - 40.0 * np.pi) * rng.random(n)
    X[:, 2] = rng.random(n)
    X[:, 3] = 1.0 + 10.0 * rng.random(n)
    return X


def _gen_friedman2(n, noise, rng):
    X = _friedman_inputs(n, rng)
    y = np.sqrt(X[:, 0] ** 2 + (X[:, 1] * X[:, 2] - 1.0 / (X[:, 1] * X[:, 3])) ** 2)
    if noise > 0.0:
        y = y + rng.normal(0.0, noise, n)
    return X, y, "regression"


def _gen_friedman3(n, noise, rng):
    X = _friedman_inputs(n, rng)
    y = np.arctan((X[:, 1] * X[:, 2] - 1.0 / (X[:, 1] * X[:, 3])) / X[:, 0])
    if noise > 0.0:
        y = y + rng.normal(0.0, noise, n)
    return X, y, "regression"


GENERATORS = {
    "circle-and-ring": _gen_circle_ring,
    "moons-2": _gen_moons2,
    "moons-4": _gen_moons4,
    "friedman1": _gen_friedman1,
    "friedman2": _gen_friedman2,
    "friedman3": _gen_friedman3,
}


def generate(name: str, n_samples: int, noise: float = 0.0, seed: int = 0) -> Dataset:
    """Build one of the named synthetic datasets.

    Parameters
    ----------
    name : one of circle-and-ring, moons-2, moons-4, friedman1/2/3.
    n_samples : total sample count, >= 10.
    noise : standard deviation of additive Gaussian noise.
    seed : RNG seed; same arguments always produce the same dataset.
    """
    if name not in GENERATORS:
        raise ValueError(f"unknown dataset {name!r}; known: {sorted(GENERATORS)}")
    if n_samples < 10:
        raise ValueError(f"n_samples must be >= 10, got {n_samples}")
    if noise < 0.0:
        raise ValueError("noise must be non-negative")
    rng = np.random.default_rng(seed)
    X, y, task = GENERATORS[name](n_samples, noise, rng)
    names = tuple(f"x{i}" for i in range(X.shape[1]))
    return Dataset(X, y, names, task)


def load_csv(path, target_column: str = "target", task: str = "classification") -> Dataset:
    """Load a dataset from a headered CSV file.

    Non-target columns must be numeric.  Classification targets may be any
    strings or numbers; they are re-encoded to 0..C-1 in order of first
    appearance.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        if target_column not in header:
            raise ValueError(f"{path}: target column {target_column!r} not found")
        tgt = header.index(target_column)
        feature_names = tuple(h for i, h in enumerate(header) if i != tgt)

        rows: list[list[float]] = []
        raw_targets: list[str] = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(rec)}")
            vals = []
            for i, cell in enumerate(rec):
                if i == tgt:
                    continue
                try:
                    vals.append(float(cell))
                except ValueError:
                    raise ValueError(
                        f"{path}:{lineno}: non-numeric value {cell!r} in column {header[i]!r}"
                    ) from None
            rows.append(vals)
            raw_targets.append(rec[tgt])

    if not rows:
        raise ValueError(f"{path}: no data rows")
    X = np.array(rows, dtype=np.float64)

    if task == "classification":
        encoding: dict[str, int] = {}
        y = np.empty(len(raw_targets), dtype=np.int64)
        for i, lab in enumerate(raw_targets):
            if lab not in encoding:
                encoding[lab] = len(encoding)
            y[i] = encoding[lab]
    elif task == "regression":
        try:
            y = np.array([float(v) for v in raw_targets], dtype=np.float64)
        except ValueError:
            raise ValueError(f"{path}: non-numeric regression target") from None
    else:
        raise ValueError(f"task must be one of {TASKS}, got {task!r}")

    return Dataset(X, y, feature_names, task)


def save_csv(ds: Dataset, path, target_column: str = "target") -> None:
    """Write a dataset to CSV; floats keep exact round-trip precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.feature_names) + [target_column])
        for i in range(ds.n_samples):
            row = [repr(float(v)) for v in ds.features[i]]
            if ds.task == "classification":
                row.append(str(int(ds.targets[i])))
            else:
                row.append(repr(float(ds.targets[i])))
            writer.writerow(row)


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Partition into train/test; stratified per class for classification."""
    rng = np.random.default_rng(spec.seed)
    n = ds.n_samples
    test_idx: list[np.ndarray] = []
    if ds.task == "classification":
        for c in range(ds.n_classes):
            members = np.flatnonzero(ds.targets == c)
            if members.size == 0:
                continue
            k = round(members.size * spec.test_fraction)
            test_idx.append(rng.permutation(members)[:k])
    else:
        k = round(n * spec.test_fraction)
        test_idx.append(rng.permutation(n)[:k])

    test_rows = np.sort(np.concatenate(test_idx)) if test_idx else np.empty(0, dtype=np.int64)
    mask = np.zeros(n, dtype=bool)
    mask[test_rows] = True
    train_rows = np.flatnonzero(~mask)
    if train_rows.size == 0 or test_rows.size == 0:
        raise ValueError(
            f"test_fraction {spec.test_fraction} leaves an empty partition for N={n}"
        )
    return ds.take(train_rows), ds.take(test_rows)
