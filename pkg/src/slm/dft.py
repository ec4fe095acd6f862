"""Score 1-D projections by the impurity of their best binary split.

A projection's quality is the weighted impurity of the best threshold split,
where candidate thresholds are the interior edges of a uniform partition of
the projected range.  Classification impurity is Shannon entropy in bits;
regression impurity is mean squared error around the side mean.  Lower is
better; 0 means the split separates perfectly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from slm import _kernels, config
from slm.dataset import TASKS, Dataset


@dataclass(frozen=True)
class Projected1D:
    """Projected sample values paired with their targets."""

    values: np.ndarray
    targets: np.ndarray
    task: str
    n_classes: int = field(default=0)

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if v.ndim != 1:
            raise ValueError("values must be 1-D")
        if not np.isfinite(v).all():
            raise ValueError("projected values contain NaN or Inf")
        if self.task not in TASKS:
            raise ValueError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.task == "classification":
            t = np.ascontiguousarray(np.asarray(self.targets, dtype=np.int64))
            if t.size and t.min() < 0:
                raise ValueError("class labels must be non-negative")
            if self.n_classes == 0 and t.size:
                object.__setattr__(self, "n_classes", int(t.max()) + 1)
        else:
            t = np.ascontiguousarray(np.asarray(self.targets, dtype=np.float64))
            if t.size and not np.isfinite(t).all():
                raise ValueError("regression targets contain NaN or Inf")
        if t.shape[0] != v.shape[0]:
            raise ValueError("values and targets lengths differ")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "targets", t)


@dataclass(frozen=True)
class SplitRecord:
    """Outcome of a threshold search over one projection.

    A degenerate record (constant values, or too few samples for min_leaf)
    carries loss=inf so it sorts after every real split.
    """

    threshold: float
    loss: float
    left_count: int
    right_count: int
    degenerate: bool = False


DEGENERATE = SplitRecord(threshold=math.nan, loss=math.inf, left_count=0, right_count=0, degenerate=True)


@dataclass(frozen=True)
class DftRanking:
    """Per-dimension split losses and the dimension order sorted by them."""

    losses: np.ndarray
    order: np.ndarray

    def __post_init__(self):
        losses = np.asarray(self.losses, dtype=np.float64)
        order = np.asarray(self.order, dtype=np.int64)
        if order.ndim != 1 or losses.ndim != 1:
            raise ValueError("losses and order must be 1-D")
        if order.size > losses.size or len(np.unique(order)) != order.size:
            raise ValueError("order must hold unique dimension indices")
        if order.size and (order.min() < 0 or order.max() >= losses.size):
            raise ValueError("order index out of range")
        object.__setattr__(self, "losses", losses)
        object.__setattr__(self, "order", order)

    def top(self, n: int) -> "DftRanking":
        """Ranking restricted to the n best dimensions."""
        if n < 1:
            raise ValueError("n must be >= 1")
        return DftRanking(self.losses, self.order[:n])


def _entropy_bits(labels: np.ndarray) -> float:
    n = labels.size
    h = 0.0
    for cnt in np.bincount(labels):
        if cnt:
            p = cnt / n
            h = h - p * math.log2(p)
    return float(h)


def _mse(values: np.ndarray) -> float:
    return float(np.mean((values - np.mean(values)) ** 2))


def node_impurity(targets, task: str) -> float:
    """Impurity of an unsplit sample set: entropy (bits) or MSE."""
    if task == "classification":
        y = np.asarray(targets, dtype=np.int64)
        if y.size == 0:
            raise ValueError("empty targets")
        return _entropy_bits(y)
    if task == "regression":
        y = np.asarray(targets, dtype=np.float64)
        if y.size == 0:
            raise ValueError("empty targets")
        return _mse(y)
    raise ValueError(f"task must be one of {TASKS}, got {task!r}")


def dft_loss(left_targets, right_targets, task: str) -> float:
    """Weighted impurity of a two-way partition.

    An empty side contributes zero with zero weight.  This is the loss that
    `best_split` minimizes over candidate thresholds.
    """
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}, got {task!r}")
    dtype = np.int64 if task == "classification" else np.float64
    left = np.asarray(left_targets, dtype=dtype)
    right = np.asarray(right_targets, dtype=dtype)
    nl = left.size
    nr = right.size
    n = nl + nr
    if n == 0:
        raise ValueError("both sides empty")
    impurity = _entropy_bits if task == "classification" else _mse
    loss = 0.0
    if nl:
        loss = loss + (nl / n) * impurity(left)
    if nr:
        loss = loss + (nr / n) * impurity(right)
    return float(loss)


def candidate_edges(lo: float, hi: float, bins: int) -> np.ndarray:
    """Interior edges of the uniform `bins`-way partition of [lo, hi].

    These are exactly the candidate thresholds `best_split` scans, in
    ascending order.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    width = hi - lo
    return np.array([lo + (k * width) / bins for k in range(1, bins)], dtype=np.float64)


def best_split(p: Projected1D, bins: int = 32, min_leaf: int = 1) -> SplitRecord:
    """Best threshold for one projection; degenerate record if none exists.

    Samples with value >= threshold go right.  Ties in loss resolve to the
    smallest threshold.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if min_leaf < 1:
        raise ValueError(f"min_leaf must be >= 1, got {min_leaf}")
    n = p.values.shape[0]
    if n == 0:
        raise ValueError("empty projection")
    if n < 2 * min_leaf:
        return DEGENERATE
    if p.task == "classification":
        thr, loss, nl, nr, found = _kernels.split_classification(
            p.values, p.targets, p.n_classes, bins, min_leaf
        )
    else:
        thr, loss, nl, nr, found = _kernels.split_regression(p.values, p.targets, bins, min_leaf)
    if not found:
        return DEGENERATE
    return SplitRecord(float(thr), float(loss), int(nl), int(nr))


def evaluate_candidates(
    projections: list[Projected1D],
    bins: int = 32,
    min_leaf: int = 1,
    workers: int | None = None,
) -> list[SplitRecord]:
    """Run best_split over many projections, in parallel when workers > 1.

    Work is pre-assigned as evenly sized contiguous ranges, one per worker,
    and each worker writes into its own result slots, so the output order
    and content never depend on thread scheduling.
    """
    if not projections:
        raise ValueError("no projections to evaluate")
    w = config.get_num_workers() if workers is None else workers
    if w < 1:
        raise ValueError(f"workers must be >= 1, got {w}")

    out: list[SplitRecord | None] = [None] * len(projections)

    def run_range(start: int, stop: int) -> None:
        for i in range(start, stop):
            out[i] = best_split(projections[i], bins=bins, min_leaf=min_leaf)

    if w == 1 or len(projections) == 1:
        run_range(0, len(projections))
    else:
        bounds = np.linspace(0, len(projections), w + 1).astype(np.int64)
        pool = config.get_pool(w)
        futures = [
            pool.submit(run_range, int(bounds[j]), int(bounds[j + 1]))
            for j in range(w)
            if bounds[j] < bounds[j + 1]
        ]
        for f in futures:
            f.result()
    return out  # type: ignore[return-value]


def rank_dimensions(
    ds: Dataset,
    rows: np.ndarray | None = None,
    bins: int = 32,
    min_leaf: int = 1,
    workers: int | None = None,
) -> DftRanking:
    """Rank raw feature dimensions by their best-split loss, ascending.

    Degenerate dimensions get loss=inf and sort last.  Equal losses keep
    ascending dimension order.
    """
    X = ds.features if rows is None else ds.features[rows]
    y = ds.targets if rows is None else ds.targets[rows]
    if X.shape[0] == 0:
        raise ValueError("no rows to rank")
    projections = [
        Projected1D(np.ascontiguousarray(X[:, d]), y, ds.task, ds.n_classes)
        for d in range(X.shape[1])
    ]
    records = evaluate_candidates(projections, bins=bins, min_leaf=min_leaf, workers=workers)
    losses = np.array([r.loss for r in records], dtype=np.float64)
    order = np.argsort(losses, kind="stable").astype(np.int64)
    return DftRanking(losses, order)
