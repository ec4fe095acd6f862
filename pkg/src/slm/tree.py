"""Oblique tree construction and prediction.

Each internal node projects a sample onto a learned direction over a few
informative feature dimensions and routes it by comparing the projection
to a threshold (>= goes right).  Directions come from probabilistic
sampling or from an adaptive particle swarm, per node configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from slm.dataset import Dataset
from slm.dft import (
    DftRanking,
    Projected1D,
    SplitRecord,
    best_split,
    evaluate_candidates,
    node_impurity,
    rank_dimensions,
)
from slm.probsearch import ProbSearchParams, diverse_indices, sample_projection
from slm.pso import SwarmConfig, optimize

SEARCH_MODES = ("prob", "apso")


@dataclass(frozen=True)
class TreeConfig:
    """Stopping rules plus the per-node split-search configuration.

    top_n caps how many of the best-ranked dimensions the split search
    sees at each node (clamped to the usable dimension count).
    """

    search: str = "apso"
    top_n: int = 10
    max_depth: int = 10
    min_split: int = 10
    min_leaf: int = 2
    purity_tol: float = 0.01
    mse_tol: float = 1e-12
    bins: int = 32
    prob: ProbSearchParams = field(default_factory=ProbSearchParams)
    swarm: SwarmConfig = field(default_factory=lambda: SwarmConfig(dim=1))
    seed: int = 0

    def __post_init__(self):
        mode = {"prob": "prob", "probabilistic": "prob", "apso": "apso"}.get(self.search)
        if mode is None:
            raise ValueError(f"search must be one of {SEARCH_MODES}, got {self.search!r}")
        object.__setattr__(self, "search", mode)
        if self.top_n < 1:
            raise ValueError("top_n must be >= 1")
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        if self.min_split < 2 * self.min_leaf:
            raise ValueError("min_split must be >= 2 * min_leaf")
        if not 0.0 <= self.purity_tol < 1.0:
            raise ValueError("purity_tol must be in [0, 1)")
        if self.mse_tol < 0.0:
            raise ValueError("mse_tol must be >= 0")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class LeafNode:
    """Terminal node: class distribution or mean target of its samples."""

    n_samples: int
    distribution: np.ndarray | None = None
    value: float | None = None


@dataclass(frozen=True)
class SplitNode:
    """Binary routing node: x goes right iff x[dims] . coeffs >= threshold."""

    dims: np.ndarray
    coeffs: np.ndarray
    threshold: float
    left: "SplitNode | LeafNode"
    right: "SplitNode | LeafNode"


@dataclass(frozen=True)
class SlmTree:
    root: SplitNode | LeafNode
    task: str
    n_features: int
    n_classes: int
    config: TreeConfig

    def predict(self, X):
        """Predicted class ids (or values) for a sample or a batch."""
        X, single = _as_batch(X, self.n_features)
        if self.task == "classification":
            out = np.empty(X.shape[0], dtype=np.int64)
            _route_label(self.root, X, np.arange(X.shape[0]), out)
        else:
            out = np.empty(X.shape[0], dtype=np.float64)
            _route_value(self.root, X, np.arange(X.shape[0]), out)
        return out[0] if single else out

    def predict_proba(self, X):
        """Routed leaf class distributions; rows sum to 1."""
        if self.task != "classification":
            raise ValueError("predict_proba is only defined for classification trees")
        X, single = _as_batch(X, self.n_features)
        out = np.empty((X.shape[0], self.n_classes), dtype=np.float64)
        _route_proba(self.root, X, np.arange(X.shape[0]), out)
        return out[0] if single else out

    @property
    def n_leaves(self) -> int:
        return sum(1 for n in _walk(self.root) if isinstance(n, LeafNode))

    @property
    def depth(self) -> int:
        def d(node):
            if isinstance(node, LeafNode):
                return 0
            return 1 + max(d(node.left), d(node.right))

        return d(self.root)


def _as_batch(X, n_features):
    X = np.asarray(X, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} features, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("inputs contain NaN or Inf")
    return X, single


def _walk(node):
    yield node
    if isinstance(node, SplitNode):
        yield from _walk(node.left)
        yield from _walk(node.right)


def _route_masks(node: SplitNode, X, idx):
    scores = X[idx][:, node.dims] @ node.coeffs
    right = scores >= node.threshold
    return idx[~right], idx[right]


def _route_label(node, X, idx, out):
    if idx.size == 0:
        return
    if isinstance(node, LeafNode):
        out[idx] = int(np.argmax(node.distribution))
        return
    left_idx, right_idx = _route_masks(node, X, idx)
    _route_label(node.left, X, left_idx, out)
    _route_label(node.right, X, right_idx, out)


def _route_value(node, X, idx, out):
    if idx.size == 0:
        return
    if isinstance(node, LeafNode):
        out[idx] = node.value
        return
    left_idx, right_idx = _route_masks(node, X, idx)
    _route_value(node.left, X, left_idx, out)
    _route_value(node.right, X, right_idx, out)


def _route_proba(node, X, idx, out):
    if idx.size == 0:
        return
    if isinstance(node, LeafNode):
        out[idx] = node.distribution
        return
    left_idx, right_idx = _route_masks(node, X, idx)
    _route_proba(node.left, X, left_idx, out)
    _route_proba(node.right, X, right_idx, out)


def build(ds: Dataset, rows: np.ndarray | None = None, cfg: TreeConfig | None = None) -> SlmTree:
    """Grow a tree on the given rows (all rows when omitted).

    Nodes stop splitting at max_depth, below min_split samples, when pure
    enough (majority fraction >= 1 - purity_tol, or MSE <= mse_tol), or
    when the search finds no split strictly better than leaving the node
    alone.  Identical (dataset, rows, cfg) always builds the identical
    tree, for any worker count.
    """
    cfg = cfg if cfg is not None else TreeConfig()
    if rows is None:
        rows = np.arange(ds.n_samples, dtype=np.int64)
    else:
        rows = np.asarray(rows, dtype=np.int64)
        if rows.size == 0:
            raise ValueError("empty row subset")
        if rows.min() < 0 or rows.max() >= ds.n_samples:
            raise ValueError("row index out of range")
    root = _build_node(ds, rows, cfg, 0, np.random.SeedSequence(cfg.seed))
    return SlmTree(root, ds.task, ds.n_features, ds.n_classes, cfg)


def _make_leaf(ds: Dataset, y: np.ndarray) -> LeafNode:
    if ds.task == "classification":
        dist = np.bincount(y, minlength=ds.n_classes) / y.size
        return LeafNode(n_samples=int(y.size), distribution=dist)
    return LeafNode(n_samples=int(y.size), value=float(np.mean(y)))


def _build_node(ds, rows, cfg, depth, ss):
    y = ds.targets[rows]
    n = rows.size

    if depth >= cfg.max_depth or n < cfg.min_split:
        return _make_leaf(ds, y)
    if ds.task == "classification":
        counts = np.bincount(y, minlength=ds.n_classes)
        if counts.max() / n >= 1.0 - cfg.purity_tol:
            return _make_leaf(ds, y)
        parent = node_impurity(y, "classification")
    else:
        parent = node_impurity(y, "regression")
        if parent <= cfg.mse_tol:
            return _make_leaf(ds, y)

    ranking = rank_dimensions(ds, rows, bins=cfg.bins, min_leaf=cfg.min_leaf)
    usable = ranking.order[np.isfinite(ranking.losses[ranking.order])]
    if usable.size == 0:
        return _make_leaf(ds, y)
    ranking_top = DftRanking(ranking.losses, usable[: min(cfg.top_n, usable.size)])

    search_ss = ss.spawn(1)[0]
    if cfg.search == "apso":
        winners = _search_apso(ds, rows, ranking_top, cfg, search_ss, parent)
    else:
        winners = _search_prob(ds, rows, ranking_top, cfg, search_ss)
    winners = [(v, r) for v, r in winners if not r.degenerate and r.loss < parent]
    if not winners:
        return _make_leaf(ds, y)

    return _expand(ds, rows, winners, cfg, depth, ss, parent)


def _node_scores(ds, rows, vec):
    support = np.flatnonzero(vec)
    return ds.features[rows][:, support] @ vec[support]


def _expand(ds, rows, winners, cfg, depth, ss, parent_impurity):
    """Turn accepted winners into nested binary splits.

    The first winner splits the node.  Each later winner re-splits the
    highest-impurity pending cell it improves (re-thresholded on that
    cell's rows), so k accepted winners carve the node into k+1 cells.
    Pending cells then recurse through the normal build.
    """
    vec, rec = winners[0]
    frag = _split_cell(ds, rows, vec, rec, depth)
    cells = [frag.left, frag.right]

    for vec, _ in winners[1:]:
        cells.sort(key=lambda c: -c.impurity)
        placed = None
        for cell in cells:
            if cell.depth >= cfg.max_depth or cell.rows.size < cfg.min_split:
                continue
            scores = _node_scores(ds, cell.rows, vec)
            rec = best_split(
                Projected1D(scores, ds.targets[cell.rows], ds.task, ds.n_classes),
                bins=cfg.bins,
                min_leaf=cfg.min_leaf,
            )
            if rec.degenerate or rec.loss >= cell.impurity:
                continue
            placed = (cell, _split_cell(ds, cell.rows, vec, rec, cell.depth))
            break
        if placed is None:
            continue
        cell, sub = placed
        cell.split = sub
        cells.remove(cell)
        cells.extend([sub.left, sub.right])

    return _finalize(ds, frag, cfg, ss)


class _Cell:
    """Pending subset of rows awaiting either a winner split or recursion."""

    def __init__(self, ds, rows, depth):
        self.rows = rows
        self.depth = depth
        self.impurity = node_impurity(ds.targets[rows], ds.task)
        self.split: "_Frag | None" = None


class _Frag:
    def __init__(self, vec, threshold, left, right):
        self.vec = vec
        self.threshold = threshold
        self.left = left
        self.right = right


def _split_cell(ds, rows, vec, rec, depth) -> _Frag:
    scores = _node_scores(ds, rows, vec)
    right = scores >= rec.threshold
    return _Frag(
        vec,
        _center_threshold(scores, right, rec.threshold),
        _Cell(ds, rows[~right], depth + 1),
        _Cell(ds, rows[right], depth + 1),
    )


def _center_threshold(scores, right, fallback: float) -> float:
    """Midpoint of the margin between the two sides' nearest scores.

    Routes every training score exactly as `fallback` does, but sits
    centered in the gap, which generalizes better than a threshold hugging
    one side.  Falls back when rounding collapses the midpoint onto the
    left side.
    """
    left_max = float(scores[~right].max())
    right_min = float(scores[right].min())
    mid = 0.5 * (left_max + right_min)
    if left_max < mid <= right_min:
        return mid
    return float(fallback)


def _finalize(ds, frag: _Frag, cfg, ss):
    support = np.flatnonzero(frag.vec)

    def resolve(cell: _Cell):
        if cell.split is not None:
            return _finalize(ds, cell.split, cfg, ss)
        return _build_node(ds, cell.rows, cfg, cell.depth, ss.spawn(1)[0])

    left = resolve(frag.left)
    right = resolve(frag.right)
    return SplitNode(
        dims=support,
        coeffs=frag.vec[support],
        threshold=float(frag.threshold),
        left=left,
        right=right,
    )


def _search_prob(ds, rows, ranking_top, cfg, search_ss):
    rng = np.random.default_rng(search_ss)
    params = cfg.prob
    vectors = [sample_projection(ranking_top, params, rng) for _ in range(params.n_candidates)]

    dims = ranking_top.order
    Xsub = np.ascontiguousarray(ds.features[rows][:, dims])
    y = ds.targets[rows]
    A = np.stack([v.coeffs for v in vectors])
    proj = A[:, dims] @ Xsub.T

    plist = [Projected1D(proj[j], y, ds.task, ds.n_classes) for j in range(len(vectors))]
    records = evaluate_candidates(plist, bins=cfg.bins, min_leaf=cfg.min_leaf)
    losses = np.array([np.inf if r.degenerate else r.loss for r in records])
    picked = diverse_indices(vectors, losses, params.n_keep, params.max_cosine)
    return [(vectors[i].coeffs, records[i]) for i in picked]


def _search_apso(ds, rows, ranking_top, cfg, search_ss, parent_impurity):
    dims = ranking_top.order
    Xsub = np.ascontiguousarray(ds.features[rows][:, dims])
    y = ds.targets[rows]
    swarm_cfg = replace(cfg.swarm, dim=int(dims.size), seed=int(search_ss.generate_state(1)[0]))

    def batch_loss(positions):
        norms = np.linalg.norm(positions, axis=1)
        ok = norms > 0.0
        losses = np.full(positions.shape[0], parent_impurity)
        if not ok.any():
            return losses
        P = positions[ok] / norms[ok][:, None]
        proj = P @ Xsub.T
        plist = [
            Projected1D(proj[j], y, ds.task, ds.n_classes) for j in range(proj.shape[0])
        ]
        records = evaluate_candidates(plist, bins=cfg.bins, min_leaf=cfg.min_leaf)
        vals = [parent_impurity if r.degenerate else r.loss for r in records]
        losses[np.flatnonzero(ok)] = vals
        return losses

    result = optimize(None, swarm_cfg, batch_loss=batch_loss)
    if result.loss >= parent_impurity:
        return []

    a = result.position / np.linalg.norm(result.position)
    rec = best_split(
        Projected1D(Xsub @ a, y, ds.task, ds.n_classes),
        bins=cfg.bins,
        min_leaf=cfg.min_leaf,
    )
    full = np.zeros(ds.n_features, dtype=np.float64)
    full[dims] = a
    return [(full, rec)]


def predict(tree: SlmTree, x):
    """Module-level convenience mirroring SlmTree.predict."""
    return tree.predict(x)


def predict_proba(tree: SlmTree, x):
    """Module-level convenience mirroring SlmTree.predict_proba."""
    return tree.predict_proba(x)
