"""Bagged forests and gradient-boosted ensembles of oblique trees."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from slm.dataset import Dataset
from slm.tree import SlmTree, TreeConfig, build


@dataclass(frozen=True)
class ForestModel:
    """Bootstrap-bagged trees; majority vote or mean prediction."""

    trees: list[SlmTree]
    task: str
    n_features: int
    n_classes: int
    bootstrap: bool
    seed: int

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if self.task == "classification":
            votes = np.stack([t.predict(X) for t in self.trees])
            out = np.empty(X.shape[0], dtype=np.int64)
            for j in range(X.shape[0]):
                out[j] = np.argmax(np.bincount(votes[:, j], minlength=self.n_classes))
        else:
            out = np.mean(np.stack([t.predict(X) for t in self.trees]), axis=0)
        return out[0] if single else out

    def predict_proba(self, X):
        """Mean of per-tree leaf distributions."""
        if self.task != "classification":
            raise ValueError("predict_proba is only defined for classification")
        return np.mean(np.stack([t.predict_proba(X) for t in self.trees]), axis=0)


@dataclass(frozen=True)
class BoostModel:
    """Stagewise additive model: base score plus shrunken tree corrections.

    Regression stages are single trees fit to residuals; classification
    stages hold one tree per class fit to (one_hot - softmax) residuals,
    read out through argmax of the additive scores.
    """

    stages: list
    base_score: float | np.ndarray
    learning_rate: float
    task: str
    n_features: int
    n_classes: int
    train_losses: tuple[float, ...]

    def decision_scores(self, X):
        """Additive raw scores before the readout."""
        X = np.asarray(X, dtype=np.float64)
        if self.task == "classification":
            F = np.tile(np.asarray(self.base_score, dtype=np.float64), (X.shape[0], 1))
            for stage in self.stages:
                for c, t in enumerate(stage):
                    F[:, c] += self.learning_rate * t.predict(X)
        else:
            F = np.full(X.shape[0], float(self.base_score))
            for t in self.stages:
                F += self.learning_rate * t.predict(X)
        return F

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        scores = self.decision_scores(X)
        out = np.argmax(scores, axis=1) if self.task == "classification" else scores
        return out[0] if single else out


def predict_ensemble(model, x):
    """Prediction for either ensemble kind; mirrors model.predict."""
    return model.predict(x)


def _tree_seed(ss: np.random.SeedSequence) -> int:
    return int(ss.generate_state(1)[0])


def fit_forest(
    ds: Dataset,
    cfg: TreeConfig | None = None,
    n_trees: int = 30,
    bootstrap: bool = True,
    seed: int | None = None,
) -> ForestModel:
    """Train n_trees trees, each on its own bootstrap resample.

    Per-tree seeds derive from the forest seed, so results are reproducible
    and independent of evaluation parallelism.
    """
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    cfg = cfg if cfg is not None else TreeConfig()
    forest_seed = cfg.seed if seed is None else seed

    trees = []
    for child in np.random.SeedSequence(forest_seed).spawn(n_trees):
        boot_ss, tree_ss = child.spawn(2)
        if bootstrap:
            rng = np.random.default_rng(boot_ss)
            rows = rng.integers(0, ds.n_samples, ds.n_samples)
        else:
            rows = np.arange(ds.n_samples)
        trees.append(build(ds, rows, replace(cfg, seed=_tree_seed(tree_ss))))

    return ForestModel(
        trees=trees,
        task=ds.task,
        n_features=ds.n_features,
        n_classes=ds.n_classes,
        bootstrap=bootstrap,
        seed=forest_seed,
    )


def _softmax(F):
    z = F - F.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def fit_boost(
    ds: Dataset,
    cfg: TreeConfig | None = None,
    n_trees: int = 30,
    learning_rate: float = 0.1,
    seed: int | None = None,
    stage_depth: int | None = 4,
) -> BoostModel:
    """Gradient boosting with squared error (regression) or one-vs-all
    log-loss (classification).

    Stage trees are regression trees of depth stage_depth (None keeps the
    config's max_depth).  Stagewise training loss is recorded on the model.
    """
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    if not 0.0 < learning_rate <= 1.0:
        raise ValueError("learning_rate must be in (0, 1]")
    cfg = cfg if cfg is not None else TreeConfig()
    if stage_depth is not None:
        cfg = replace(cfg, max_depth=stage_depth)
    boost_seed = cfg.seed if seed is None else seed
    root_ss = np.random.SeedSequence(boost_seed)

    X = ds.features
    losses: list[float] = []

    if ds.task == "regression":
        y = ds.targets
        base = float(np.mean(y))
        F = np.full(ds.n_samples, base)
        stages: list[SlmTree] = []
        for stage_ss in root_ss.spawn(n_trees):
            resid = y - F
            stage_ds = Dataset(X, resid, ds.feature_names, "regression")
            t = build(stage_ds, None, replace(cfg, seed=_tree_seed(stage_ss)))
            F = F + learning_rate * t.predict(X)
            stages.append(t)
            losses.append(float(np.mean((y - F) ** 2)))
        return BoostModel(
            stages=stages,
            base_score=base,
            learning_rate=learning_rate,
            task="regression",
            n_features=ds.n_features,
            n_classes=0,
            train_losses=tuple(losses),
        )

    y = ds.targets
    C = ds.n_classes
    onehot = np.zeros((ds.n_samples, C))
    onehot[np.arange(ds.n_samples), y] = 1.0
    prior = np.bincount(y, minlength=C) / ds.n_samples
    base = np.log(np.clip(prior, 1e-12, None))
    F = np.tile(base, (ds.n_samples, 1))
    cstages: list[list[SlmTree]] = []
    for stage_ss in root_ss.spawn(n_trees):
        P = _softmax(F)
        stage: list[SlmTree] = []
        for c, class_ss in enumerate(stage_ss.spawn(C)):
            resid = onehot[:, c] - P[:, c]
            stage_ds = Dataset(X, resid, ds.feature_names, "regression")
            t = build(stage_ds, None, replace(cfg, seed=_tree_seed(class_ss)))
            F[:, c] += learning_rate * t.predict(X)
            stage.append(t)
        cstages.append(stage)
        P = _softmax(F)
        losses.append(float(-np.mean(np.log(np.clip(P[np.arange(ds.n_samples), y], 1e-12, None)))))

    return BoostModel(
        stages=cstages,
        base_score=base,
        learning_rate=learning_rate,
        task="classification",
        n_features=ds.n_features,
        n_classes=C,
        train_losses=tuple(losses),
    )
