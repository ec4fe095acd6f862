"""Model persistence: self-describing JSON documents.

Serialization is canonical (sorted keys, fixed indent, shortest float
repr), so equal models produce byte-identical files, and floats survive a
round trip exactly, which makes reloaded models prediction-exact.
"""

from __future__ import annotations

import json
from dataclasses import replace

import numpy as np

from slm.ensemble import BoostModel, ForestModel
from slm.probsearch import ProbSearchParams
from slm.pso import SwarmConfig
from slm.tree import LeafNode, SlmTree, SplitNode, TreeConfig

FORMAT = "slm-model"
VERSION = 1


def _floats(values) -> list[float]:
    return [float(v) for v in values]


def _node_to_dict(node):
    if isinstance(node, LeafNode):
        d = {"type": "leaf", "n_samples": int(node.n_samples)}
        if node.distribution is not None:
            d["distribution"] = _floats(node.distribution)
        else:
            d["value"] = float(node.value)
        return d
    return {
        "type": "split",
        "dims": [int(v) for v in node.dims],
        "coeffs": _floats(node.coeffs),
        "threshold": float(node.threshold),
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(d):
    if d["type"] == "leaf":
        dist = d.get("distribution")
        return LeafNode(
            n_samples=int(d["n_samples"]),
            distribution=None if dist is None else np.array(dist, dtype=np.float64),
            value=None if "value" not in d else float(d["value"]),
        )
    if d["type"] == "split":
        return SplitNode(
            dims=np.array(d["dims"], dtype=np.int64),
            coeffs=np.array(d["coeffs"], dtype=np.float64),
            threshold=float(d["threshold"]),
            left=_node_from_dict(d["left"]),
            right=_node_from_dict(d["right"]),
        )
    raise ValueError(f"unknown node type {d.get('type')!r}")


def _config_to_dict(cfg: TreeConfig) -> dict:
    p = cfg.prob
    s = cfg.swarm
    return {
        "search": cfg.search,
        "top_n": cfg.top_n,
        "max_depth": cfg.max_depth,
        "min_split": cfg.min_split,
        "min_leaf": cfg.min_leaf,
        "purity_tol": float(cfg.purity_tol),
        "mse_tol": float(cfg.mse_tol),
        "bins": cfg.bins,
        "seed": cfg.seed,
        "prob": {
            "range_scale": float(p.range_scale),
            "range_decay": float(p.range_decay),
            "select_decay": float(p.select_decay),
            "max_active": p.max_active,
            "n_candidates": p.n_candidates,
            "n_keep": p.n_keep,
            "max_cosine": float(p.max_cosine),
        },
        "swarm": {
            "dim": s.dim,
            "population": s.population,
            "max_iter": s.max_iter,
            "omega": float(s.omega),
            "c1": float(s.c1),
            "c2": float(s.c2),
            "bounds": [float(s.bounds[0]), float(s.bounds[1])],
            "vmax": None if s.vmax is None else float(s.vmax),
            "adaptive": s.adaptive,
            "seed": s.seed,
            "patience": s.patience,
        },
    }


def _config_from_dict(d: dict) -> TreeConfig:
    p = d["prob"]
    s = d["swarm"]
    return TreeConfig(
        search=d["search"],
        top_n=int(d["top_n"]),
        max_depth=int(d["max_depth"]),
        min_split=int(d["min_split"]),
        min_leaf=int(d["min_leaf"]),
        purity_tol=float(d["purity_tol"]),
        mse_tol=float(d["mse_tol"]),
        bins=int(d["bins"]),
        seed=int(d["seed"]),
        prob=ProbSearchParams(
            range_scale=float(p["range_scale"]),
            range_decay=float(p["range_decay"]),
            select_decay=float(p["select_decay"]),
            max_active=int(p["max_active"]),
            n_candidates=int(p["n_candidates"]),
            n_keep=int(p["n_keep"]),
            max_cosine=float(p["max_cosine"]),
        ),
        swarm=SwarmConfig(
            dim=int(s["dim"]),
            population=int(s["population"]),
            max_iter=int(s["max_iter"]),
            omega=float(s["omega"]),
            c1=float(s["c1"]),
            c2=float(s["c2"]),
            bounds=(float(s["bounds"][0]), float(s["bounds"][1])),
            vmax=None if s["vmax"] is None else float(s["vmax"]),
            adaptive=bool(s["adaptive"]),
            seed=int(s["seed"]),
            patience=None if s["patience"] is None else int(s["patience"]),
        ),
    )


def _tree_to_dict(tree: SlmTree) -> dict:
    return {
        "task": tree.task,
        "n_features": tree.n_features,
        "n_classes": tree.n_classes,
        "config": _config_to_dict(tree.config),
        "root": _node_to_dict(tree.root),
    }


def _tree_from_dict(d: dict) -> SlmTree:
    return SlmTree(
        root=_node_from_dict(d["root"]),
        task=d["task"],
        n_features=int(d["n_features"]),
        n_classes=int(d["n_classes"]),
        config=_config_from_dict(d["config"]),
    )


def model_to_dict(model) -> dict:
    """Serializable document for a tree, forest, or boost model."""
    doc = {"format": FORMAT, "version": VERSION}
    if isinstance(model, SlmTree):
        doc["kind"] = "tree"
        doc["tree"] = _tree_to_dict(model)
    elif isinstance(model, ForestModel):
        doc["kind"] = "forest"
        doc.update(
            {
                "task": model.task,
                "n_features": model.n_features,
                "n_classes": model.n_classes,
                "bootstrap": model.bootstrap,
                "seed": model.seed,
                "trees": [_tree_to_dict(t) for t in model.trees],
            }
        )
    elif isinstance(model, BoostModel):
        doc["kind"] = "boost"
        base = model.base_score
        doc.update(
            {
                "task": model.task,
                "n_features": model.n_features,
                "n_classes": model.n_classes,
                "learning_rate": float(model.learning_rate),
                "base_score": _floats(base) if np.ndim(base) else float(base),
                "train_losses": _floats(model.train_losses),
                "stages": [
                    [_tree_to_dict(t) for t in stage]
                    if isinstance(stage, (list, tuple))
                    else _tree_to_dict(stage)
                    for stage in model.stages
                ],
            }
        )
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    return doc


def model_from_dict(doc: dict):
    if doc.get("format") != FORMAT:
        raise ValueError(f"not a {FORMAT} document")
    if doc.get("version") != VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    kind = doc.get("kind")
    if kind == "tree":
        return _tree_from_dict(doc["tree"])
    if kind == "forest":
        return ForestModel(
            trees=[_tree_from_dict(t) for t in doc["trees"]],
            task=doc["task"],
            n_features=int(doc["n_features"]),
            n_classes=int(doc["n_classes"]),
            bootstrap=bool(doc["bootstrap"]),
            seed=int(doc["seed"]),
        )
    if kind == "boost":
        task = doc["task"]
        if task == "classification":
            stages = [[_tree_from_dict(t) for t in stage] for stage in doc["stages"]]
            base = np.array(doc["base_score"], dtype=np.float64)
        else:
            stages = [_tree_from_dict(stage) for stage in doc["stages"]]
            base = float(doc["base_score"])
        return BoostModel(
            stages=stages,
            base_score=base,
            learning_rate=float(doc["learning_rate"]),
            task=task,
            n_features=int(doc["n_features"]),
            n_classes=int(doc["n_classes"]),
            train_losses=tuple(float(v) for v in doc["train_losses"]),
        )
    raise ValueError(f"unknown model kind {kind!r}")


def dumps_model(model) -> str:
    """Canonical JSON text for a model."""
    return json.dumps(model_to_dict(model), sort_keys=True, indent=2) + "\n"


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_model(model))


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    return model_from_dict(doc)
