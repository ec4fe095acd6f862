"""Command-line interface: generate, train, eval, bench.

Run configurations live in flat `key = value` files; command-line flags
override file values.  Exit codes: 0 success, 2 bad usage, 1 runtime error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, fields, replace

import numpy as np

from slm import config as worker_config
from slm import io as model_io
from slm.dataset import GENERATORS, Dataset, SplitSpec, generate, load_csv, save_csv, split
from slm.ensemble import fit_boost, fit_forest
from slm.probsearch import ProbSearchParams
from slm.pso import SwarmConfig
from slm.tree import SlmTree, TreeConfig, build

MODEL_KINDS = ("slm", "slm-forest", "slm-boost", "slr", "slr-forest", "slr-boost")


class UsageError(Exception):
    """Bad flags or config contents; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """One training run, as written to and read from a config file."""

    dataset: str | None = None
    csv: str | None = None
    target: str = "target"
    n_samples: int = 1000
    noise: float = 0.1
    test_fraction: float = 0.2
    model: str = "slm"
    search: str = "apso"
    seed: int = 0
    trees: int = 30
    workers: int | None = None
    learning_rate: float = 0.1
    stage_depth: int = 4
    bootstrap: bool = True
    top_n: int = 10
    max_depth: int = 10
    min_split: int = 10
    min_leaf: int = 2
    purity_tol: float = 0.01
    mse_tol: float = 1e-12
    bins: int = 32
    candidates: int = 512
    keep: int = 1
    population: int = 30
    iterations: int = 110
    repetitions: int = 3
    out: str | None = None

    @property
    def task(self) -> str:
        return "classification" if self.model.startswith("slm") else "regression"

    def tree_config(self) -> TreeConfig:
        return TreeConfig(
            search=self.search,
            top_n=self.top_n,
            max_depth=self.max_depth,
            min_split=self.min_split,
            min_leaf=self.min_leaf,
            purity_tol=self.purity_tol,
            mse_tol=self.mse_tol,
            bins=self.bins,
            seed=self.seed,
            prob=ProbSearchParams(n_candidates=self.candidates, n_keep=self.keep),
            swarm=SwarmConfig(dim=1, population=self.population, max_iter=self.iterations),
        )


def _encode_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _decode_value(name: str, text: str):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    if name not in kinds:
        raise UsageError(f"unknown config key {name!r}")
    kind = kinds[name]
    text = text.strip()
    if text == "none":
        if "None" not in kind:
            raise UsageError(f"config key {name!r} cannot be none")
        return None
    if kind.startswith("bool"):
        if text not in ("true", "false"):
            raise UsageError(f"config key {name!r} must be true or false, got {text!r}")
        return text == "true"
    try:
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(text)
    except ValueError:
        raise UsageError(f"config key {name!r} has invalid value {text!r}") from None
    return text


def parse_kv_file(path) -> dict[str, str]:
    """Flat `key = value` lines; '#' starts a comment; blank lines skipped."""
    out: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
                key, _, val = line.partition("=")
                out[key.strip()] = val.strip()
    except OSError as e:
        raise UsageError(f"cannot read config file: {e}") from None
    return out


def load_run_config(path) -> RunConfig:
    cfg = RunConfig()
    values = {k: _decode_value(k, v) for k, v in parse_kv_file(path).items()}
    return replace(cfg, **values)


def save_run_config(cfg: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for f in fields(RunConfig):
            fh.write(f"{f.name} = {_encode_value(getattr(cfg, f.name))}\n")


def _resolve_run_config(args) -> RunConfig:
    cfg = load_run_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {}
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            overrides[f.name] = v
    if getattr(args, "no_bootstrap", False):
        overrides["bootstrap"] = False
    cfg = replace(cfg, **overrides)
    if cfg.model not in MODEL_KINDS:
        raise UsageError(f"model must be one of {MODEL_KINDS}, got {cfg.model!r}")
    if (cfg.dataset is None) == (cfg.csv is None):
        raise UsageError("exactly one of --dataset or --csv is required")
    return cfg


def _load_training_data(cfg: RunConfig) -> Dataset:
    if cfg.csv is not None:
        return load_csv(cfg.csv, target_column=cfg.target, task=cfg.task)
    if cfg.dataset not in GENERATORS:
        raise UsageError(f"unknown dataset {cfg.dataset!r}; known: {sorted(GENERATORS)}")
    ds = generate(cfg.dataset, cfg.n_samples, cfg.noise, cfg.seed)
    if ds.task != cfg.task:
        raise UsageError(
            f"dataset {cfg.dataset!r} is a {ds.task} set but model {cfg.model!r} "
            f"expects {cfg.task}"
        )
    return ds


def _train_model(cfg: RunConfig, train: Dataset):
    tree_cfg = cfg.tree_config()
    if cfg.model.endswith("-forest"):
        return fit_forest(train, tree_cfg, n_trees=cfg.trees, bootstrap=cfg.bootstrap)
    if cfg.model.endswith("-boost"):
        return fit_boost(
            train,
            tree_cfg,
            n_trees=cfg.trees,
            learning_rate=cfg.learning_rate,
            stage_depth=cfg.stage_depth,
        )
    return build(train, None, tree_cfg)


def _metric(model, ds: Dataset) -> tuple[str, float]:
    pred = model.predict(ds.features)
    if ds.task == "classification":
        return "accuracy", float(np.mean(pred == ds.targets))
    return "mse", float(np.mean((pred - ds.targets) ** 2))


def cmd_generate(args) -> int:
    ds = generate(args.name, args.n_samples, args.noise, args.seed)
    save_csv(ds, args.out)
    print(f"dataset = {args.name}")
    print(f"samples = {ds.n_samples}")
    print(f"features = {ds.n_features}")
    print(f"task = {ds.task}")
    print(f"out = {args.out}")
    return 0


def cmd_train(args) -> int:
    cfg = _resolve_run_config(args)
    if cfg.workers is not None:
        worker_config.set_num_workers(cfg.workers)
    ds = _load_training_data(cfg)
    train, test = split(ds, SplitSpec(cfg.test_fraction, cfg.seed))

    t0 = time.perf_counter()
    model = _train_model(cfg, train)
    elapsed = time.perf_counter() - t0

    name, train_val = _metric(model, train)
    _, test_val = _metric(model, test)
    print(f"model = {cfg.model}")
    print(f"search = {cfg.search}")
    print(f"train_samples = {train.n_samples}")
    print(f"test_samples = {test.n_samples}")
    print(f"train_{name} = {train_val!r}")
    print(f"test_{name} = {test_val!r}")
    print(f"train_seconds = {elapsed:.3f}")
    if cfg.out:
        model_io.save_model(model, cfg.out)
        print(f"out = {cfg.out}")
    if args.save_split:
        save_csv(train, f"{args.save_split}.train.csv", target_column=cfg.target)
        save_csv(test, f"{args.save_split}.test.csv", target_column=cfg.target)
        print(f"split = {args.save_split}.train.csv {args.save_split}.test.csv")
    return 0


def _load_eval_data(model, path, target: str) -> Dataset:
    task = model.task
    ds = load_csv(path, target_column=target, task=task)
    if task == "classification":
        # integer labels are trusted as class ids so the encoding matches
        # training; anything else falls back to first-appearance encoding
        raw = _raw_target_column(path, target)
        try:
            ids = np.array([int(v) for v in raw], dtype=np.int64)
        except ValueError:
            return ds
        if ids.min() < 0 or ids.max() >= model.n_classes:
            raise ValueError(
                f"label out of range for model with {model.n_classes} classes"
            )
        return Dataset(ds.features, ids, ds.feature_names, task, model.n_classes)
    return ds


def _raw_target_column(path, target: str) -> list[str]:
    import csv as _csv

    with open(path, newline="", encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        header = next(reader)
        idx = header.index(target)
        return [rec[idx] for rec in reader if rec]


def cmd_eval(args) -> int:
    model = model_io.load_model(args.model_path)
    ds = _load_eval_data(model, args.data_path, args.target)
    if ds.n_features != model.n_features:
        raise ValueError(
            f"model expects {model.n_features} features, data has {ds.n_features}"
        )
    pred = model.predict(ds.features)
    if ds.task == "classification":
        name, value = "accuracy", float(np.mean(pred == ds.targets))
    else:
        name, value = "mse", float(np.mean((pred - ds.targets) ** 2))
    print(f"samples = {ds.n_samples}")
    print(f"{name} = {value!r}")
    if args.predictions:
        with open(args.predictions, "w", encoding="utf-8") as fh:
            fh.write("prediction\n")
            for v in pred:
                fh.write(f"{int(v)}\n" if ds.task == "classification" else f"{float(v)!r}\n")
        print(f"predictions = {args.predictions}")
    return 0


BENCH_LIST_KEYS = ("datasets", "models", "searches", "workers_list")


def _parse_bench_config(path) -> tuple[dict, RunConfig]:
    values = parse_kv_file(path)
    matrix = {
        "datasets": ["moons-2"],
        "models": ["slm"],
        "searches": ["apso"],
        "workers_list": [1],
    }
    base = RunConfig()
    run_overrides = {}
    for key, val in values.items():
        if key in BENCH_LIST_KEYS:
            parts = [p.strip() for p in val.split(",") if p.strip()]
            if not parts:
                raise UsageError(f"bench key {key!r} needs at least one entry")
            matrix[key] = [int(p) for p in parts] if key == "workers_list" else parts
        else:
            run_overrides[key] = _decode_value(key, val)
    return matrix, replace(base, **run_overrides)


def cmd_bench(args) -> int:
    matrix, base = _parse_bench_config(args.config)
    for m in matrix["models"]:
        if m not in MODEL_KINDS:
            raise UsageError(f"model must be one of {MODEL_KINDS}, got {m!r}")

    rows = []
    for ds_name in matrix["datasets"]:
        for model_kind in matrix["models"]:
            for search in matrix["searches"]:
                for workers in matrix["workers_list"]:
                    cfg = replace(
                        base,
                        dataset=ds_name,
                        csv=None,
                        model=model_kind,
                        search=search,
                        workers=workers,
                    )
                    worker_config.set_num_workers(workers)
                    ds = _load_training_data(cfg)
                    train, _ = split(ds, SplitSpec(cfg.test_fraction, cfg.seed))
                    times = []
                    for _ in range(max(1, cfg.repetitions)):
                        t0 = time.perf_counter()
                        _train_model(cfg, train)
                        times.append(time.perf_counter() - t0)
                    iterations = cfg.iterations if search == "apso" else cfg.candidates
                    rows.append(
                        {
                            "dataset": ds_name,
                            "model": model_kind,
                            "search": search,
                            "workers": workers,
                            "iterations": iterations,
                            "median_seconds": float(np.median(times)),
                        }
                    )
    worker_config.set_num_workers(None)

    header = ["dataset", "model", "search", "workers", "iterations", "median_seconds"]
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join(["---"] * len(header)) + "|"]
    for r in rows:
        lines.append(
            "| "
            + " | ".join(
                [r["dataset"], r["model"], r["search"], str(r["workers"]),
                 str(r["iterations"]), f"{r['median_seconds']:.4f}"]
            )
            + " |"
        )
    report = "\n".join(lines)
    print(report)

    if args.out:
        import csv as _csv
        import os

        os.makedirs(args.out, exist_ok=True)
        with open(f"{args.out}/bench.md", "w", encoding="utf-8") as fh:
            fh.write(report + "\n")
        with open(f"{args.out}/bench.csv", "w", newline="", encoding="utf-8") as fh:
            writer = _csv.DictWriter(fh, fieldnames=header)
            writer.writeheader()
            writer.writerows(rows)
        print(f"out = {args.out}/bench.md {args.out}/bench.csv")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slm",
        description="Oblique decision trees with probabilistic or particle-swarm split search.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset to CSV")
    g.add_argument("name", choices=sorted(GENERATORS))
    g.add_argument("--n-samples", type=int, default=1000)
    g.add_argument("--noise", type=float, default=0.1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("train", help="train a model and report metrics")
    t.add_argument("--config", help="key = value file; flags override it")
    t.add_argument("--dataset", help="synthetic dataset name")
    t.add_argument("--csv", help="training data CSV path")
    t.add_argument("--target", help="CSV target column (default: target)")
    t.add_argument("--model", choices=MODEL_KINDS)
    t.add_argument("--search", choices=("prob", "apso"))
    t.add_argument("--seed", type=int)
    t.add_argument("--trees", type=int)
    t.add_argument("--workers", type=int)
    t.add_argument("--n-samples", type=int, dest="n_samples")
    t.add_argument("--noise", type=float)
    t.add_argument("--test-fraction", type=float, dest="test_fraction")
    t.add_argument("--learning-rate", type=float, dest="learning_rate")
    t.add_argument("--stage-depth", type=int, dest="stage_depth")
    t.add_argument("--no-bootstrap", action="store_true")
    t.add_argument("--top-n", type=int, dest="top_n")
    t.add_argument("--max-depth", type=int, dest="max_depth")
    t.add_argument("--min-split", type=int, dest="min_split")
    t.add_argument("--min-leaf", type=int, dest="min_leaf")
    t.add_argument("--purity-tol", type=float, dest="purity_tol")
    t.add_argument("--mse-tol", type=float, dest="mse_tol")
    t.add_argument("--bins", type=int)
    t.add_argument("--candidates", type=int)
    t.add_argument("--keep", type=int)
    t.add_argument("--population", type=int)
    t.add_argument("--iterations", type=int)
    t.add_argument("--out", help="model JSON path")
    t.add_argument("--save-split", dest="save_split", help="write PREFIX.{train,test}.csv")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="evaluate a saved model on a CSV")
    e.add_argument("model_path")
    e.add_argument("data_path")
    e.add_argument("--target", default="target")
    e.add_argument("--predictions", help="write per-row predictions to this CSV")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="run a timing matrix from a config file")
    b.add_argument("--config", required=True)
    b.add_argument("--out", help="directory for bench.md and bench.csv")
    b.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # runtime failures map to exit 1
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
