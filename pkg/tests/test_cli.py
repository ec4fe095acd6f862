import numpy as np
import pytest

from slm.cli import (
    RunConfig,
    UsageError,
    load_run_config,
    main,
    parse_kv_file,
    save_run_config,
)
from slm.dataset import load_csv
from slm.io import load_model

DATA_DIR = f"{__file__.rsplit('/', 2)[0]}/data"

FAST_TRAIN = [
    "--candidates", "64",
    "--population", "10",
    "--iterations", "20",
]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def stdout_values(out: str) -> dict[str, str]:
    vals = {}
    for line in out.strip().splitlines():
        if " = " in line:
            key, _, val = line.partition(" = ")
            vals[key] = val
    return vals


class TestRunConfigFile:
    def test_round_trip_lossless(self, tmp_path):
        cfg = RunConfig(dataset="moons-2", noise=0.125, seed=7, workers=None,
                        bootstrap=False, out="model.json", mse_tol=1e-9)
        path = tmp_path / "run.conf"
        save_run_config(cfg, path)
        assert load_run_config(path) == cfg

    def test_comments_and_blanks_ignored(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("# a comment\n\nseed = 5  # trailing\nnoise = 0.25\n")
        cfg = load_run_config(path)
        assert cfg.seed == 5
        assert cfg.noise == 0.25

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("learning_rte = 0.1\n")
        with pytest.raises(UsageError, match="unknown config key"):
            load_run_config(path)

    def test_bad_int_rejected(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("seed = soon\n")
        with pytest.raises(UsageError, match="invalid value"):
            load_run_config(path)

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "run.conf"
        path.write_text("seed 5\n")
        with pytest.raises(UsageError, match="key = value"):
            parse_kv_file(path)

    def test_missing_file_rejected(self):
        with pytest.raises(UsageError, match="cannot read"):
            parse_kv_file("/nonexistent/run.conf")


class TestGenerate:
    def test_writes_csv_and_reports(self, capsys, tmp_path):
        out = tmp_path / "m2.csv"
        code, text, _ = run(capsys, "generate", "moons-2",
                            "--n-samples", "120", "--noise", "0.1",
                            "--seed", "3", "--out", str(out))
        assert code == 0
        vals = stdout_values(text)
        assert vals["dataset"] == "moons-2"
        assert vals["samples"] == "120"
        assert vals["task"] == "classification"
        ds = load_csv(out)
        assert ds.n_samples == 120
        assert ds.n_features == 2

    def test_rerun_is_byte_identical(self, capsys, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        argv = ["generate", "friedman1", "--n-samples", "50", "--noise", "0.2", "--seed", "9"]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_name_is_usage_error(self, capsys, tmp_path):
        code, _, _ = run(capsys, "generate", "blobs", "--out", str(tmp_path / "x.csv"))
        assert code == 2


class TestTrain:
    def test_synthetic_reports_metrics(self, capsys, tmp_path):
        out = tmp_path / "model.json"
        code, text, _ = run(capsys, "train", "--dataset", "moons-2",
                            "--n-samples", "300", "--search", "prob",
                            "--seed", "0", "--out", str(out), *FAST_TRAIN)
        assert code == 0
        vals = stdout_values(text)
        assert vals["model"] == "slm"
        assert vals["search"] == "prob"
        assert vals["train_samples"] == "240"
        assert vals["test_samples"] == "60"
        assert 0.9 <= float(vals["test_accuracy"]) <= 1.0
        assert float(vals["train_seconds"]) > 0.0
        assert out.exists()

    def test_bundled_iris_accuracy(self, capsys, tmp_path):
        code, text, _ = run(capsys, "train", "--csv", f"{DATA_DIR}/iris.csv",
                            "--search", "prob", "--seed", "0", *FAST_TRAIN)
        assert code == 0
        vals = stdout_values(text)
        assert 0.9 <= float(vals["test_accuracy"]) <= 1.0

    def test_same_seed_same_model_file(self, capsys, tmp_path):
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        argv = ["train", "--dataset", "moons-2", "--n-samples", "200",
                "--search", "prob", "--seed", "4", *FAST_TRAIN]
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_config_file_with_flag_override(self, capsys, tmp_path):
        conf = tmp_path / "run.conf"
        save_run_config(RunConfig(dataset="moons-2", n_samples=200, search="prob",
                                  candidates=64, population=10, iterations=20,
                                  seed=1), conf)
        code, text, _ = run(capsys, "train", "--config", str(conf), "--seed", "2")
        assert code == 0
        code2, text2, _ = run(capsys, "train", "--config", str(conf))
        assert code2 == 0
        # seed override changes the reported metric trail
        assert stdout_values(text) != stdout_values(text2)

    def test_forest_and_boost_kinds(self, capsys, tmp_path):
        code, text, _ = run(capsys, "train", "--dataset", "moons-2",
                            "--n-samples", "150", "--model", "slm-forest",
                            "--trees", "3", "--search", "prob", *FAST_TRAIN)
        assert code == 0
        assert stdout_values(text)["model"] == "slm-forest"

        code, text, _ = run(capsys, "train", "--dataset", "friedman1",
                            "--n-samples", "150", "--model", "slr-boost",
                            "--trees", "3", "--search", "prob", *FAST_TRAIN)
        assert code == 0
        vals = stdout_values(text)
        assert vals["model"] == "slr-boost"
        assert "test_mse" in vals

    def test_task_mismatch_is_usage_error(self, capsys):
        code, _, err = run(capsys, "train", "--dataset", "friedman1",
                           "--model", "slm", *FAST_TRAIN)
        assert code == 2
        assert "usage error" in err

    def test_both_dataset_and_csv_rejected(self, capsys):
        code, _, err = run(capsys, "train", "--dataset", "moons-2",
                           "--csv", "x.csv", *FAST_TRAIN)
        assert code == 2
        code, _, err = run(capsys, "train", *FAST_TRAIN)
        assert code == 2

    def test_missing_csv_is_runtime_error(self, capsys):
        code, _, err = run(capsys, "train", "--csv", "/nonexistent.csv", *FAST_TRAIN)
        assert code == 1
        assert "error" in err

    def test_save_split_writes_exact_partition(self, capsys, tmp_path):
        prefix = tmp_path / "run"
        code, text, _ = run(capsys, "train", "--dataset", "moons-2",
                            "--n-samples", "100", "--search", "prob",
                            "--seed", "5", "--save-split", str(prefix), *FAST_TRAIN)
        assert code == 0
        tr = load_csv(f"{prefix}.train.csv")
        te = load_csv(f"{prefix}.test.csv")
        assert tr.n_samples == 80
        assert te.n_samples == 20


class TestEval:
    def test_reproduces_train_metric_exactly(self, capsys, tmp_path):
        model_path = tmp_path / "model.json"
        prefix = tmp_path / "run"
        code, text, _ = run(capsys, "train", "--dataset", "moons-2",
                            "--n-samples", "300", "--search", "prob", "--seed", "0",
                            "--out", str(model_path), "--save-split", str(prefix),
                            *FAST_TRAIN)
        assert code == 0
        train_vals = stdout_values(text)

        code, text, _ = run(capsys, "eval", str(model_path), f"{prefix}.test.csv")
        assert code == 0
        eval_vals = stdout_values(text)
        assert eval_vals["accuracy"] == train_vals["test_accuracy"]
        assert eval_vals["samples"] == train_vals["test_samples"]

    def test_regression_metric_matches(self, capsys, tmp_path):
        model_path = tmp_path / "model.json"
        prefix = tmp_path / "run"
        code, text, _ = run(capsys, "train", "--dataset", "friedman1",
                            "--n-samples", "200", "--model", "slr",
                            "--search", "prob", "--seed", "1",
                            "--out", str(model_path), "--save-split", str(prefix),
                            *FAST_TRAIN)
        assert code == 0
        train_vals = stdout_values(text)
        code, text, _ = run(capsys, "eval", str(model_path), f"{prefix}.test.csv")
        assert code == 0
        assert stdout_values(text)["mse"] == train_vals["test_mse"]

    def test_predictions_file_matches_reloaded_model(self, capsys, tmp_path):
        model_path = tmp_path / "model.json"
        prefix = tmp_path / "run"
        pred_path = tmp_path / "pred.csv"
        assert main(["train", "--dataset", "moons-4", "--n-samples", "200",
                     "--search", "prob", "--seed", "2", "--out", str(model_path),
                     "--save-split", str(prefix), *FAST_TRAIN]) == 0
        assert main(["eval", str(model_path), f"{prefix}.test.csv",
                     "--predictions", str(pred_path)]) == 0
        capsys.readouterr()

        lines = pred_path.read_text().strip().splitlines()
        assert lines[0] == "prediction"
        got = np.array([int(v) for v in lines[1:]])
        model = load_model(model_path)
        te = load_csv(f"{prefix}.test.csv")
        assert np.array_equal(got, model.predict(te.features))

    def test_label_ids_trusted_verbatim(self, capsys, tmp_path):
        # an eval file whose first row is class 2 must not be re-encoded
        model_path = tmp_path / "model.json"
        prefix = tmp_path / "run"
        assert main(["train", "--dataset", "moons-4", "--n-samples", "200",
                     "--search", "prob", "--seed", "3", "--out", str(model_path),
                     "--save-split", str(prefix), *FAST_TRAIN]) == 0
        capsys.readouterr()

        test_csv = f"{prefix}.test.csv"
        with open(test_csv) as fh:
            header = fh.readline()
            rows = fh.readlines()
        rows.sort(key=lambda line: -int(line.rsplit(",", 1)[1]))
        reordered = tmp_path / "reordered.csv"
        reordered.write_text(header + "".join(rows))

        code, text, _ = run(capsys, "eval", str(model_path), test_csv)
        base = stdout_values(text)["accuracy"]
        code, text, _ = run(capsys, "eval", str(model_path), str(reordered))
        assert stdout_values(text)["accuracy"] == base

    def test_out_of_range_label_is_runtime_error(self, capsys, tmp_path):
        model_path = tmp_path / "model.json"
        assert main(["train", "--dataset", "moons-2", "--n-samples", "100",
                     "--search", "prob", "--seed", "0", "--out", str(model_path),
                     *FAST_TRAIN]) == 0
        capsys.readouterr()
        bad = tmp_path / "bad.csv"
        bad.write_text("x0,x1,target\n0.0,0.0,5\n1.0,1.0,0\n")
        code, _, err = run(capsys, "eval", str(model_path), str(bad))
        assert code == 1
        assert "out of range" in err

    def test_feature_count_mismatch(self, capsys, tmp_path):
        model_path = tmp_path / "model.json"
        assert main(["train", "--dataset", "moons-2", "--n-samples", "100",
                     "--search", "prob", "--seed", "0", "--out", str(model_path),
                     *FAST_TRAIN]) == 0
        capsys.readouterr()
        bad = tmp_path / "bad.csv"
        bad.write_text("x0,x1,x2,target\n0.0,0.0,0.0,1\n1.0,1.0,1.0,0\n")
        code, _, err = run(capsys, "eval", str(model_path), str(bad))
        assert code == 1
        assert "features" in err


class TestBench:
    def test_single_cell_matrix(self, capsys, tmp_path):
        conf = tmp_path / "bench.conf"
        conf.write_text(
            "datasets = moons-2\nmodels = slm\nsearches = prob\nworkers_list = 1, 2\n"
            "n_samples = 120\ncandidates = 32\nrepetitions = 1\n"
        )
        out_dir = tmp_path / "report"
        code, text, _ = run(capsys, "bench", "--config", str(conf), "--out", str(out_dir))
        assert code == 0
        assert "| dataset | model | search | workers |" in text
        body = [l for l in text.splitlines() if l.startswith("| moons-2")]
        assert len(body) == 2
        assert (out_dir / "bench.md").exists()
        csv_lines = (out_dir / "bench.csv").read_text().strip().splitlines()
        assert csv_lines[0] == "dataset,model,search,workers,iterations,median_seconds"
        assert len(csv_lines) == 3

    def test_bad_model_in_matrix(self, capsys, tmp_path):
        conf = tmp_path / "bench.conf"
        conf.write_text("models = mystery\n")
        code, _, err = run(capsys, "bench", "--config", str(conf))
        assert code == 2


class TestExitCodes:
    def test_missing_subcommand(self, capsys):
        assert main([]) == 2
        capsys.readouterr()

    def test_unknown_flag(self, capsys):
        assert main(["train", "--banana"]) == 2
        capsys.readouterr()

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        capsys.readouterr()
