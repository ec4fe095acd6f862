import { copyFileSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { readPredictionsCsv, writeDataCsv } from "./csv.js";
import { parseReport, runSlm } from "./runner.js";

export type Task = "classification" | "regression";

/**
 * Training options, keyed by `slm train` flag name without the leading
 * dashes (for example `{ model: "slm-forest", trees: 30, seed: 7 }`).
 * Boolean true passes the bare flag; false omits it.
 */
export type TrainParams = Record<string, string | number | boolean>;

interface ModelMeta {
  task: Task;
  nFeatures: number;
}

function readModelMeta(modelPath: string): ModelMeta {
  const doc = JSON.parse(readFileSync(modelPath, "utf-8"));
  if (doc.format !== "slm-model") {
    throw new Error(`${modelPath} is not an slm model document`);
  }
  const meta = doc.kind === "tree" ? doc.tree : doc;
  return { task: meta.task, nFeatures: Number(meta.n_features) };
}

function flagArgs(params: TrainParams): string[] {
  const args: string[] = [];
  for (const [key, value] of Object.entries(params)) {
    if (typeof value === "boolean") {
      if (value) args.push(`--${key}`);
    } else {
      args.push(`--${key}`, String(value));
    }
  }
  return args;
}

/**
 * A trained model held as its JSON artifact in a private temp directory.
 * Predictions round-trip through `slm eval`, so they are identical to what
 * the CLI would report for the same file. `close()` removes the directory
 * and invalidates the handle.
 */
export class Estimator {
  readonly task: Task;
  readonly nFeatures: number;
  readonly params: Readonly<TrainParams>;
  readonly report: Readonly<Record<string, string>>;
  private dir: string | null;
  private scratch = 0;

  constructor(
    dir: string,
    meta: ModelMeta,
    params: TrainParams,
    report: Record<string, string>,
  ) {
    this.dir = dir;
    this.task = meta.task;
    this.nFeatures = meta.nFeatures;
    this.params = Object.freeze({ ...params });
    this.report = Object.freeze({ ...report });
  }

  /** Path of the model JSON; valid until close(). */
  get modelPath(): string {
    if (this.dir === null) {
      throw new Error("estimator is closed");
    }
    return join(this.dir, "model.json");
  }

  /** Predict one value per row of X via the CLI eval path. */
  predict(X: ReadonlyArray<ReadonlyArray<number>>): number[] {
    const modelPath = this.modelPath;
    if (X.length === 0) return [];
    for (const row of X) {
      if (row.length !== this.nFeatures) {
        throw new Error(
          `expected ${this.nFeatures} features per row, got ${row.length}`,
        );
      }
    }
    const tag = this.scratch++;
    const dataPath = join(this.dir!, `predict-${tag}.csv`);
    const predsPath = join(this.dir!, `predict-${tag}-out.csv`);
    // eval requires a target column; a zero placeholder is valid for both tasks
    writeDataCsv(dataPath, X, new Array(X.length).fill(0));
    runSlm(["eval", modelPath, dataPath, "--predictions", predsPath]);
    return readPredictionsCsv(predsPath);
  }

  /** Copy the model JSON to a path of the caller's choosing. */
  save(filePath: string): void {
    copyFileSync(this.modelPath, filePath);
  }

  /** Delete the temp directory; further use of the handle throws. */
  close(): void {
    if (this.dir !== null) {
      rmSync(this.dir, { recursive: true, force: true });
      this.dir = null;
    }
  }
}

/**
 * Train a model on in-memory arrays. Writes the data to CSV, runs
 * `slm train`, and wraps the resulting model file. The CLI applies its own
 * train/test split controlled by `test-fraction` and `seed`, identical to
 * invoking it by hand with the same flags.
 */
export function fit(
  X: ReadonlyArray<ReadonlyArray<number>>,
  y: ReadonlyArray<number>,
  params: TrainParams = {},
): Estimator {
  if (X.length !== y.length) {
    throw new Error(
      `features have ${X.length} rows but targets have ${y.length}`,
    );
  }
  const dir = mkdtempSync(join(tmpdir(), "slm-client-"));
  try {
    const dataPath = join(dir, "train.csv");
    const modelPath = join(dir, "model.json");
    writeDataCsv(dataPath, X, y);
    const run = runSlm([
      "train",
      "--csv",
      dataPath,
      "--out",
      modelPath,
      ...flagArgs(params),
    ]);
    return new Estimator(dir, readModelMeta(modelPath), params, parseReport(run.stdout));
  } catch (err) {
    rmSync(dir, { recursive: true, force: true });
    throw err;
  }
}

/** Wrap an existing model JSON file (as written by fit, save, or the CLI). */
export function load(filePath: string): Estimator {
  const dir = mkdtempSync(join(tmpdir(), "slm-client-"));
  try {
    const meta = readModelMeta(filePath);
    copyFileSync(filePath, join(dir, "model.json"));
    return new Estimator(dir, meta, {}, {});
  } catch (err) {
    rmSync(dir, { recursive: true, force: true });
    throw err;
  }
}
