import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { readDataCsv, readPredictionsCsv } from "../src/csv.js";
import { fit } from "../src/estimator.js";
import { parseReport, reportNumber, runSlm } from "../src/runner.js";
import { irisCsvPath, scratchDir } from "./helpers.js";

// identical flags on both paths; the CLI owns the split, search, and model
const PARAMS = {
  model: "slm",
  search: "apso",
  seed: 7,
  "test-fraction": 0.2,
} as const;

describe("wrapper vs raw CLI on iris", () => {
  it("predicts element-wise identically for the same seed and params", () => {
    const dir = scratchDir();
    const modelPath = join(dir, "model.json");
    const predsPath = join(dir, "preds.csv");
    const splitPrefix = join(dir, "part");

    runSlm([
      "train",
      "--csv", irisCsvPath,
      "--model", PARAMS.model,
      "--search", PARAMS.search,
      "--seed", String(PARAMS.seed),
      "--test-fraction", String(PARAMS["test-fraction"]),
      "--out", modelPath,
      "--save-split", splitPrefix,
    ]);
    const evalRun = runSlm([
      "eval", modelPath, join(dir, "part.test.csv"),
      "--predictions", predsPath,
    ]);
    const cliPreds = readPredictionsCsv(predsPath);
    const cliAccuracy = reportNumber(parseReport(evalRun.stdout), "accuracy");

    const iris = readDataCsv(irisCsvPath);
    const est = fit(iris.X, iris.y, { ...PARAMS });
    try {
      const testRows = readDataCsv(join(dir, "part.test.csv"));
      const wrapped = est.predict(testRows.X);

      expect(wrapped.length).toBe(cliPreds.length);
      expect(wrapped).toEqual(cliPreds);
      expect(reportNumber(est.report, "test_accuracy")).toBe(cliAccuracy);
    } finally {
      est.close();
    }
  });
});
