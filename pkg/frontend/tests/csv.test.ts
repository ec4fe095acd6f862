import { readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { readDataCsv, readPredictionsCsv, writeDataCsv } from "../src/csv.js";
import { scratchDir } from "./helpers.js";

describe("writeDataCsv / readDataCsv", () => {
  it("round-trips a matrix with targets exactly", () => {
    const path = join(scratchDir(), "data.csv");
    const X = [
      [1.5, -2.25, 0],
      [0.1, 3, 7.75],
    ];
    const y = [0, 1];
    writeDataCsv(path, X, y);
    const back = readDataCsv(path);
    expect(back.featureNames).toEqual(["f0", "f1", "f2"]);
    expect(back.X).toEqual(X);
    expect(back.y).toEqual(y);
  });

  it("writes a target column of the caller's choosing per row", () => {
    const path = join(scratchDir(), "data.csv");
    writeDataCsv(path, [[1], [2]], [0.5, -0.5]);
    expect(readFileSync(path, "utf-8")).toBe("f0,target\n1,0.5\n2,-0.5\n");
  });

  it("rejects ragged rows, non-finite cells, and length mismatches", () => {
    const path = join(scratchDir(), "data.csv");
    expect(() => writeDataCsv(path, [[1, 2], [3]], [0, 1])).toThrow(/row 1/);
    expect(() => writeDataCsv(path, [[1, NaN]], [0])).toThrow(/non-finite/);
    expect(() => writeDataCsv(path, [[1]], [0, 1])).toThrow(/does not match/);
    expect(() => writeDataCsv(path, [], [])).toThrow(/non-empty/);
  });

  it("finds the target column anywhere in the header", () => {
    const path = join(scratchDir(), "data.csv");
    writeFileSync(path, "a,target,b\n1,9,2\n3,8,4\n");
    const back = readDataCsv(path);
    expect(back.featureNames).toEqual(["a", "b"]);
    expect(back.X).toEqual([[1, 2], [3, 4]]);
    expect(back.y).toEqual([9, 8]);
  });
});

describe("readPredictionsCsv", () => {
  it("reads one numeric prediction per row", () => {
    const path = join(scratchDir(), "preds.csv");
    writeFileSync(path, "prediction\n0\n2\n1.5\n");
    expect(readPredictionsCsv(path)).toEqual([0, 2, 1.5]);
  });

  it("rejects files without the prediction header", () => {
    const path = join(scratchDir(), "preds.csv");
    writeFileSync(path, "value\n1\n");
    expect(() => readPredictionsCsv(path)).toThrow(/not a predictions CSV/);
  });
});
