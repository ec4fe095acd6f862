import { readFileSync, writeFileSync } from "node:fs";

/**
 * Write a feature matrix (and optional targets) in the CSV layout the CLI
 * reads: header row, one sample per line, targets in a `target` column.
 * Columns are named f0..f{D-1} so any matrix round-trips without metadata.
 */
export function writeDataCsv(
  filePath: string,
  X: ReadonlyArray<ReadonlyArray<number>>,
  y?: ReadonlyArray<number>,
): void {
  if (X.length === 0 || X[0].length === 0) {
    throw new Error("features must be a non-empty 2-D matrix");
  }
  const width = X[0].length;
  if (y !== undefined && y.length !== X.length) {
    throw new Error(
      `targets length ${y.length} does not match sample count ${X.length}`,
    );
  }
  const header = Array.from({ length: width }, (_, i) => `f${i}`);
  if (y !== undefined) header.push("target");
  const lines = [header.join(",")];
  for (let i = 0; i < X.length; i++) {
    const row = X[i];
    if (row.length !== width) {
      throw new Error(`row ${i} has ${row.length} values, expected ${width}`);
    }
    const cells = row.map((v, j) => {
      if (!Number.isFinite(v)) {
        throw new Error(`non-finite feature at row ${i}, column ${j}`);
      }
      return String(v);
    });
    if (y !== undefined) {
      if (!Number.isFinite(y[i])) {
        throw new Error(`non-finite target at row ${i}`);
      }
      cells.push(String(y[i]));
    }
    lines.push(cells.join(","));
  }
  writeFileSync(filePath, lines.join("\n") + "\n");
}

export interface DataCsv {
  featureNames: string[];
  X: number[][];
  y: number[];
}

/** Read a CSV in the CLI's data layout, splitting out the target column. */
export function readDataCsv(filePath: string, targetColumn = "target"): DataCsv {
  const text = readFileSync(filePath, "utf-8");
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length < 2) {
    throw new Error(`${filePath} has no data rows`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const targetIndex = header.indexOf(targetColumn);
  if (targetIndex < 0) {
    throw new Error(`${filePath} has no '${targetColumn}' column`);
  }
  const featureNames = header.filter((_, i) => i !== targetIndex);
  const X: number[][] = [];
  const y: number[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new Error(`${filePath} row ${i} has ${cells.length} cells, expected ${header.length}`);
    }
    const row: number[] = [];
    for (let j = 0; j < cells.length; j++) {
      const value = Number(cells[j]);
      if (!Number.isFinite(value)) {
        throw new Error(`${filePath} row ${i} column ${j} is not numeric`);
      }
      if (j === targetIndex) y.push(value);
      else row.push(value);
    }
    X.push(row);
  }
  return { featureNames, X, y };
}

/** Read the one-column CSV written by `slm eval --predictions`. */
export function readPredictionsCsv(filePath: string): number[] {
  const text = readFileSync(filePath, "utf-8");
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0 || lines[0].trim() !== "prediction") {
    throw new Error(`${filePath} is not a predictions CSV`);
  }
  return lines.slice(1).map((line, i) => {
    const value = Number(line);
    if (!Number.isFinite(value)) {
      throw new Error(`${filePath} row ${i} is not numeric`);
    }
    return value;
  });
}
