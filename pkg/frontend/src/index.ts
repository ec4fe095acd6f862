export { Estimator, fit, load } from "./estimator.js";
export type { Task, TrainParams } from "./estimator.js";
export { readDataCsv, readPredictionsCsv, writeDataCsv } from "./csv.js";
export type { DataCsv } from "./csv.js";
export { SlmCliError, parseReport, pythonBin, reportNumber, runSlm } from "./runner.js";
export type { RunResult } from "./runner.js";
