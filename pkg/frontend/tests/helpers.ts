import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join, resolve } from "node:path";
import { fileURLToPath } from "node:url";

export const repoRoot = resolve(dirname(fileURLToPath(import.meta.url)), "..", "..");

export const irisCsvPath = join(repoRoot, "data", "iris.csv");

export function scratchDir(): string {
  return mkdtempSync(join(tmpdir(), "slm-client-test-"));
}

/** Deterministic two-cluster classification set separable on f0. */
export function blob(): { X: number[][]; y: number[] } {
  const X: number[][] = [];
  const y: number[] = [];
  for (let i = 0; i < 20; i++) {
    const jitter = (i % 5) * 0.1;
    X.push([-2 - jitter, 0.5 + jitter]);
    y.push(0);
    X.push([2 + jitter, -0.5 - jitter]);
    y.push(1);
  }
  return { X, y };
}

/** Deterministic linear regression set: y = 3*f0 - f1 + 1. */
export function ramp(): { X: number[][]; y: number[] } {
  const X: number[][] = [];
  const y: number[] = [];
  for (let i = 0; i < 48; i++) {
    const a = (i % 8) - 3.5;
    const b = Math.floor(i / 8) - 2.5;
    X.push([a, b]);
    y.push(3 * a - b + 1);
  }
  return { X, y };
}
