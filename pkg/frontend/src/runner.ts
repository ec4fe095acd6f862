import { spawnSync } from "node:child_process";

/** Raised when the CLI cannot be spawned or exits non-zero. */
export class SlmCliError extends Error {
  readonly exitCode: number | null;
  readonly stderr: string;

  constructor(message: string, exitCode: number | null, stderr: string) {
    super(message);
    this.name = "SlmCliError";
    this.exitCode = exitCode;
    this.stderr = stderr;
  }
}

export interface RunResult {
  stdout: string;
  stderr: string;
}

/** Interpreter used to launch the CLI; override with SLM_PYTHON. */
export function pythonBin(): string {
  return process.env.SLM_PYTHON || "python3";
}

/**
 * Run one `slm` subcommand and return its output, throwing SlmCliError on
 * any failure. All model work happens inside the Python process; this side
 * only passes arguments through.
 */
export function runSlm(args: string[], cwd?: string): RunResult {
  const bin = pythonBin();
  const proc = spawnSync(bin, ["-m", "slm", ...args], {
    cwd,
    encoding: "utf-8",
  });
  if (proc.error) {
    throw new SlmCliError(
      `failed to spawn ${bin}: ${proc.error.message}`,
      null,
      "",
    );
  }
  if (proc.status !== 0) {
    const detail = (proc.stderr || proc.stdout || "").trim();
    throw new SlmCliError(
      `slm ${args[0] ?? ""} exited with ${proc.status}: ${detail}`,
      proc.status,
      proc.stderr ?? "",
    );
  }
  return { stdout: proc.stdout ?? "", stderr: proc.stderr ?? "" };
}

/** Parse the CLI's `key = value` report lines into a record. */
export function parseReport(stdout: string): Record<string, string> {
  const report: Record<string, string> = {};
  for (const line of stdout.split("\n")) {
    const sep = line.indexOf(" = ");
    if (sep <= 0) continue;
    report[line.slice(0, sep).trim()] = line.slice(sep + 3).trim();
  }
  return report;
}

/** Numeric report field, or undefined when absent or non-numeric. */
export function reportNumber(
  report: Record<string, string>,
  key: string,
): number | undefined {
  const raw = report[key];
  if (raw === undefined) return undefined;
  const value = Number(raw);
  return Number.isFinite(value) ? value : undefined;
}
