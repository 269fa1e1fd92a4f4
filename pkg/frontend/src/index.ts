/**
 * Categorical Gini correlation client.
 *
 * Exposes the three-function surface — gcor, gcorCI and independence_test —
 * over the `ginicorr` command-line tool. Inputs are plain arrays; data
 * crosses the process boundary as CSV text written with shortest
 * round-trip number formatting and comes back as JSON, so every value is
 * the exact IEEE-754 double the CLI computed.
 *
 * The CLI command defaults to `ginicorr` and can be overridden with the
 * GINICORR_CLI environment variable (whitespace-separated, e.g.
 * "python3 -m ginicorr").
 */

import { randomInt } from "node:crypto";
import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export type LabelVector = ReadonlyArray<string | number>;
export type NumericInput =
  | ReadonlyArray<number>
  | ReadonlyArray<ReadonlyArray<number>>;

/** Machine-readable `compute` output. */
export interface CorrelationReport {
  rho: number;
  uOverall: number;
  uWithin: number[];
  pHat: number[];
  alpha: number;
  n: number;
  d: number;
  K: number;
}

/** Machine-readable `ci` output. */
export interface IntervalReport {
  estimate: number;
  stderr: number;
  level: number;
  lower: number;
  upper: number;
}

/** Machine-readable `test` output. */
export interface TestReport {
  pValue: number;
  statistic: number;
  permutations: number;
  rejected: boolean;
  seed: number;
  significance: number;
}

/** Error carrying the CLI's stable error identifier as its `name`. */
export class GiniCorrError extends Error {
  constructor(name: string, message: string) {
    super(message);
    this.name = name;
  }
}

export function cliCommand(): string[] {
  const override = process.env.GINICORR_CLI;
  const parts = override ? override.split(/\s+/).filter(Boolean) : ["ginicorr"];
  if (parts.length === 0) {
    throw new GiniCorrError("InvalidInput", "GINICORR_CLI is empty");
  }
  return parts;
}

function toMatrix(x: NumericInput): number[][] {
  if (!Array.isArray(x) || x.length === 0) {
    throw new GiniCorrError("InvalidInput", "x must be a non-empty array");
  }
  const rows: number[][] = Array.isArray(x[0])
    ? (x as ReadonlyArray<ReadonlyArray<number>>).map((row) => [...row])
    : (x as ReadonlyArray<number>).map((value) => [value]);
  const width = rows[0]!.length;
  if (width === 0) {
    throw new GiniCorrError("InvalidInput", "x must have at least one column");
  }
  for (const row of rows) {
    if (row.length !== width) {
      throw new GiniCorrError("InvalidInput", "x rows have inconsistent lengths");
    }
    for (const value of row) {
      if (typeof value !== "number" || !Number.isFinite(value)) {
        throw new GiniCorrError("InvalidInput", "x contains non-finite entries");
      }
    }
  }
  return rows;
}

function escapeCell(cell: string): string {
  if (/[",\r\n]/.test(cell)) {
    return `"${cell.replaceAll('"', '""')}"`;
  }
  return cell;
}

/**
 * Serialize (x, y) to the CSV layout the CLI reads back: feature columns
 * f0..f{d-1} followed by a `label` column. Numbers use JavaScript's
 * default shortest-round-trip formatting.
 */
export function toCsv(x: NumericInput, y: LabelVector): string {
  const rows = toMatrix(x);
  if (y.length !== rows.length) {
    throw new GiniCorrError(
      "InvalidInput",
      `y has ${y.length} entries for ${rows.length} observations`,
    );
  }
  const width = rows[0]!.length;
  const header = [...Array.from({ length: width }, (_, j) => `f${j}`), "label"];
  const lines = [header.join(",")];
  rows.forEach((row, i) => {
    const cells = row.map((value) => String(value));
    cells.push(escapeCell(String(y[i])));
    lines.push(cells.join(","));
  });
  return lines.join("\n") + "\n";
}

function runCli(subcommand: string, dataCsv: string, extra: string[]): unknown {
  const dir = mkdtempSync(join(tmpdir(), "ginicorr-"));
  try {
    const dataPath = join(dir, "data.csv");
    writeFileSync(dataPath, dataCsv, "utf-8");
    const [command, ...prefix] = cliCommand();
    const args = [
      ...prefix,
      subcommand,
      "--data",
      dataPath,
      "--target",
      "label",
      "--json",
      ...extra,
    ];
    const proc = spawnSync(command!, args, { encoding: "utf-8" });
    if (proc.error) {
      throw new GiniCorrError(
        "InvalidInput",
        `failed to launch ${command}: ${proc.error.message}`,
      );
    }
    if (proc.status !== 0) {
      const stderr = (proc.stderr ?? "").trim();
      const match = /^([A-Za-z]+): ([\s\S]*)$/.exec(stderr.split("\n").pop() ?? "");
      if (proc.status === 1 && match) {
        throw new GiniCorrError(match[1]!, match[2]!);
      }
      throw new GiniCorrError("UsageError", stderr || `exit code ${proc.status}`);
    }
    return JSON.parse(proc.stdout);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function checkOpenUnit(value: number, name: string): void {
  if (!Number.isFinite(value) || value <= 0 || value >= 1) {
    throw new GiniCorrError("InvalidInput", `${name} must lie in (0, 1), got ${value}`);
  }
}

function checkAlpha(alpha: number): void {
  if (!Number.isFinite(alpha) || alpha <= 0 || alpha >= 2) {
    throw new GiniCorrError("InvalidInput", `alpha must lie in (0, 2), got ${alpha}`);
  }
}

/** Full point-estimate report (components included). */
export function gcorReport(
  x: NumericInput,
  y: LabelVector,
  alpha = 1,
): CorrelationReport {
  checkAlpha(alpha);
  return runCli("compute", toCsv(x, y), ["--alpha", String(alpha)]) as CorrelationReport;
}

/** Categorical Gini correlation between x and the labels y. */
export function gcor(x: NumericInput, y: LabelVector, alpha = 1): number {
  return gcorReport(x, y, alpha).rho;
}

/**
 * Jackknife confidence interval for the correlation.
 *
 * Returns `[lower, upper, estimate, stderr]`.
 */
export function gcorCI(
  x: NumericInput,
  y: LabelVector,
  clevel = 0.95,
  alpha = 1,
): [number, number, number, number] {
  checkAlpha(alpha);
  checkOpenUnit(clevel, "clevel");
  const report = runCli("ci", toCsv(x, y), [
    "--alpha",
    String(alpha),
    "--level",
    String(clevel),
  ]) as IntervalReport;
  return [report.lower, report.upper, report.estimate, report.stderr];
}

/** Like gcorCI but returning the labeled report object. */
export function gcorCIReport(
  x: NumericInput,
  y: LabelVector,
  clevel = 0.95,
  alpha = 1,
): IntervalReport {
  checkAlpha(alpha);
  checkOpenUnit(clevel, "clevel");
  return runCli("ci", toCsv(x, y), [
    "--alpha",
    String(alpha),
    "--level",
    String(clevel),
  ]) as IntervalReport;
}

/**
 * Permutation test of independence between x and y.
 *
 * Returns `[pValue, rejected]`. When `seed` is omitted a fresh 48-bit seed
 * is drawn here (not in the CLI) so the echoed value survives the JSON
 * number round-trip exactly; read it from {@link independenceTestReport}.
 */
export function independence_test(
  x: NumericInput,
  y: LabelVector,
  B = 1000,
  seed?: number,
  significance = 0.05,
): [number, boolean] {
  const report = independenceTestReport(x, y, B, seed, significance);
  return [report.pValue, report.rejected];
}

/** Like independence_test but returning the full report. */
export function independenceTestReport(
  x: NumericInput,
  y: LabelVector,
  B = 1000,
  seed?: number,
  significance = 0.05,
): TestReport {
  if (!Number.isInteger(B) || B < 1) {
    throw new GiniCorrError("InvalidInput", `B must be a positive integer, got ${B}`);
  }
  checkOpenUnit(significance, "significance");
  const chosenSeed = seed ?? randomInt(0, 2 ** 48);
  if (!Number.isInteger(chosenSeed) || chosenSeed < 0) {
    throw new GiniCorrError("InvalidInput", `seed must be a non-negative integer, got ${seed}`);
  }
  return runCli("test", toCsv(x, y), [
    "--permutations",
    String(B),
    "--seed",
    String(chosenSeed),
    "--significance",
    String(significance),
  ]) as TestReport;
}

export const independenceTest = independence_test;
