/**
 * Parity suite: the wrapper functions must return exactly the values the
 * CLI prints (bit-identical doubles for fixed seeds) on the bundled iris
 * table and on randomly generated datasets.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import {
  GiniCorrError,
  cliCommand,
  gcor,
  gcorCI,
  gcorCIReport,
  gcorReport,
  independenceTestReport,
  independence_test,
  toCsv,
} from "../src/index.js";

const LONG = { timeout: 300_000 };

function directCli(args: string[], csv?: string): unknown {
  const dir = mkdtempSync(join(tmpdir(), "ginicorr-direct-"));
  try {
    const full = [...args];
    if (csv !== undefined) {
      const path = join(dir, "data.csv");
      writeFileSync(path, csv, "utf-8");
      full.push("--data", path, "--target", "label");
    }
    const [command, ...prefix] = cliCommand();
    const proc = spawnSync(command!, [...prefix, ...full, "--json"], {
      encoding: "utf-8",
    });
    if (proc.status !== 0) {
      throw new Error(`CLI failed (${proc.status}): ${proc.stderr}`);
    }
    return JSON.parse(proc.stdout);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function irisPath(): string {
  const proc = spawnSync(
    "python3",
    ["-c", "from ginicorr.dataset import iris_path; print(iris_path())"],
    { encoding: "utf-8" },
  );
  if (proc.status !== 0) {
    throw new Error(`cannot locate iris fixture: ${proc.stderr}`);
  }
  return proc.stdout.trim();
}

function loadIris(): { x: number[][]; y: string[] } {
  const lines = readFileSync(irisPath(), "utf-8").trim().split("\n");
  const x: number[][] = [];
  const y: string[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    x.push(cells.slice(0, 4).map(Number));
    y.push(cells[4]!);
  }
  return { x, y };
}

/** Deterministic 32-bit PRNG so the random datasets are reproducible. */
function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function gaussian(uniform: () => number): number {
  const u = Math.max(uniform(), 1e-12);
  const v = uniform();
  return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
}

interface Dataset {
  x: number[][];
  y: string[];
}

function randomDataset(seed: number): Dataset {
  const rand = mulberry32(seed);
  const k = 2 + Math.floor(rand() * 3); // 2..4 classes
  const d = 1 + Math.floor(rand() * 3); // 1..3 features
  const x: number[][] = [];
  const y: string[] = [];
  for (let c = 0; c < k; c++) {
    const size = 4 + Math.floor(rand() * 9); // 4..12 per class
    const shift = Array.from({ length: d }, () => 2 * (rand() - 0.5) * 2);
    for (let i = 0; i < size; i++) {
      x.push(shift.map((s) => s + gaussian(rand)));
      y.push(`class${c}`);
    }
  }
  return { x, y };
}

const datasets = Array.from({ length: 20 }, (_, i) => randomDataset(1000 + i));

describe("csv serialization", () => {
  it("writes shortest round-trip numbers and quotes awkward labels", () => {
    const csv = toCsv(
      [
        [0.1, 2],
        [3.25, -4e-3],
      ],
      ['a,"b', "plain"],
    );
    expect(csv).toBe('f0,f1,label\n0.1,2,"a,""b"\n3.25,-0.004,plain\n');
  });

  it("rejects ragged and non-finite input", () => {
    expect(() => toCsv([[1], [2, 3]] as never, ["a", "b"])).toThrow(GiniCorrError);
    expect(() => toCsv([1, Infinity], ["a", "b"])).toThrow(GiniCorrError);
    expect(() => toCsv([1, 2], ["a"])).toThrow(GiniCorrError);
  });
});

describe("iris parity", () => {
  it("gcor matches the CLI on the bundled fixture", LONG, () => {
    const { x, y } = loadIris();
    const sepal = x.map((row) => row[0]!);
    const direct = directCli([
      "compute",
      "--data",
      irisPath(),
      "--target",
      "species",
      "--features",
      "sepal_length",
    ]) as { rho: number };
    expect(gcor(sepal, y)).toBe(direct.rho);
    expect(Math.abs(direct.rho - 0.39783)).toBeLessThan(5e-6);

    const both = x.map((row) => [row[0]!, row[1]!]);
    const direct2 = directCli([
      "compute",
      "--data",
      irisPath(),
      "--target",
      "species",
      "--features",
      "sepal_length,sepal_width",
    ]) as { rho: number };
    expect(gcor(both, y)).toBe(direct2.rho);
  });

  it("gcorCI brackets the bivariate estimate", LONG, () => {
    const { x, y } = loadIris();
    const both = x.map((row) => [row[0]!, row[1]!]);
    const [lower, upper, estimate, stderr] = gcorCI(both, y, 0.95);
    expect(lower).toBeLessThan(0.357026);
    expect(upper).toBeGreaterThan(0.357026);
    expect(estimate).toBeCloseTo(0.357026, 5);
    expect(stderr).toBeGreaterThan(0);
    const narrow = gcorCI(both, y, 0.5);
    expect(narrow[1]! - narrow[0]!).toBeLessThan(upper - lower);
  });
});

describe("random-dataset parity", () => {
  it("gcor equals CLI compute on 20 datasets", LONG, () => {
    for (const { x, y } of datasets) {
      const wrapped = gcorReport(x, y);
      const direct = directCli(["compute"], toCsv(x, y)) as Record<string, unknown>;
      expect(wrapped.rho).toBe(direct.rho);
      expect(wrapped.uOverall).toBe(direct.uOverall);
      expect(wrapped.uWithin).toEqual(direct.uWithin);
      expect(wrapped.pHat).toEqual(direct.pHat);
      expect(wrapped.n).toBe(direct.n);
      expect(wrapped.K).toBe(direct.K);
    }
  });

  it("gcorCI equals CLI ci on 20 datasets", LONG, () => {
    for (const { x, y } of datasets) {
      const wrapped = gcorCIReport(x, y, 0.9);
      const direct = directCli(["ci", "--level", "0.9"], toCsv(x, y)) as Record<
        string,
        number
      >;
      expect(wrapped.estimate).toBe(direct.estimate);
      expect(wrapped.stderr).toBe(direct.stderr);
      expect(wrapped.lower).toBe(direct.lower);
      expect(wrapped.upper).toBe(direct.upper);
    }
  });

  it("independence_test equals CLI test for fixed seeds on 20 datasets", LONG, () => {
    datasets.forEach(({ x, y }, index) => {
      const seed = 5000 + index;
      const wrapped = independenceTestReport(x, y, 199, seed);
      const direct = directCli(
        ["test", "--permutations", "199", "--seed", String(seed)],
        toCsv(x, y),
      ) as Record<string, unknown>;
      expect(wrapped.pValue).toBe(direct.pValue);
      expect(wrapped.statistic).toBe(direct.statistic);
      expect(wrapped.rejected).toBe(direct.rejected);
      expect(wrapped.seed).toBe(seed);
    });
  });
});

describe("behavior", () => {
  it("same-distribution groups are not rejected", LONG, () => {
    const rand = mulberry32(77);
    const x: number[][] = [];
    const y: string[] = [];
    for (let c = 0; c < 3; c++) {
      for (let i = 0; i < 50; i++) {
        x.push([gaussian(rand), gaussian(rand)]);
        y.push(`g${c}`);
      }
    }
    const [pValue, rejected] = independence_test(x, y, 500, 11);
    expect(rejected).toBe(false);
    expect(pValue).toBeGreaterThan(0.05);
  });

  it("separated classes are detected", LONG, () => {
    const x = [0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
    const y = ["A", "A", "A", "A", "A", "A", "B", "B", "B", "B", "B", "B"];
    const [pValue, rejected] = independence_test(x, y, 999, 4);
    expect(pValue).toBeLessThanOrEqual(0.15);
    expect(rejected).toBe(true);
  });

  it("fixed seed reproduces the p-value exactly", LONG, () => {
    const { x, y } = datasets[0]!;
    const first = independence_test(x, y, 99, 42);
    const second = independence_test(x, y, 99, 42);
    expect(first).toEqual(second);
  });

  it("maps core errors onto named exceptions", LONG, () => {
    const constant = [1, 1, 1, 1];
    const labels = ["A", "A", "B", "B"];
    try {
      gcor(constant, labels);
      expect.unreachable("expected DegenerateSample");
    } catch (err) {
      expect(err).toBeInstanceOf(GiniCorrError);
      expect((err as GiniCorrError).name).toBe("DegenerateSample");
    }
    expect(() => gcor([1, 2, 3, 4], labels, 2.5)).toThrow(GiniCorrError);
    expect(() => independence_test([1, 2, 3, 4], labels, 0)).toThrow(GiniCorrError);
  });
});
