import * as fs from "fs";
import * as path from "path";

import { beforeAll, describe, expect, it } from "vitest";

import { loadCheckpoint } from "../src/checkpoint";
import { DESK_CONFIG } from "../src/model";
import { scoreInstance } from "../src/score";
import { writeToyDataset } from "../src/toydata";
import { train } from "../src/train";
import { haveSolverCli, solverCli, tmpDir } from "./helpers";

/**
 * End-to-end contract with the solver package: overfit one puzzle, score
 * it, and the solver must reproduce the ground truth exactly.
 */

const root = tmpDir("e2e-");
const puzzleDir = path.join(root, "puzzles", "p0");
const ckptDir = path.join(root, "ckpt");

beforeAll(() => {
  expect(haveSolverCli(), "the `reassembly` CLI must be installed").toBe(true);
  const [image] = writeToyDataset(path.join(root, "images"), 1, 31);
  solverCli(["fragment", "--image", image, "--out", puzzleDir, "--seed", "55"]);
});

describe("overfit end to end", () => {
  it("trains to >=0.95 on one puzzle and the solver recovers the truth", async () => {
    const result = await train({
      dataDir: path.join(root, "puzzles"),
      outDir: ckptDir,
      epochs: 150,
      batchSize: 8,
      learningRate: 2e-3,
      seed: 3,
      holdoutPuzzles: 0,
      config: DESK_CONFIG,
      verbose: false,
    });
    expect(result.trainPairs).toBe(8);
    expect(result.trainAccuracy).toBeGreaterThanOrEqual(0.95);

    const matrixPath = path.join(root, "matrix.json");
    const matrix = await scoreInstance(ckptDir, puzzleDir, 0, matrixPath);
    expect(matrix.rows).toHaveLength(8);
    // schema contract: rows are normalized well inside the loader tolerance
    for (const row of matrix.rows) {
      const sum = row.probs.reduce((a, b) => a + b, 0);
      expect(Math.abs(sum - 1)).toBeLessThanOrEqual(1e-5);
    }

    const solutionPath = path.join(root, "solution.json");
    solverCli(["solve", "--matrix", matrixPath, "--theta", "0", "-o", solutionPath]);
    const reportPath = path.join(root, "report.json");
    solverCli([
      "eval",
      "--solution", solutionPath,
      "--truth", path.join(puzzleDir, "truth.json"),
      "--fragments", puzzleDir,
      "-o", reportPath,
    ]);
    const report = JSON.parse(fs.readFileSync(reportPath, "utf-8"));
    expect(report.perfect).toBe(true);
    expect(report.well_placed_fraction).toBe(1.0);
  });

  it("scoring is deterministic in inference mode", async () => {
    const a = await scoreInstance(ckptDir, puzzleDir, 0);
    const b = await scoreInstance(ckptDir, puzzleDir, 0);
    expect(JSON.stringify(a)).toBe(JSON.stringify(b));
  });

  it("nine center hypotheses feed the unknown-center solver", async () => {
    const { meta } = await loadCheckpoint(ckptDir);
    expect(meta.config.fragmentSize).toBe(96);
    const hypoDir = path.join(root, "hypo");
    fs.mkdirSync(hypoDir, { recursive: true });
    const instance = JSON.parse(fs.readFileSync(path.join(puzzleDir, "instance.json"), "utf-8"));
    for (const fragment of instance.fragments) {
      await scoreInstance(ckptDir, puzzleDir, fragment, path.join(hypoDir, `center_${fragment}.json`));
    }
    const solutionPath = path.join(root, "unknown.json");
    solverCli([
      "solve",
      "--unknown-center", hypoDir,
      "--theta", "0",
      "--no-outsiders",
      "-o", solutionPath,
    ]);
    const solution = JSON.parse(fs.readFileSync(solutionPath, "utf-8"));
    expect(instance.fragments).toContain(solution.center_hypothesis);
  });
});
