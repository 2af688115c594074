import * as fs from "fs";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";

import { loadCheckpoint } from "./checkpoint";
import { FRAGMENT_SIZE, loadPuzzle } from "./data";
import { useBestBackend } from "./model";
import { toFloats } from "./png";
import { PredictionMatrix, checkMatrixRows } from "./schema";

/** One prediction-matrix row per non-center fragment, ids ascending. */
export async function scoreInstance(
  ckptDir: string,
  instanceDir: string,
  center: number,
  outPath?: string
): Promise<PredictionMatrix> {
  await useBestBackend();
  const { model } = await loadCheckpoint(ckptDir);
  const puzzle = loadPuzzle(instanceDir);
  const centerPixels = puzzle.pixels.get(center);
  if (!centerPixels) {
    throw new Error(`fragment ${center} not part of ${instanceDir}`);
  }
  const others = [...puzzle.pixels.keys()].filter((f) => f !== center).sort((a, b) => a - b);
  const n = others.length;
  const size = FRAGMENT_SIZE;
  const centers = new Float32Array(n * size * size * 3);
  const laterals = new Float32Array(n * size * size * 3);
  const centerFloats = toFloats(centerPixels);
  others.forEach((fragment, i) => {
    centers.set(centerFloats, i * size * size * 3);
    laterals.set(toFloats(puzzle.pixels.get(fragment)!), i * size * size * 3);
  });
  const centerTensor = tf.tensor4d(centers, [n, size, size, 3]);
  const lateralTensor = tf.tensor4d(laterals, [n, size, size, 3]);
  let probs: number[][];
  try {
    const out = model.predict([centerTensor, lateralTensor], { batchSize: 32 }) as tf.Tensor2D;
    probs = (await out.array()) as number[][];
    out.dispose();
  } finally {
    centerTensor.dispose();
    lateralTensor.dispose();
    model.dispose();
  }
  const matrix: PredictionMatrix = {
    center,
    rows: others.map((fragment, i) => ({ fragment, probs: probs[i] })),
  };
  checkMatrixRows(matrix);
  if (outPath) {
    fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
    fs.writeFileSync(outPath, JSON.stringify(matrix, null, 2) + "\n");
  }
  return matrix;
}
