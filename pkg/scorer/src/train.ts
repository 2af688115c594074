import * as tf from "@tensorflow/tfjs";

import { CheckpointMeta, saveCheckpoint } from "./checkpoint";
import { Pair, Puzzle, buildPairs, loadPuzzleDirs } from "./data";
import { DEFAULT_CONFIG, ModelConfig, buildModel, useBestBackend } from "./model";
import { toFloats } from "./png";
import { Rng } from "./rng";
import { CLASS_COUNT } from "./schema";

export interface TrainOptions {
  dataDir: string;
  outDir: string;
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
  /** Puzzles held out of training for the validation accuracy. */
  holdoutPuzzles: number;
  config: ModelConfig;
  verbose: boolean;
}

export const DEFAULT_TRAIN: Omit<TrainOptions, "dataDir" | "outDir"> = {
  epochs: 12,
  batchSize: 16,
  learningRate: 1e-3,
  seed: 1,
  holdoutPuzzles: 0,
  config: DEFAULT_CONFIG,
  verbose: true,
};

export interface TrainResult {
  trainAccuracy: number;
  heldOutAccuracy: number | null;
  trainPairs: number;
  heldOutPairs: number;
  backend: string;
}

function pairsToTensors(pairs: Pair[]): { centers: tf.Tensor4D; laterals: tf.Tensor4D; labels: tf.Tensor2D } {
  const n = pairs.length;
  const size = pairs[0].center.width;
  const centers = new Float32Array(n * size * size * 3);
  const laterals = new Float32Array(n * size * size * 3);
  const labels = new Float32Array(n * CLASS_COUNT);
  pairs.forEach((pair, i) => {
    centers.set(toFloats(pair.center), i * size * size * 3);
    laterals.set(toFloats(pair.lateral), i * size * size * 3);
    labels[i * CLASS_COUNT + pair.label] = 1;
  });
  return {
    centers: tf.tensor4d(centers, [n, size, size, 3]),
    laterals: tf.tensor4d(laterals, [n, size, size, 3]),
    labels: tf.tensor2d(labels, [n, CLASS_COUNT]),
  };
}

export function accuracyOf(model: tf.LayersModel, pairs: Pair[], batchSize = 32): number {
  const { centers, laterals, labels } = pairsToTensors(pairs);
  try {
    const probs = model.predict([centers, laterals], { batchSize }) as tf.Tensor2D;
    const hits = tf.tidy(() =>
      probs.argMax(-1).equal(labels.argMax(-1)).sum().dataSync()[0]
    );
    probs.dispose();
    return hits / pairs.length;
  } finally {
    centers.dispose();
    laterals.dispose();
    labels.dispose();
  }
}

export async function train(options: TrainOptions): Promise<TrainResult> {
  const backend = await useBestBackend();
  const puzzles = loadPuzzleDirs(options.dataDir);
  if (options.holdoutPuzzles >= puzzles.length) {
    throw new Error(`cannot hold out ${options.holdoutPuzzles} of ${puzzles.length} puzzles`);
  }
  const splitRng = new Rng(options.seed);
  const shuffled = splitRng.shuffle(puzzles);
  const holdout: Puzzle[] = shuffled.slice(0, options.holdoutPuzzles);
  const trainSet = shuffled.slice(options.holdoutPuzzles);

  const pairRng = new Rng(options.seed + 1);
  const trainPairs = buildPairs(trainSet, pairRng, options.config.outsiderProbability);
  const heldOutPairs = holdout.length
    ? buildPairs(holdout, new Rng(options.seed + 2), options.config.outsiderProbability)
    : [];
  if (trainPairs.length === 0) {
    throw new Error(`no training pairs in ${options.dataDir}`);
  }
  if (options.verbose) {
    console.log(
      `training on ${trainPairs.length} pairs from ${trainSet.length} puzzles ` +
        `(${heldOutPairs.length} held-out pairs), backend ${backend}`
    );
  }

  const model = buildModel(options.config);
  model.compile({
    optimizer: tf.train.adam(options.learningRate),
    loss: "categoricalCrossentropy",
    metrics: ["accuracy"],
  });

  const { centers, laterals, labels } = pairsToTensors(trainPairs);
  try {
    await model.fit([centers, laterals], labels, {
      epochs: options.epochs,
      batchSize: options.batchSize,
      shuffle: false, // pairs are pre-shuffled with the seeded generator
      verbose: 0,
      callbacks: options.verbose
        ? {
            onEpochEnd: async (epoch, logs) => {
              console.log(
                `epoch ${epoch + 1}/${options.epochs}: loss=${logs?.loss?.toFixed(4)} acc=${logs?.acc?.toFixed(3)}`
              );
            },
          }
        : undefined,
    });
  } finally {
    centers.dispose();
    laterals.dispose();
    labels.dispose();
  }

  const trainAccuracy = accuracyOf(model, trainPairs);
  const heldOutAccuracy = heldOutPairs.length ? accuracyOf(model, heldOutPairs) : null;
  const meta: CheckpointMeta = {
    config: options.config,
    trainAccuracy,
    heldOutAccuracy,
    epochs: options.epochs,
    seed: options.seed,
    puzzles: puzzles.length,
  };
  await saveCheckpoint(model, meta, options.outDir);
  model.dispose();
  return {
    trainAccuracy,
    heldOutAccuracy,
    trainPairs: trainPairs.length,
    heldOutPairs: heldOutPairs.length,
    backend,
  };
}
