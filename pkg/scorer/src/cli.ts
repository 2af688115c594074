#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { DEFAULT_CONFIG } from "./model";
import { scoreInstance } from "./score";
import { writeToyDataset } from "./toydata";
import { DEFAULT_TRAIN, train } from "./train";

void yargs(hideBin(process.argv))
  .command(
    "train",
    "Train the pair classifier on fragmented puzzles",
    (y) =>
      y
        .option("data", { type: "string", demandOption: true, describe: "Directory of puzzle directories" })
        .option("out", { type: "string", demandOption: true, describe: "Checkpoint directory" })
        .option("epochs", { type: "number", default: DEFAULT_TRAIN.epochs })
        .option("batch", { type: "number", default: DEFAULT_TRAIN.batchSize })
        .option("lr", { type: "number", default: DEFAULT_TRAIN.learningRate })
        .option("seed", { type: "number", default: DEFAULT_TRAIN.seed })
        .option("holdout", { type: "number", default: DEFAULT_TRAIN.holdoutPuzzles })
        .option("feature-width", { type: "number", default: DEFAULT_CONFIG.featureWidth })
        .option("projection", { type: "number", default: DEFAULT_CONFIG.projectionWidth })
        .option("outsider-prob", { type: "number", default: DEFAULT_CONFIG.outsiderProbability }),
    async (argv) => {
      const result = await train({
        dataDir: argv.data,
        outDir: argv.out,
        epochs: argv.epochs,
        batchSize: argv.batch,
        learningRate: argv.lr,
        seed: argv.seed,
        holdoutPuzzles: argv.holdout,
        config: {
          ...DEFAULT_CONFIG,
          featureWidth: argv["feature-width"],
          projectionWidth: argv.projection,
          outsiderProbability: argv["outsider-prob"],
        },
        verbose: true,
      });
      console.log(JSON.stringify(result, null, 2));
    }
  )
  .command(
    "score",
    "Emit a prediction matrix for one puzzle instance",
    (y) =>
      y
        .option("ckpt", { type: "string", demandOption: true })
        .option("instance", { type: "string", demandOption: true, describe: "Puzzle directory" })
        .option("center", { type: "number", default: 0 })
        .option("output", { alias: "o", type: "string", demandOption: true }),
    async (argv) => {
      await scoreInstance(argv.ckpt, argv.instance, argv.center, argv.output);
      console.log(`wrote ${argv.output}`);
    }
  )
  .command(
    "toydata",
    "Generate synthetic source images",
    (y) =>
      y
        .option("out", { type: "string", demandOption: true })
        .option("count", { type: "number", default: 50 })
        .option("seed", { type: "number", default: 1 })
        .option("size", { type: "number", default: 512 }),
    (argv) => {
      const paths = writeToyDataset(argv.out, argv.count, argv.seed, argv.size);
      console.log(`wrote ${paths.length} images to ${argv.out}`);
    }
  )
  .demandCommand(1)
  .strict()
  .help()
  .parse();
