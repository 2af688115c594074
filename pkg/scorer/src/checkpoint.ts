import * as fs from "fs";
import * as path from "path";

import * as tf from "@tensorflow/tfjs";

import { ModelConfig } from "./model";

export interface CheckpointMeta {
  config: ModelConfig;
  trainAccuracy: number | null;
  heldOutAccuracy: number | null;
  epochs: number;
  seed: number;
  puzzles: number;
}

export async function saveCheckpoint(
  model: tf.LayersModel,
  meta: CheckpointMeta,
  dir: string
): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(
    tf.io.withSaveHandler(async (artifacts) => {
      fs.writeFileSync(
        path.join(dir, "model.json"),
        JSON.stringify({
          modelTopology: artifacts.modelTopology,
          weightSpecs: artifacts.weightSpecs,
          format: artifacts.format,
          generatedBy: artifacts.generatedBy,
        })
      );
      const weights = artifacts.weightData as ArrayBuffer;
      fs.writeFileSync(path.join(dir, "weights.bin"), Buffer.from(weights));
      return {
        modelArtifactsInfo: {
          dateSaved: new Date(),
          modelTopologyType: "JSON",
        },
      };
    })
  );
  fs.writeFileSync(path.join(dir, "config.json"), JSON.stringify(meta, null, 2));
}

export async function loadCheckpoint(dir: string): Promise<{ model: tf.LayersModel; meta: CheckpointMeta }> {
  const stored = JSON.parse(fs.readFileSync(path.join(dir, "model.json"), "utf-8"));
  const weightData = fs.readFileSync(path.join(dir, "weights.bin"));
  const model = await tf.loadLayersModel(
    tf.io.fromMemory({
      modelTopology: stored.modelTopology,
      weightSpecs: stored.weightSpecs,
      weightData: weightData.buffer.slice(
        weightData.byteOffset,
        weightData.byteOffset + weightData.byteLength
      ),
    })
  );
  const meta = JSON.parse(fs.readFileSync(path.join(dir, "config.json"), "utf-8")) as CheckpointMeta;
  return { model, meta };
}
