import * as tf from "@tensorflow/tfjs";
import { beforeAll, describe, expect, it } from "vitest";

import { loadCheckpoint, saveCheckpoint } from "../src/checkpoint";
import { DESK_CONFIG, buildFeatureExtractor, buildModel, useBestBackend } from "../src/model";
import { convWithGrad } from "../src/wasmconv";
import { tmpDir } from "./helpers";

beforeAll(async () => {
  await useBestBackend();
});

describe("custom conv", () => {
  it("filter gradient matches finite differences", async () => {
    const x = tf.randomNormal([2, 8, 8, 2], 0, 1, "float32", 11) as tf.Tensor4D;
    const k = tf.randomNormal([3, 3, 2, 4], 0, 0.5, "float32", 12) as tf.Tensor4D;
    const loss = (kk: tf.Tensor4D) => convWithGrad(x, kk, 2).sum() as tf.Scalar;
    const grad = tf.grad((kk) => loss(kk as tf.Tensor4D))(k);
    const gradVals = await grad.data();
    const kVals = await k.data();
    const eps = 1e-2;
    for (const flat of [0, 7, 35, 71]) {
      const bump = kVals.slice();
      bump[flat] += eps;
      const dent = kVals.slice();
      dent[flat] -= eps;
      const up = (await loss(tf.tensor4d(bump, k.shape as [number, number, number, number])).data())[0];
      const down = (await loss(tf.tensor4d(dent, k.shape as [number, number, number, number])).data())[0];
      const numeric = (up - down) / (2 * eps);
      expect(Math.abs(numeric - gradVals[flat])).toBeLessThan(1e-2 * Math.max(1, Math.abs(numeric)));
    }
  });

  it("forward pass equals the stock conv op", async () => {
    const x = tf.randomNormal([1, 16, 16, 3], 0, 1, "float32", 21) as tf.Tensor4D;
    const k = tf.randomNormal([5, 5, 3, 8], 0, 0.5, "float32", 22) as tf.Tensor4D;
    const custom = convWithGrad(x, k, 2);
    const stock = tf.conv2d(x, k, 2, "same");
    const diff = (await custom.sub(stock).abs().max().data())[0];
    expect(diff).toBeLessThan(1e-5);
  });
});

describe("pair classifier", () => {
  it("emits one distribution over nine classes per pair", async () => {
    const model = buildModel(DESK_CONFIG);
    const a = tf.randomUniform([3, 96, 96, 3]);
    const out = model.predict([a, a]) as tf.Tensor2D;
    expect(out.shape).toEqual([3, 9]);
    const rows = (await out.array()) as number[][];
    for (const row of rows) {
      const sum = row.reduce((p, q) => p + q, 0);
      expect(Math.abs(sum - 1)).toBeLessThan(1e-5);
      expect(Math.min(...row)).toBeGreaterThanOrEqual(0);
    }
    model.dispose();
  });

  it("shares feature weights between the two branches", async () => {
    const features = buildFeatureExtractor(DESK_CONFIG);
    const x = tf.randomUniform([2, 96, 96, 3], 0, 1, "float32", 31);
    const first = (await (features.predict(x) as tf.Tensor).data()) as Float32Array;
    const second = (await (features.predict(x) as tf.Tensor).data()) as Float32Array;
    expect(Buffer.from(first.buffer).equals(Buffer.from(second.buffer))).toBe(true);
    // and the pair model reuses one extractor: identical inputs reach the
    // combination layer as identical embeddings, so swapping inputs of a
    // symmetric pair changes nothing
    const model = buildModel(DESK_CONFIG);
    const one = tf.randomUniform([1, 96, 96, 3], 0, 1, "float32", 32);
    const ab = (await (model.predict([one, one]) as tf.Tensor).data()) as Float32Array;
    const ba = (await (model.predict([one, one]) as tf.Tensor).data()) as Float32Array;
    expect(Buffer.from(ab.buffer).equals(Buffer.from(ba.buffer))).toBe(true);
    model.dispose();
  });

  it("checkpoints round-trip bit-identically", async () => {
    const model = buildModel(DESK_CONFIG);
    const dir = tmpDir("ckpt-");
    await saveCheckpoint(
      model,
      {
        config: DESK_CONFIG,
        trainAccuracy: null,
        heldOutAccuracy: null,
        epochs: 0,
        seed: 1,
        puzzles: 0,
      },
      dir
    );
    const { model: reloaded, meta } = await loadCheckpoint(dir);
    expect(meta.config.featureWidth).toBe(DESK_CONFIG.featureWidth);
    const a = tf.randomUniform([2, 96, 96, 3], 0, 1, "float32", 41);
    const b = tf.randomUniform([2, 96, 96, 3], 0, 1, "float32", 42);
    const before = (await (model.predict([a, b]) as tf.Tensor).data()) as Float32Array;
    const after = (await (reloaded.predict([a, b]) as tf.Tensor).data()) as Float32Array;
    expect(Buffer.from(before.buffer).equals(Buffer.from(after.buffer))).toBe(true);
    model.dispose();
    reloaded.dispose();
  });
});
