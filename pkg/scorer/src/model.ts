import * as tf from "@tensorflow/tfjs";

import { CLASS_COUNT } from "./schema";
import { FRAGMENT_SIZE } from "./data";
import { TrainableConv } from "./wasmconv";

export interface ModelConfig {
  fragmentSize: number;
  featureWidth: number;
  convChannels: number[];
  headWidths: [number, number];
  /** Project embeddings down before the outer product (0 disables it). */
  projectionWidth: number;
  outsiderProbability: number;
  seed: number;
}

export const DEFAULT_CONFIG: ModelConfig = {
  fragmentSize: FRAGMENT_SIZE,
  featureWidth: 512,
  convChannels: [16, 32, 64, 128, 256],
  headWidths: [64, 32],
  projectionWidth: 0,
  outsiderProbability: 0.1,
  seed: 1234,
};

/** Same architecture at a width that trains in minutes on a laptop CPU. */
export const DESK_CONFIG: ModelConfig = {
  ...DEFAULT_CONFIG,
  convChannels: [4, 8, 16, 32, 64],
  projectionWidth: 64,
};

/**
 * Pairwise multiplicative feature combination: the flattened outer product
 * of the two embeddings, so every feature of one fragment can gate every
 * feature of the other.
 */
class OuterProduct extends tf.layers.Layer {
  static className = "OuterProduct";

  computeOutputShape(inputShape: tf.Shape[]): tf.Shape {
    const [a, b] = inputShape;
    return [a[0], (a[1] as number) * (b[1] as number)];
  }

  call(inputs: tf.Tensor[]): tf.Tensor {
    return tf.tidy(() => {
      const [a, b] = inputs;
      const dim = a.shape[1]! * b.shape[1]!;
      return tf
        .matMul(a.expandDims(2), b.expandDims(1))
        .reshape([-1, dim]);
    });
  }
}
tf.serialization.registerClass(OuterProduct);

/** Shared-weight feature extractor: five convolutions then a dense layer. */
export function buildFeatureExtractor(config: ModelConfig): tf.LayersModel {
  const input = tf.input({ shape: [config.fragmentSize, config.fragmentSize, 3] });
  let x = tf.layers.rescaling({ scale: 2.0, offset: -1.0 }).apply(input) as tf.SymbolicTensor;
  config.convChannels.forEach((filters, i) => {
    x = new TrainableConv({
      filters,
      kernelSize: i === 0 ? 5 : 3,
      strides: 2,
      seed: config.seed + i,
      name: `conv${i + 1}`,
    }).apply(x) as tf.SymbolicTensor;
  });
  x = tf.layers.flatten().apply(x) as tf.SymbolicTensor;
  x = tf.layers
    .dense({
      units: config.featureWidth,
      activation: "relu",
      kernelInitializer: tf.initializers.glorotUniform({ seed: config.seed + 10 }),
    })
    .apply(x) as tf.SymbolicTensor;
  return tf.model({ inputs: input, outputs: x, name: "features" });
}

/** Full pair classifier: Siamese features, outer product, three dense layers. */
export function buildModel(config: ModelConfig = DEFAULT_CONFIG): tf.LayersModel {
  const centerInput = tf.input({ shape: [config.fragmentSize, config.fragmentSize, 3], name: "center" });
  const lateralInput = tf.input({ shape: [config.fragmentSize, config.fragmentSize, 3], name: "lateral" });
  const features = buildFeatureExtractor(config);
  let a = features.apply(centerInput) as tf.SymbolicTensor;
  let b = features.apply(lateralInput) as tf.SymbolicTensor;
  if (config.projectionWidth > 0) {
    const projection = tf.layers.dense({
      units: config.projectionWidth,
      activation: "relu",
      name: "projection",
      kernelInitializer: tf.initializers.glorotUniform({ seed: config.seed + 11 }),
    });
    a = projection.apply(a) as tf.SymbolicTensor;
    b = projection.apply(b) as tf.SymbolicTensor;
  }
  let x = new OuterProduct({}).apply([a, b]) as tf.SymbolicTensor;
  const widths: number[] = [...config.headWidths, CLASS_COUNT];
  widths.forEach((units, i) => {
    x = tf.layers
      .dense({
        units,
        useBias: false,
        kernelInitializer: tf.initializers.glorotUniform({ seed: config.seed + 20 + i }),
      })
      .apply(x) as tf.SymbolicTensor;
    x = tf.layers.batchNormalization({ momentum: 0.9 }).apply(x) as tf.SymbolicTensor;
    x = (i < widths.length - 1 ? tf.layers.reLU() : tf.layers.softmax()).apply(x) as tf.SymbolicTensor;
  });
  return tf.model({ inputs: [centerInput, lateralInput], outputs: x, name: "pair_classifier" });
}

export async function useBestBackend(): Promise<string> {
  try {
    require("@tensorflow/tfjs-backend-wasm");
    await tf.setBackend("wasm");
  } catch {
    await tf.setBackend("cpu");
  }
  await tf.ready();
  return tf.getBackend();
}
