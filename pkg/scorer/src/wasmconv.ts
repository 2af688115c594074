import * as tf from "@tensorflow/tfjs";

/**
 * Strided 2D convolution that trains on the wasm backend.
 *
 * The wasm backend ships forward conv kernels and Conv2DBackpropInput but
 * not Conv2DBackpropFilter, so the stock conv layer cannot train there.
 * This layer supplies a custom gradient: the input gradient goes through
 * conv2dTranspose, and the filter gradient is assembled from one strided
 * slice + matMul per kernel tap, which are all supported kernels and run
 * at matMul speed.
 */

function samePadding(inSize: number, kernel: number, stride: number): [number, number] {
  const outSize = Math.ceil(inSize / stride);
  const padAlong = Math.max((outSize - 1) * stride + kernel - inSize, 0);
  const before = Math.floor(padAlong / 2);
  return [before, padAlong - before];
}

function filterGrad(
  x: tf.Tensor4D,
  dy: tf.Tensor4D,
  kernelSize: number,
  stride: number
): tf.Tensor4D {
  return tf.tidy(() => {
    const [batch, inH, inW, inC] = x.shape;
    const [, outH, outW, outC] = dy.shape;
    const [padTop, padBottom] = samePadding(inH, kernelSize, stride);
    const [padLeft, padRight] = samePadding(inW, kernelSize, stride);
    const xPad = tf.pad(x, [
      [0, 0],
      [padTop, padBottom],
      [padLeft, padRight],
      [0, 0],
    ]) as tf.Tensor4D;
    const dyFlat = dy.reshape([batch * outH * outW, outC]) as tf.Tensor2D;
    const taps: tf.Tensor[] = [];
    for (let kh = 0; kh < kernelSize; kh++) {
      for (let kw = 0; kw < kernelSize; kw++) {
        const patch = tf.stridedSlice(
          xPad,
          [0, kh, kw, 0],
          [batch, kh + stride * (outH - 1) + 1, kw + stride * (outW - 1) + 1, inC],
          [1, stride, stride, 1]
        );
        const flat = patch.reshape([batch * outH * outW, inC]) as tf.Tensor2D;
        taps.push(tf.matMul(flat, dyFlat, true, false)); // [inC, outC]
      }
    }
    return tf
      .stack(taps, 0)
      .reshape([kernelSize, kernelSize, inC, outC]) as tf.Tensor4D;
  });
}

export function convWithGrad(
  x: tf.Tensor4D,
  kernel: tf.Tensor4D,
  stride: number
): tf.Tensor4D {
  const kernelSize = kernel.shape[0];
  const run = tf.customGrad((xi, ki, save) => {
    const xt = xi as tf.Tensor4D;
    const kt = ki as tf.Tensor4D;
    (save as tf.GradSaveFunc)([xt, kt]);
    const value = tf.conv2d(xt, kt, stride, "same");
    const gradFunc = (dy: tf.Tensor4D, saved: tf.Tensor[]) => {
      const [xs, ks] = saved as [tf.Tensor4D, tf.Tensor4D];
      const dx = tf.conv2dTranspose(dy, ks, xs.shape, stride, "same");
      const dk = filterGrad(xs, dy, kernelSize, stride);
      return [dx, dk];
    };
    return { value, gradFunc };
  });
  return run(x, kernel) as tf.Tensor4D;
}

export interface TrainableConvArgs {
  filters: number;
  kernelSize: number;
  strides: number;
  seed?: number;
  name?: string;
}

export class TrainableConv extends tf.layers.Layer {
  static className = "TrainableConv";

  private readonly filters: number;
  private readonly kernelSize: number;
  private readonly strides: number;
  private readonly seed?: number;
  private kernel!: tf.LayerVariable;
  private bias!: tf.LayerVariable;

  constructor(args: TrainableConvArgs) {
    super({ name: args.name });
    this.filters = args.filters;
    this.kernelSize = args.kernelSize;
    this.strides = args.strides;
    this.seed = args.seed;
  }

  override build(inputShape: tf.Shape | tf.Shape[]): void {
    const shape = inputShape as tf.Shape;
    const inC = shape[3] as number;
    this.kernel = this.addWeight(
      "kernel",
      [this.kernelSize, this.kernelSize, inC, this.filters],
      "float32",
      tf.initializers.glorotUniform({ seed: this.seed })
    );
    this.bias = this.addWeight(
      "bias",
      [this.filters],
      "float32",
      tf.initializers.zeros()
    );
    this.built = true;
  }

  override computeOutputShape(inputShape: tf.Shape | tf.Shape[]): tf.Shape {
    const shape = inputShape as tf.Shape;
    const out = (n: number) => Math.ceil(n / this.strides);
    return [shape[0], out(shape[1] as number), out(shape[2] as number), this.filters];
  }

  override call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor {
    return tf.tidy(() => {
      const x = (Array.isArray(inputs) ? inputs[0] : inputs) as tf.Tensor4D;
      const y = convWithGrad(x, this.kernel.read() as tf.Tensor4D, this.strides);
      return tf.relu(tf.add(y, this.bias.read()));
    });
  }

  override getConfig(): tf.serialization.ConfigDict {
    return {
      ...super.getConfig(),
      filters: this.filters,
      kernelSize: this.kernelSize,
      strides: this.strides,
      seed: this.seed ?? null,
    };
  }

  static override fromConfig<T extends tf.serialization.Serializable>(
    cls: tf.serialization.SerializableConstructor<T>,
    config: tf.serialization.ConfigDict
  ): T {
    return new cls({
      filters: config["filters"],
      kernelSize: config["kernelSize"],
      strides: config["strides"],
      seed: config["seed"] ?? undefined,
      name: config["name"],
    } as unknown as TrainableConvArgs);
  }
}
tf.serialization.registerClass(TrainableConv);
