import * as fs from "fs";
import { PNG } from "pngjs";

export interface Raster {
  width: number;
  height: number;
  /** RGB, row-major, 3 bytes per pixel. */
  data: Uint8Array;
}

export function readPng(path: string): Raster {
  const png = PNG.sync.read(fs.readFileSync(path));
  const data = new Uint8Array(png.width * png.height * 3);
  for (let i = 0; i < png.width * png.height; i++) {
    data[i * 3] = png.data[i * 4];
    data[i * 3 + 1] = png.data[i * 4 + 1];
    data[i * 3 + 2] = png.data[i * 4 + 2];
  }
  return { width: png.width, height: png.height, data };
}

export function writePng(path: string, raster: Raster): void {
  const png = new PNG({ width: raster.width, height: raster.height });
  for (let i = 0; i < raster.width * raster.height; i++) {
    png.data[i * 4] = raster.data[i * 3];
    png.data[i * 4 + 1] = raster.data[i * 3 + 1];
    png.data[i * 4 + 2] = raster.data[i * 3 + 2];
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(path, PNG.sync.write(png));
}

/** Pixels scaled to [0, 1] as Float32, shape-compatible with [h, w, 3]. */
export function toFloats(raster: Raster): Float32Array {
  const out = new Float32Array(raster.data.length);
  for (let i = 0; i < raster.data.length; i++) {
    out[i] = raster.data[i] / 255;
  }
  return out;
}
