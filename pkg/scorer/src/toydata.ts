import * as fs from "fs";
import * as path from "path";

import { Raster, writePng } from "./png";
import { Rng } from "./rng";

/**
 * Synthetic images with the kind of shared spatial conventions real
 * pictures have (sky up, background at the edges): red always brightens
 * to the right and green downwards, at a random strength per image, while
 * blue carries a random per-image gradient plus soft blobs that act as an
 * image identity. A crop's content therefore encodes where it came from,
 * and cross-image pairs look inconsistent.
 */
export function makeToyImage(rng: Rng, size = 512): Raster {
  const data = new Uint8Array(size * size * 3);
  const coeffs = [
    { ax: 0.6 + rng.next() * 0.4, ay: (rng.next() - 0.5) * 0.3, base: 40 + rng.next() * 80, amp: 110 + rng.next() * 60 },
    { ax: (rng.next() - 0.5) * 0.3, ay: 0.6 + rng.next() * 0.4, base: 40 + rng.next() * 80, amp: 110 + rng.next() * 60 },
    { ax: (rng.next() - 0.5) * 2, ay: (rng.next() - 0.5) * 2, base: 40 + rng.next() * 175, amp: 80 + rng.next() * 120 },
  ];
  const blobs = [];
  for (let b = 0; b < 5; b++) {
    blobs.push({
      x: rng.next() * size,
      y: rng.next() * size,
      r: 30 + rng.next() * 80,
      weight: (rng.next() - 0.5) * 120,
      channel: rng.int(3),
    });
  }
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const i = (y * size + x) * 3;
      for (let c = 0; c < 3; c++) {
        const g = coeffs[c];
        let v = g.base + g.amp * ((g.ax * x) / size + (g.ay * y) / size);
        for (const blob of blobs) {
          if (blob.channel === c) {
            const d2 = (x - blob.x) ** 2 + (y - blob.y) ** 2;
            v += blob.weight * Math.exp(-d2 / (2 * blob.r * blob.r));
          }
        }
        data[i + c] = Math.max(0, Math.min(255, Math.round(v)));
      }
    }
  }
  return { width: size, height: size, data };
}

export function writeToyDataset(root: string, count: number, seed: number, size = 512): string[] {
  fs.mkdirSync(root, { recursive: true });
  const rng = new Rng(seed);
  const paths: string[] = [];
  for (let i = 0; i < count; i++) {
    const file = path.join(root, `toy_${String(i).padStart(3, "0")}.png`);
    writePng(file, makeToyImage(rng, size));
    paths.push(file);
  }
  return paths;
}
