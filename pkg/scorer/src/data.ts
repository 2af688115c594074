import * as fs from "fs";
import * as path from "path";

import { Raster, readPng } from "./png";
import { Rng } from "./rng";
import { Assignment, OUTSIDER_CLASS, PuzzleInstance, classToIndex } from "./schema";

export const FRAGMENT_SIZE = 96;

export interface Puzzle {
  dir: string;
  instance: PuzzleInstance;
  truth: Assignment;
  pixels: Map<number, Raster>;
}

export interface Pair {
  center: Raster;
  lateral: Raster;
  /** Class index 0..8 (positions 1..8 then outsider). */
  label: number;
}

export function loadPuzzle(dir: string): Puzzle {
  const instance = JSON.parse(
    fs.readFileSync(path.join(dir, "instance.json"), "utf-8")
  ) as PuzzleInstance;
  const truth = JSON.parse(fs.readFileSync(path.join(dir, "truth.json"), "utf-8")) as Assignment;
  const pixels = new Map<number, Raster>();
  const files = instance.files ?? {};
  for (const fragment of instance.fragments) {
    const name = files[String(fragment)] ?? `frag_${fragment}.png`;
    const raster = readPng(path.join(dir, name));
    if (raster.width !== FRAGMENT_SIZE || raster.height !== FRAGMENT_SIZE) {
      throw new Error(`${name}: expected ${FRAGMENT_SIZE}x${FRAGMENT_SIZE}, got ${raster.width}x${raster.height}`);
    }
    pixels.set(fragment, raster);
  }
  return { dir, instance, truth, pixels };
}

export function loadPuzzleDirs(root: string): Puzzle[] {
  const dirs = fs
    .readdirSync(root, { withFileTypes: true })
    .filter((e) => e.isDirectory())
    .map((e) => path.join(root, e.name))
    .filter((d) => fs.existsSync(path.join(d, "instance.json")))
    .sort();
  if (dirs.length === 0) {
    throw new Error(`no puzzle directories under ${root}`);
  }
  return dirs.map(loadPuzzle);
}

/**
 * Center/lateral training pairs with cross-puzzle outsider substitution.
 *
 * Each genuine pair keeps its true position label; with the given
 * probability the lateral fragment is swapped for one from another puzzle
 * and the pair is labelled with the outsider class instead.
 */
export function buildPairs(puzzles: Puzzle[], rng: Rng, outsiderProbability = 0.1): Pair[] {
  const pairs: Pair[] = [];
  for (let i = 0; i < puzzles.length; i++) {
    const puzzle = puzzles[i];
    const center = puzzle.truth.center;
    if (center === null) continue;
    const centerPixels = puzzle.pixels.get(center);
    if (!centerPixels) continue;
    for (const placement of puzzle.truth.placements) {
      const lateral = puzzle.pixels.get(placement.fragment);
      if (!lateral) continue;
      if (puzzles.length > 1 && rng.next() < outsiderProbability) {
        let j = rng.int(puzzles.length - 1);
        if (j >= i) j += 1;
        const donor = puzzles[j];
        const donorIds = [...donor.pixels.keys()];
        const donorFragment = donorIds[rng.int(donorIds.length)];
        pairs.push({
          center: centerPixels,
          lateral: donor.pixels.get(donorFragment)!,
          label: classToIndex(OUTSIDER_CLASS),
        });
      } else {
        pairs.push({
          center: centerPixels,
          lateral,
          label: classToIndex(placement.position),
        });
      }
    }
  }
  return rng.shuffle(pairs);
}
