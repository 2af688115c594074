/** JSON wire formats shared with the solver package. */

export interface MatrixRow {
  fragment: number;
  /** Position classes 1-8 then the outsider class, in that order. */
  probs: number[];
}

export interface PredictionMatrix {
  center: number;
  rows: MatrixRow[];
}

export interface Placement {
  fragment: number;
  position: number;
}

export interface Assignment {
  center: number | null;
  placements: Placement[];
  empties: number[];
}

export interface PuzzleInstance {
  fragments: number[];
  known_center: number | null;
  n_missing: number;
  n_outsiders: number;
  files?: Record<string, string>;
}

export const OUTSIDER_CLASS = 9;
export const CLASS_COUNT = 9;

export function classToIndex(code: number): number {
  if (code < 1 || code > 9) {
    throw new Error(`position class ${code} out of range 1..9`);
  }
  return code === OUTSIDER_CLASS ? 8 : code - 1;
}

export function checkMatrixRows(matrix: PredictionMatrix, tolerance = 1e-5): void {
  for (const row of matrix.rows) {
    if (row.probs.length !== CLASS_COUNT) {
      throw new Error(`fragment ${row.fragment}: expected ${CLASS_COUNT} probabilities`);
    }
    const sum = row.probs.reduce((a, b) => a + b, 0);
    if (Math.abs(sum - 1) > tolerance) {
      throw new Error(`fragment ${row.fragment}: probabilities sum to ${sum}`);
    }
    if (row.probs.some((p) => p < 0)) {
      throw new Error(`fragment ${row.fragment}: negative probability`);
    }
  }
}
