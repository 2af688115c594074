import { execFileSync } from "child_process";
import * as fs from "fs";
import * as os from "os";
import * as path from "path";

/** Run the solver package's CLI; it must be on PATH. */
export function solverCli(args: string[]): string {
  return execFileSync("reassembly", args, { encoding: "utf-8" });
}

export function haveSolverCli(): boolean {
  try {
    solverCli(["--help"]);
    return true;
  } catch {
    return false;
  }
}

export function tmpDir(prefix: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), prefix));
}

/** Exact upper-tail binomial probability P(X >= k) for X ~ Bin(n, p). */
export function binomialTail(k: number, n: number, p: number): number {
  if (k <= 0) return 1;
  const logP = Math.log(p);
  const logQ = Math.log(1 - p);
  let logChoose = 0; // log C(n, 0)
  let total = 0;
  for (let i = 0; i <= n; i++) {
    if (i >= k) {
      total += Math.exp(logChoose + i * logP + (n - i) * logQ);
    }
    logChoose += Math.log(n - i) - Math.log(i + 1);
  }
  return total;
}
