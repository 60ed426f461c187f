import { mkdirSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";

import { datasetCachePath, type DatasetIdentity } from "../src/dataset.js";

export const DEMO_IDENTITY: DatasetIdentity = {
  name: "demo-qa",
  config: "main",
  split: "validation",
  revision: "v1",
};

export interface DemoDatasetOptions {
  n: number;
  unmappable?: number;
  oversized?: number;
}

/** Deterministic toy QA dataset written into the cache layout. */
export function writeDemoDataset(
  cacheRoot: string,
  options: DemoDatasetOptions,
  identity: DatasetIdentity = DEMO_IDENTITY,
): string {
  const examples: Record<string, unknown>[] = [];
  for (let i = 0; i < options.n; i++) {
    examples.push({
      id: `q${String(i).padStart(4, "0")}`,
      question: `Which container holds sample number ${i} after step ${i % 7}?`,
      choices: [
        `the red flask ${i}`,
        `the blue beaker labeled ${i % 5}`,
        `tray ${i} on the lower shelf`,
        `none of the listed containers`,
      ],
      answer_index: i % 4,
    });
  }
  for (let i = 0; i < (options.unmappable ?? 0); i++) {
    examples.push({
      id: `bad${i}`,
      question: `Unmappable question ${i}?`,
      choices: ["a", "b", "c"],
      answer_index: 7, // outside [0, K)
    });
  }
  for (let i = 0; i < (options.oversized ?? 0); i++) {
    examples.push({
      id: `big${i}`,
      question: Array.from({ length: 400 }, (_, w) => `filler${w}`).join(" "),
      choices: ["yes", "no"],
      answer_index: 0,
    });
  }
  const path = datasetCachePath(cacheRoot, identity);
  mkdirSync(dirname(path), { recursive: true });
  writeFileSync(path, JSON.stringify({ ...identity, examples }, null, 2));
  return path;
}

let counter = 0;

export function freshDir(prefix: string): string {
  counter += 1;
  const dir = join(tmpdir(), `selpred-adapter-${process.pid}-${counter}-${prefix}`);
  mkdirSync(dir, { recursive: true });
  return dir;
}
