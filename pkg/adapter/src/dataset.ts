/**
 * Dataset loading with strict identity checking.
 *
 * Datasets live under a cache root (env `SELPRED_CACHE` by default) as JSON
 * files keyed by name/config/split/revision:
 *
 *   <cacheRoot>/datasets/<name>__<config>__<split>__<revision>.json
 *
 * Each file declares its own identity and carries the examples:
 *
 *   {"name": "...", "config": "...", "split": "...", "revision": "...",
 *    "examples": [{"id": "...", "question": "...", "choices": ["...", ...],
 *                  "answer_index": 0}, ...]}
 *
 * The declared identity must match the requested identity exactly; there is
 * no fallback to a default configuration. Examples whose gold answer cannot
 * be mapped to a valid option index are discarded and counted.
 */

import { readFileSync } from "node:fs";
import { join } from "node:path";

import { DataError } from "./errors.js";

export interface DatasetExample {
  id: string;
  question: string;
  choices: string[];
  answerIndex: number;
}

export interface DatasetIdentity {
  name: string;
  config: string;
  split: string;
  revision: string;
}

export interface LoadedDataset extends DatasetIdentity {
  examples: DatasetExample[];
  discardedCount: number;
  discardedIds: string[];
}

function slug(text: string): string {
  return text.replace(/[^A-Za-z0-9._-]+/g, "-");
}

export function datasetCachePath(cacheRoot: string, identity: DatasetIdentity): string {
  const stem = [identity.name, identity.config, identity.split, identity.revision].map(slug).join("__");
  return join(cacheRoot, "datasets", `${stem}.json`);
}

export function loadDataset(cacheRoot: string, identity: DatasetIdentity, limit?: number): LoadedDataset {
  const path = datasetCachePath(cacheRoot, identity);
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(path, "utf-8"));
  } catch (err) {
    throw new DataError(`cannot read dataset file ${path}: ${(err as Error).message}`);
  }
  if (typeof raw !== "object" || raw === null) {
    throw new DataError(`dataset file ${path} must hold a JSON object`);
  }
  const data = raw as Record<string, unknown>;

  for (const field of ["name", "config", "split", "revision"] as const) {
    if (data[field] !== identity[field]) {
      throw new DataError(
        `dataset identity mismatch: requested ${field}=${JSON.stringify(identity[field])} but file ` +
          `${path} declares ${field}=${JSON.stringify(data[field])}`,
      );
    }
  }
  if (!Array.isArray(data.examples)) {
    throw new DataError(`dataset file ${path}: examples must be an array`);
  }

  const examples: DatasetExample[] = [];
  const discardedIds: string[] = [];
  let rawExamples = data.examples as Record<string, unknown>[];
  if (limit !== undefined) {
    rawExamples = rawExamples.slice(0, limit);
  }
  rawExamples.forEach((ex, index) => {
    const id = typeof ex.id === "string" ? ex.id : `example-${index}`;
    const { question, choices, answer_index: answerIndex } = ex;
    const mappable =
      typeof question === "string" &&
      question.length > 0 &&
      Array.isArray(choices) &&
      choices.length >= 2 &&
      choices.every((c) => typeof c === "string") &&
      typeof answerIndex === "number" &&
      Number.isInteger(answerIndex) &&
      answerIndex >= 0 &&
      answerIndex < choices.length;
    if (!mappable) {
      discardedIds.push(id);
      return;
    }
    examples.push({
      id,
      question: question as string,
      choices: choices as string[],
      answerIndex: answerIndex as number,
    });
  });

  return { ...identity, examples, discardedCount: discardedIds.length, discardedIds };
}
