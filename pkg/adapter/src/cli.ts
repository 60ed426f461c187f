#!/usr/bin/env node
/**
 * `score` command: produce an engine run directory from a model and dataset.
 *
 *   selpred-score score --model deterministic/standard \
 *     --dataset demo-qa --config main --split validation --revision v1 \
 *     --seed 42 --variants default,audit_v1 --out runs/demo
 *
 * The dataset is resolved under the cache root (`--cache-root`, falling back
 * to $SELPRED_CACHE, then ./selpred-cache). Exit codes: 0 success,
 * 1 data/validation error, 2 configuration error, 3 interrupted (resumable).
 */

import { resolveModel } from "./backend.js";
import { ConfigurationError, DataError, JobInterrupted, UnsupportedTokenizerError } from "./errors.js";
import { defaultJob, runJob } from "./job.js";

interface ParsedArgs {
  values: Map<string, string>;
  command: string | null;
}

const FLAGS = new Set([
  "--model", "--dataset", "--config", "--split", "--revision", "--seed",
  "--variants", "--out", "--cache-root", "--batch-size", "--max-tokens",
  "--checkpoint-interval", "--limit",
]);

function parseArgs(argv: string[]): ParsedArgs {
  const values = new Map<string, string>();
  let command: string | null = null;
  let i = 0;
  while (i < argv.length) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      if (command !== null) throw new ConfigurationError(`unexpected argument ${JSON.stringify(arg)}`);
      command = arg;
      i += 1;
      continue;
    }
    if (!FLAGS.has(arg)) throw new ConfigurationError(`unknown flag ${arg}`);
    const value = argv[i + 1];
    if (value === undefined) throw new ConfigurationError(`flag ${arg} needs a value`);
    values.set(arg, value);
    i += 2;
  }
  return { values, command };
}

function intFlag(values: Map<string, string>, flag: string, fallback: number): number {
  const raw = values.get(flag);
  if (raw === undefined) return fallback;
  const parsed = Number(raw);
  if (!Number.isInteger(parsed)) throw new ConfigurationError(`flag ${flag} must be an integer, got ${raw}`);
  return parsed;
}

function require(values: Map<string, string>, flag: string): string {
  const value = values.get(flag);
  if (value === undefined) throw new ConfigurationError(`missing required flag ${flag}`);
  return value;
}

export function main(argv: string[]): number {
  try {
    const { values, command } = parseArgs(argv);
    if (command !== "score") {
      throw new ConfigurationError(`unknown command ${JSON.stringify(command)} (expected: score)`);
    }
    const job = defaultJob({
      modelId: require(values, "--model"),
      datasetId: require(values, "--dataset"),
      datasetConfig: values.get("--config") ?? "main",
      datasetSplit: values.get("--split") ?? "validation",
      datasetRevision: values.get("--revision") ?? "v1",
      cacheRoot: values.get("--cache-root") ?? process.env.SELPRED_CACHE ?? "selpred-cache",
      outputDirectory: require(values, "--out"),
      seed: intFlag(values, "--seed", 42),
      batchSize: intFlag(values, "--batch-size", 8),
      maxSequenceTokens: intFlag(values, "--max-tokens", 256),
      checkpointInterval: intFlag(values, "--checkpoint-interval", 100),
      limit: values.has("--limit") ? intFlag(values, "--limit", 0) : undefined,
      promptVariants: (values.get("--variants") ?? "default,audit_v1").split(",").map((v) => v.trim()),
    });
    const backend = resolveModel(job.modelId);
    const summary = runJob(job, backend);
    const resumed = summary.resumedFrom > 0 ? ` (resumed from ${summary.resumedFrom})` : "";
    console.log(
      `wrote ${summary.written} records to ${summary.outputDirectory}${resumed}; ` +
        `discarded ${summary.discardedCount}, overflow ${summary.overflowCount}`,
    );
    return 0;
  } catch (err) {
    if (err instanceof JobInterrupted) {
      console.error(String(err.message));
      return 3;
    }
    if (err instanceof ConfigurationError) {
      console.error(`configuration error: ${err.message}`);
      return 2;
    }
    if (err instanceof DataError || err instanceof UnsupportedTokenizerError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const isDirectRun = process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
