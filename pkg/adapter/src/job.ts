/**
 * Resumable scoring job: dataset -> engine run directory.
 *
 * Pipeline per eligible example: build the answer prompt, score every option
 * autoregressively (no sampling), take the length-normalized argmax as the
 * predicted answer, then collect True/False next-token logits for each
 * verification prompt variant.
 *
 * Records append to `records.jsonl.partial`; a checkpoint file storing
 * (examples_done, byte_offset) is replaced atomically every
 * checkpoint_interval examples. A rerun truncates the partial file to the
 * last checkpoint and continues; the final file is byte-identical to an
 * uninterrupted run because scoring is deterministic and order is fixed.
 * `manifest.json` is written last, so a directory with a manifest is always
 * complete.
 */

import {
  appendFileSync,
  existsSync,
  mkdirSync,
  readFileSync,
  renameSync,
  rmSync,
  statSync,
  truncateSync,
  writeFileSync,
} from "node:fs";
import { join } from "node:path";

import type { ModelBackend } from "./backend.js";
import { loadDataset, type DatasetExample, type LoadedDataset } from "./dataset.js";
import { ConfigurationError } from "./errors.js";
import { manifestText, recordLine, SCHEMA_VERSION, type RecordJson } from "./format.js";
import { shuffledOrder } from "./mt19937.js";
import { buildPrompt, buildVerifyPrompt, PROMPT_VARIANTS } from "./prompts.js";
import { buildTokenSets, type TokenSets } from "./tokensets.js";

export interface ScoringJob {
  modelId: string;
  datasetId: string;
  datasetConfig: string;
  datasetSplit: string;
  datasetRevision: string;
  cacheRoot: string;
  seed: number;
  promptVariants: string[];
  batchSize: number;
  maxSequenceTokens: number;
  checkpointInterval: number;
  outputDirectory: string;
  /** Optional cap on dataset examples (slice from the front, pre-shuffle). */
  limit?: number;
}

export function defaultJob(
  partial: Partial<ScoringJob> & Pick<ScoringJob, "modelId" | "datasetId" | "cacheRoot" | "outputDirectory">,
): ScoringJob {
  return {
    datasetConfig: "main",
    datasetSplit: "validation",
    datasetRevision: "v1",
    seed: 42,
    promptVariants: [...PROMPT_VARIANTS],
    batchSize: 8,
    maxSequenceTokens: 256,
    checkpointInterval: 100,
    ...partial,
  };
}

export interface JobHooks {
  /** Called after each example is written; throwing aborts (resumably). */
  onExampleDone?: (written: number) => void;
}

export interface JobSummary {
  outputDirectory: string;
  written: number;
  resumedFrom: number;
  discardedCount: number;
  overflowCount: number;
}

interface Checkpoint {
  examples_done: number;
  byte_offset: number;
}

const PARTIAL_NAME = "records.jsonl.partial";
const CHECKPOINT_NAME = "checkpoint.json";
const RECORDS_NAME = "records.jsonl";
const MANIFEST_NAME = "manifest.json";
const ERRORS_NAME = "errors.jsonl";

function validateJob(job: ScoringJob): void {
  if (job.batchSize < 1) throw new ConfigurationError(`batch_size must be >= 1, got ${job.batchSize}`);
  if (job.checkpointInterval < 1) {
    throw new ConfigurationError(`checkpoint_interval must be >= 1, got ${job.checkpointInterval}`);
  }
  if (job.maxSequenceTokens < 8) {
    throw new ConfigurationError(`max_sequence_tokens must be >= 8, got ${job.maxSequenceTokens}`);
  }
  if (job.promptVariants.length === 0) {
    throw new ConfigurationError("at least one prompt variant is required");
  }
  for (const variant of job.promptVariants) {
    buildVerifyPrompt("q", "a", variant); // throws ConfigurationError on unknown variants
  }
}

/**
 * Worst-case token length check. Eligibility uses the longest option as the
 * proposed answer so that the verify stage can never overflow mid-run.
 */
function overflowReason(backend: ModelBackend, job: ScoringJob, example: DatasetExample): string | null {
  const promptIds = backend.tokenizer.encode(buildPrompt(example.question, example.choices));
  const optionLengths = example.choices.map((c) => backend.tokenizer.encode(c).length);
  const worstScore = promptIds.length + Math.max(...optionLengths);
  if (worstScore > job.maxSequenceTokens) {
    return `answer scoring needs ${worstScore} tokens (cap ${job.maxSequenceTokens})`;
  }
  const longestOption = example.choices.reduce((a, b) =>
    backend.tokenizer.encode(b).length > backend.tokenizer.encode(a).length ? b : a,
  );
  for (const variant of job.promptVariants) {
    const verifyIds = backend.tokenizer.encode(buildVerifyPrompt(example.question, longestOption, variant));
    if (verifyIds.length > job.maxSequenceTokens) {
      return `verify prompt (${variant}) needs ${verifyIds.length} tokens (cap ${job.maxSequenceTokens})`;
    }
  }
  return null;
}

export function scoreOptions(backend: ModelBackend, prompt: string, options: string[]) {
  const promptIds = backend.tokenizer.encode(prompt);
  return options.map((option) => {
    const optionIds = backend.tokenizer.encode(option);
    const logprobs = backend.scoreTokens(promptIds, optionIds);
    return {
      token_count: optionIds.length,
      sum_logprob: logprobs.reduce((a, b) => a + b, 0),
    };
  });
}

export function verifyLogits(backend: ModelBackend, verifyPrompt: string, tokenSets: TokenSets) {
  const contextIds = backend.tokenizer.encode(verifyPrompt);
  return {
    true_logits: backend.nextTokenLogits(contextIds, tokenSets.trueIds),
    false_logits: backend.nextTokenLogits(contextIds, tokenSets.falseIds),
    fallback_used: tokenSets.fallbackUsed,
  };
}

function predictedIndex(options: { token_count: number; sum_logprob: number }[]): number {
  let best = 0;
  let bestScore = options[0].sum_logprob / options[0].token_count;
  for (let i = 1; i < options.length; i++) {
    const score = options[i].sum_logprob / options[i].token_count;
    if (score > bestScore) {
      best = i;
      bestScore = score;
    }
  }
  return best;
}

function scoreExample(
  backend: ModelBackend,
  job: ScoringJob,
  tokenSets: TokenSets,
  example: DatasetExample,
  orderIndex: number,
): RecordJson {
  const prompt = buildPrompt(example.question, example.choices);
  const options = scoreOptions(backend, prompt, example.choices);
  const predicted = example.choices[predictedIndex(options)];
  const verify: RecordJson["verify"] = {};
  for (const variant of job.promptVariants) {
    verify[variant] = verifyLogits(backend, buildVerifyPrompt(example.question, predicted, variant), tokenSets);
  }
  return {
    schema_version: SCHEMA_VERSION,
    example_id: example.id,
    order_index: orderIndex,
    gold_index: example.answerIndex,
    options,
    verify,
  };
}

function readCheckpoint(dir: string): Checkpoint | null {
  const path = join(dir, CHECKPOINT_NAME);
  if (!existsSync(path)) return null;
  const parsed = JSON.parse(readFileSync(path, "utf-8")) as Checkpoint;
  if (!Number.isInteger(parsed.examples_done) || !Number.isInteger(parsed.byte_offset)) {
    throw new ConfigurationError(`corrupt checkpoint file ${path}`);
  }
  return parsed;
}

function writeCheckpoint(dir: string, checkpoint: Checkpoint): void {
  const path = join(dir, CHECKPOINT_NAME);
  writeFileSync(path + ".tmp", JSON.stringify(checkpoint) + "\n");
  renameSync(path + ".tmp", path);
}

export function runJob(job: ScoringJob, backend: ModelBackend, hooks: JobHooks = {}): JobSummary {
  validateJob(job);
  const dir = job.outputDirectory;
  mkdirSync(dir, { recursive: true });

  const dataset: LoadedDataset = loadDataset(
    job.cacheRoot,
    {
      name: job.datasetId,
      config: job.datasetConfig,
      split: job.datasetSplit,
      revision: job.datasetRevision,
    },
    job.limit,
  );

  // Overflow prefilter keeps order indices contiguous over scored examples.
  const eligible: DatasetExample[] = [];
  const errorLines: string[] = [];
  for (const example of dataset.examples) {
    const reason = overflowReason(backend, job, example);
    if (reason === null) {
      eligible.push(example);
    } else {
      errorLines.push(JSON.stringify({ example_id: example.id, error: "sequence_overflow", detail: reason }));
    }
  }
  if (eligible.length === 0) {
    throw new ConfigurationError("no eligible examples to score");
  }

  const order = shuffledOrder(eligible.length, job.seed);
  const sequence = order.map((i) => eligible[i]);
  const tokenSets = buildTokenSets(backend.tokenizer);

  const partialPath = join(dir, PARTIAL_NAME);
  const checkpoint = readCheckpoint(dir);
  let done = 0;
  if (checkpoint !== null && existsSync(partialPath)) {
    const size = statSync(partialPath).size;
    if (checkpoint.byte_offset > size || checkpoint.examples_done > sequence.length) {
      throw new ConfigurationError(`checkpoint in ${dir} does not match the partial records file`);
    }
    truncateSync(partialPath, checkpoint.byte_offset);
    done = checkpoint.examples_done;
  } else {
    writeFileSync(partialPath, "");
  }
  const resumedFrom = done;
  let byteOffset = statSync(partialPath).size;

  while (done < sequence.length) {
    const batch = sequence.slice(done, Math.min(done + job.batchSize, sequence.length));
    for (const example of batch) {
      const record = scoreExample(backend, job, tokenSets, example, done);
      const line = recordLine(record) + "\n";
      appendFileSync(partialPath, line);
      byteOffset += Buffer.byteLength(line, "utf-8");
      done += 1;
      if (done % job.checkpointInterval === 0) {
        writeCheckpoint(dir, { examples_done: done, byte_offset: byteOffset });
      }
      hooks.onExampleDone?.(done);
    }
  }

  if (errorLines.length > 0) {
    writeFileSync(join(dir, ERRORS_NAME), errorLines.join("\n") + "\n");
  }
  renameSync(partialPath, join(dir, RECORDS_NAME));
  writeFileSync(
    join(dir, MANIFEST_NAME),
    manifestText({
      schema_version: SCHEMA_VERSION,
      dataset_name: job.datasetId,
      dataset_config: job.datasetConfig,
      dataset_split: job.datasetSplit,
      dataset_revision: job.datasetRevision,
      model_id: backend.modelId,
      seed: job.seed,
      prompt_variants: [...job.promptVariants],
      true_token_ids: tokenSets.trueIds,
      false_token_ids: tokenSets.falseIds,
      example_count: sequence.length,
      metadata: {
        discarded_count: dataset.discardedCount,
        overflow_count: errorLines.length,
        precision: backend.precision,
        pad_token_id: backend.tokenizer.padTokenId,
        token_set_fallback_used: tokenSets.fallbackUsed,
      },
    }),
  );
  rmSync(join(dir, CHECKPOINT_NAME), { force: true });

  return {
    outputDirectory: dir,
    written: sequence.length,
    resumedFrom,
    discardedCount: dataset.discardedCount,
    overflowCount: errorLines.length,
  };
}
