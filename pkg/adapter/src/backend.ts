/**
 * Model backend interface and the built-in deterministic backends.
 *
 * A backend supplies a tokenizer, per-token continuation log-probs, and
 * next-token logits at the final prompt position. The deterministic backends
 * derive both from a hash of the local token context: no weights, no
 * sampling, identical output for identical input regardless of batch size,
 * which is exactly what the format and resume machinery need to be tested
 * against. Real model servers plug in through the same interface.
 */

import { ConfigurationError } from "./errors.js";
import {
  capsSplittingTokenizer,
  digitsOnlyTokenizer,
  fnv1a,
  standardTokenizer,
  type Tokenizer,
} from "./tokenizer.js";

export interface ModelBackend {
  readonly modelId: string;
  readonly tokenizer: Tokenizer;
  /** Precision label recorded in the run manifest. */
  readonly precision: string;
  /**
   * Log-probability of each continuation token given the context and the
   * preceding continuation tokens. Length equals continuationIds.length.
   */
  scoreTokens(contextIds: number[], continuationIds: number[]): number[];
  /** Next-token logits at the final context position, restricted to `ids`. */
  nextTokenLogits(contextIds: number[], ids: number[]): number[];
}

const CONTEXT_WINDOW = 8;
const SCORE_SALT = 0x5c07e5;
const LOGIT_SALT = 0x10617;

function hashUnit(ids: number[], candidate: number, salt: number): number {
  let h = (0x811c9dc5 ^ salt) >>> 0;
  const start = Math.max(0, ids.length - CONTEXT_WINDOW);
  for (let i = start; i < ids.length; i++) {
    h = (h ^ ids[i]) >>> 0;
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  h = (h ^ candidate) >>> 0;
  h = Math.imul(h, 0x01000193) >>> 0;
  // One more scramble round so nearby ids decorrelate.
  h = (h ^ (h >>> 15)) >>> 0;
  h = Math.imul(h, 0x2c1b3c6d) >>> 0;
  h = (h ^ (h >>> 12)) >>> 0;
  return h / 0x100000000;
}

export class DeterministicBackend implements ModelBackend {
  readonly precision = "float64";
  readonly tokenizer: Tokenizer;

  constructor(readonly modelId: string, tokenizer: Tokenizer) {
    this.tokenizer = tokenizer;
    if (this.tokenizer.padTokenId === null) {
      // Pad tokens are patched to EOS when the tokenizer ships without one.
      this.tokenizer.padTokenId = this.tokenizer.eosTokenId;
    }
  }

  scoreTokens(contextIds: number[], continuationIds: number[]): number[] {
    const logprobs: number[] = [];
    const context = contextIds.slice();
    for (const token of continuationIds) {
      const u = hashUnit(context, token, SCORE_SALT);
      logprobs.push(-0.05 - 5.95 * u);
      context.push(token);
    }
    return logprobs;
  }

  nextTokenLogits(contextIds: number[], ids: number[]): number[] {
    return ids.map((id) => -5.0 + 10.0 * hashUnit(contextIds, id, LOGIT_SALT));
  }
}

const BUILTIN_MODELS: Record<string, () => Tokenizer> = {
  "deterministic/standard": standardTokenizer,
  "deterministic/caps-split": capsSplittingTokenizer,
  "deterministic/digits-only": digitsOnlyTokenizer,
};

export function resolveModel(modelId: string): ModelBackend {
  const maker = BUILTIN_MODELS[modelId];
  if (!maker) {
    throw new ConfigurationError(
      `unknown model ${JSON.stringify(modelId)} (built-in: ${Object.keys(BUILTIN_MODELS).join(", ")})`,
    );
  }
  return new DeterministicBackend(modelId, maker());
}

export const BUILTIN_MODEL_IDS = Object.keys(BUILTIN_MODELS);
