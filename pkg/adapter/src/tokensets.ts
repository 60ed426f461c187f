/**
 * True/False token-set construction.
 *
 * Candidate surface forms cover bare, leading-space, uppercase, and lowercase
 * spellings; only forms that tokenize to exactly one token are kept. When
 * either side ends up empty the sets are rebuilt from {1, 0} digit variants
 * and fallback_used is flagged.
 */

import { UnsupportedTokenizerError } from "./errors.js";
import type { Tokenizer } from "./tokenizer.js";

export const TRUE_FORMS = ["True", " True", "TRUE", " TRUE", "true", " true"] as const;
export const FALSE_FORMS = ["False", " False", "FALSE", " FALSE", "false", " false"] as const;
export const FALLBACK_TRUE_FORMS = ["1", " 1"] as const;
export const FALLBACK_FALSE_FORMS = ["0", " 0"] as const;

export interface TokenSets {
  trueIds: number[];
  falseIds: number[];
  fallbackUsed: boolean;
}

function singleTokenIds(tokenizer: Tokenizer, forms: readonly string[]): number[] {
  const ids: number[] = [];
  for (const form of forms) {
    const encoded = tokenizer.encode(form);
    if (encoded.length === 1 && !ids.includes(encoded[0])) {
      ids.push(encoded[0]);
    }
  }
  return ids;
}

export function buildTokenSets(tokenizer: Tokenizer): TokenSets {
  let trueIds = singleTokenIds(tokenizer, TRUE_FORMS);
  let falseIds = singleTokenIds(tokenizer, FALSE_FORMS);
  let fallbackUsed = false;

  if (trueIds.length === 0 || falseIds.length === 0) {
    trueIds = singleTokenIds(tokenizer, FALLBACK_TRUE_FORMS);
    falseIds = singleTokenIds(tokenizer, FALLBACK_FALSE_FORMS);
    fallbackUsed = true;
  }
  if (trueIds.length === 0 || falseIds.length === 0) {
    throw new UnsupportedTokenizerError(
      `tokenizer ${tokenizer.name}: no single-token True/False variants and no {1,0} fallback`,
    );
  }
  const overlap = trueIds.filter((id) => falseIds.includes(id));
  if (overlap.length > 0) {
    throw new UnsupportedTokenizerError(
      `tokenizer ${tokenizer.name}: True/False token sets overlap on ids ${overlap.join(", ")}`,
    );
  }
  return { trueIds, falseIds, fallbackUsed };
}
