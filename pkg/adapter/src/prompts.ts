/**
 * Prompt construction.
 *
 * Templates are frozen verbatim; the trailing space after "Answer:" is part
 * of the contract (it stabilizes next-token tokenization), so neither builder
 * trims its output.
 */

import { ConfigurationError } from "./errors.js";

export const PROMPT_VARIANTS = ["default", "audit_v1"] as const;
export type PromptVariant = (typeof PROMPT_VARIANTS)[number];

const VERIFY_OPENINGS: Record<PromptVariant, string> = {
  default: "You are evaluating whether a proposed answer to a multiple-choice question is correct.",
  audit_v1:
    "You are an answer auditor. Determine whether the proposed answer is actually supported by the question.",
};

/** Multiple-choice answer prompt with zero-based numbered choices. */
export function buildPrompt(question: string, options: string[]): string {
  if (question.length === 0) {
    throw new ConfigurationError("question must be non-empty");
  }
  if (options.length === 0) {
    throw new ConfigurationError("options must be non-empty");
  }
  const choices = options.map((text, i) => `${i}. ${text}`).join("\n");
  return `Question:\n${question}\n\nChoices:\n${choices}\n\nAnswer: `;
}

/**
 * Self-verification prompt. The two variants differ only in the opening
 * framing sentence; question, proposed answer, and the True/False response
 * instruction are identical.
 */
export function buildVerifyPrompt(
  question: string,
  predictedAnswer: string,
  variant: string,
): string {
  const opening = VERIFY_OPENINGS[variant as PromptVariant];
  if (opening === undefined) {
    throw new ConfigurationError(
      `unknown verification prompt variant ${JSON.stringify(variant)} (known: ${PROMPT_VARIANTS.join(", ")})`,
    );
  }
  return (
    `${opening}\n` +
    `Question: ${question}\n` +
    `Proposed answer: ${predictedAnswer}\n\n` +
    `Is the proposed answer correct? Respond with exactly one token: True or False.\n` +
    `Answer: `
  );
}
