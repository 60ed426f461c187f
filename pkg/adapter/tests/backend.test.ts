import { describe, expect, it } from "vitest";

import { resolveModel } from "../src/backend.js";
import { ConfigurationError } from "../src/errors.js";
import { scoreOptions } from "../src/job.js";

describe("DeterministicBackend", () => {
  const backend = resolveModel("deterministic/standard");

  it("rejects unknown model ids", () => {
    expect(() => resolveModel("deterministic/unknown")).toThrow(ConfigurationError);
  });

  it("patches a missing pad token to EOS", () => {
    const noPad = resolveModel("deterministic/digits-only");
    expect(noPad.tokenizer.padTokenId).toBe(noPad.tokenizer.eosTokenId);
  });

  it("scores a single-token option with that token's log-probability", () => {
    const prompt = backend.tokenizer.encode("Question:\nq\n\nAnswer: ");
    const option = backend.tokenizer.encode("yes");
    expect(option.length).toBe(1);
    const [score] = scoreOptions(backend, "Question:\nq\n\nAnswer: ", ["yes"]);
    expect(score.token_count).toBe(1);
    expect(score.sum_logprob).toBe(backend.scoreTokens(prompt, option)[0]);
    expect(score.sum_logprob).toBeLessThan(0);
  });

  it("factorizes multi-token scores autoregressively", () => {
    const context = backend.tokenizer.encode("Question:\nq\n\nAnswer: ");
    const continuation = backend.tokenizer.encode("two words");
    expect(continuation.length).toBe(2);
    const joint = backend.scoreTokens(context, continuation);
    const first = backend.scoreTokens(context, [continuation[0]])[0];
    const second = backend.scoreTokens([...context, continuation[0]], [continuation[1]])[0];
    expect(joint[0]).toBe(first);
    expect(joint[1]).toBe(second);
  });

  it("gives identical option texts identical scores", () => {
    const [a, b] = scoreOptions(backend, "Question:\nq\n\nAnswer: ", ["same text", "same text"]);
    expect(a).toEqual(b);
  });

  it("produces finite bounded logits, identically on repeat calls", () => {
    const context = backend.tokenizer.encode("Is it correct?\nAnswer: ");
    const ids = [17, 99, 12345];
    const first = backend.nextTokenLogits(context, ids);
    const second = backend.nextTokenLogits(context, ids);
    expect(first).toEqual(second);
    for (const logit of first) {
      expect(Number.isFinite(logit)).toBe(true);
      expect(Math.abs(logit)).toBeLessThanOrEqual(5.0);
    }
  });
});
