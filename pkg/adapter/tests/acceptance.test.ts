/**
 * Adapter acceptance: schema validity with kill-and-resume byte identity on a
 * <=100-example run, and the token-set single-token rule across tokenizers.
 * Each criterion logs a PASS line when it completes.
 */

import { execFileSync } from "node:child_process";
import { readFileSync, rmSync } from "node:fs";
import { join } from "node:path";
import { afterAll, describe, expect, it } from "vitest";

import { resolveModel } from "../src/backend.js";
import { JobInterrupted } from "../src/errors.js";
import { defaultJob, runJob } from "../src/job.js";
import {
  buildTokenSets,
  FALLBACK_FALSE_FORMS,
  FALLBACK_TRUE_FORMS,
  FALSE_FORMS,
  TRUE_FORMS,
} from "../src/tokensets.js";
import { capsSplittingTokenizer, digitsOnlyTokenizer, standardTokenizer } from "../src/tokenizer.js";
import { DEMO_IDENTITY, freshDir, writeDemoDataset } from "./helpers.js";

const cleanup: string[] = [];

afterAll(() => {
  for (const dir of cleanup) rmSync(dir, { recursive: true, force: true });
});

function tempDir(prefix: string): string {
  const dir = freshDir(prefix);
  cleanup.push(dir);
  return dir;
}

describe("adapter acceptance", () => {
  it("100-example run: engine-valid output, kill-and-resume at 50 is byte-identical", () => {
    const started = Date.now();
    const cacheRoot = tempDir("cache");
    writeDemoDataset(cacheRoot, { n: 100 });

    const base = {
      modelId: "deterministic/standard",
      datasetId: DEMO_IDENTITY.name,
      cacheRoot,
    };

    const unbroken = defaultJob({ ...base, outputDirectory: tempDir("unbroken") });
    runJob(unbroken, resolveModel(unbroken.modelId));
    const expected = readFileSync(join(unbroken.outputDirectory, "records.jsonl"), "utf-8");

    const broken = defaultJob({ ...base, outputDirectory: tempDir("broken") });
    expect(() =>
      runJob(broken, resolveModel(broken.modelId), {
        onExampleDone: (done) => {
          if (done === 50) throw new JobInterrupted(done);
        },
      }),
    ).toThrow(JobInterrupted);
    runJob(broken, resolveModel(broken.modelId));
    const resumed = readFileSync(join(broken.outputDirectory, "records.jsonl"), "utf-8");
    expect(resumed).toBe(expected);

    // Both variants in every record.
    for (const line of resumed.trimEnd().split("\n")) {
      expect(Object.keys(JSON.parse(line).verify).sort()).toEqual(["audit_v1", "default"]);
    }

    // The engine accepts both directories with zero warnings.
    const script = [
      "import sys",
      "from selpred.records import load_run",
      "run = load_run(sys.argv[1])",
      "assert run.unknown_field_count == 0, run.unknown_field_count",
      "assert len(run.records) == run.manifest.example_count == 100",
      "print('ok')",
    ].join("\n");
    for (const dir of [unbroken.outputDirectory, broken.outputDirectory]) {
      expect(execFileSync("python3", ["-c", script, dir], { encoding: "utf-8" }).trim()).toBe("ok");
    }

    const elapsedMinutes = (Date.now() - started) / 60000;
    expect(elapsedMinutes).toBeLessThan(15);
    console.log("[acceptance] PASS adapter run: schema-valid, resume byte-identical, variants complete");
  });

  it("token-set rule holds on three tokenizers and the fallback path", () => {
    const trio = [standardTokenizer(), capsSplittingTokenizer(), digitsOnlyTokenizer()];
    expect(new Set(trio.map((t) => t.name)).size).toBe(3);
    for (const tokenizer of trio) {
      const sets = buildTokenSets(tokenizer);
      const forms = sets.fallbackUsed
        ? [...FALLBACK_TRUE_FORMS, ...FALLBACK_FALSE_FORMS]
        : [...TRUE_FORMS, ...FALSE_FORMS];
      for (const id of [...sets.trueIds, ...sets.falseIds]) {
        const source = forms.find((f) => {
          const enc = tokenizer.encode(f);
          return enc.length === 1 && enc[0] === id;
        });
        expect(source, `${tokenizer.name}: id ${id} lacks a single-token source form`).toBeDefined();
      }
    }
    // The constructed tokenizer without single-token True/False exercises the
    // {1,0} fallback.
    const fallback = buildTokenSets(digitsOnlyTokenizer());
    expect(fallback.fallbackUsed).toBe(true);
    console.log("[acceptance] PASS token sets: single-token round-trip + {1,0} fallback");
  });
});
