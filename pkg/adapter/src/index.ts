export { BUILTIN_MODEL_IDS, DeterministicBackend, resolveModel, type ModelBackend } from "./backend.js";
export { datasetCachePath, loadDataset, type DatasetExample, type DatasetIdentity, type LoadedDataset } from "./dataset.js";
export {
  AdapterError,
  ConfigurationError,
  DataError,
  JobInterrupted,
  UnsupportedTokenizerError,
} from "./errors.js";
export { manifestText, recordLine, SCHEMA_VERSION, type ManifestJson, type RecordJson } from "./format.js";
export { MersenneTwister, shuffledOrder } from "./mt19937.js";
export { buildPrompt, buildVerifyPrompt, PROMPT_VARIANTS, type PromptVariant } from "./prompts.js";
export { buildTokenSets, FALLBACK_FALSE_FORMS, FALLBACK_TRUE_FORMS, FALSE_FORMS, TRUE_FORMS, type TokenSets } from "./tokensets.js";
export {
  capsSplittingTokenizer,
  digitsOnlyTokenizer,
  SegmentTokenizer,
  standardTokenizer,
  type Tokenizer,
} from "./tokenizer.js";
export { defaultJob, runJob, scoreOptions, verifyLogits, type JobHooks, type JobSummary, type ScoringJob } from "./job.js";
