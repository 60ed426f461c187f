/** Error classes the CLI maps onto distinct exit codes. */

export class AdapterError extends Error {}

/** Bad flags, unknown model/variant, malformed inputs chosen by the caller. */
export class ConfigurationError extends AdapterError {}

/** Dataset identity mismatch or schema-invalid data: hard abort, not resumable. */
export class DataError extends AdapterError {}

/** Tokenizer offers no usable True/False and no {1,0} fallback tokens. */
export class UnsupportedTokenizerError extends AdapterError {}

/** Mid-run interruption; the job can resume from its checkpoint. */
export class JobInterrupted extends AdapterError {
  constructor(public readonly examplesDone: number) {
    super(`job interrupted after ${examplesDone} examples; rerun to resume`);
  }
}
