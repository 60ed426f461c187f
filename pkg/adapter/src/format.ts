/**
 * Writers for the engine's run-directory format.
 *
 * Field names and ordering follow the normative schema: `records.jsonl`
 * carries one example per line, `manifest.json` the run identity. The adapter
 * embeds the schema version it knows and refuses to write any other.
 */

export const SCHEMA_VERSION = "1";

export interface OptionScoreJson {
  token_count: number;
  sum_logprob: number;
}

export interface VerifyLogitsJson {
  true_logits: number[];
  false_logits: number[];
  fallback_used: boolean;
}

export interface RecordJson {
  schema_version: string;
  example_id: string;
  order_index: number;
  gold_index: number;
  options: OptionScoreJson[];
  verify: Record<string, VerifyLogitsJson>;
}

export interface ManifestJson {
  schema_version: string;
  dataset_name: string;
  dataset_config: string;
  dataset_split: string;
  dataset_revision: string;
  model_id: string;
  seed: number;
  prompt_variants: string[];
  true_token_ids: number[];
  false_token_ids: number[];
  example_count: number;
  metadata: Record<string, unknown>;
}

export function recordLine(record: RecordJson): string {
  if (record.schema_version !== SCHEMA_VERSION) {
    throw new Error(`adapter only writes schema_version ${SCHEMA_VERSION}`);
  }
  const verify: Record<string, VerifyLogitsJson> = {};
  for (const variant of Object.keys(record.verify).sort()) {
    verify[variant] = record.verify[variant];
  }
  return JSON.stringify({
    schema_version: record.schema_version,
    example_id: record.example_id,
    order_index: record.order_index,
    gold_index: record.gold_index,
    options: record.options,
    verify,
  });
}

export function manifestText(manifest: ManifestJson): string {
  if (manifest.schema_version !== SCHEMA_VERSION) {
    throw new Error(`adapter only writes schema_version ${SCHEMA_VERSION}`);
  }
  return JSON.stringify(manifest, null, 2) + "\n";
}
