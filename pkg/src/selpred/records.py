"""Record/manifest data model, the line-oriented run format, and run validation.

A run directory holds two files:

* ``records.jsonl`` -- one JSON object per line, one evaluated example each
* ``manifest.json`` -- a single JSON object identifying the run

Field names are normative and case-sensitive. All floats are written with
full round-trip precision (shortest repr), so re-serializing a parsed line
is byte-stable.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IntegrityError, ParseError, ValidationError

SCHEMA_VERSION = "1"

RECORDS_FILENAME = "records.jsonl"
MANIFEST_FILENAME = "manifest.json"


@dataclass(frozen=True)
class OptionScore:
    """Log-likelihood of one answer option: token count and summed log-prob (nats)."""

    token_count: int
    sum_logprob: float

    def __post_init__(self):
        if not isinstance(self.token_count, int) or self.token_count < 1:
            raise ValidationError(f"token_count must be a positive integer, got {self.token_count!r}")
        if not isinstance(self.sum_logprob, float) or not math.isfinite(self.sum_logprob):
            raise ValidationError(f"sum_logprob must be finite, got {self.sum_logprob!r}")


@dataclass(frozen=True)
class VerifyLogits:
    """Next-token logits over the True / False surface-variant token sets."""

    true_logits: tuple[float, ...]
    false_logits: tuple[float, ...]
    fallback_used: bool = False

    def __post_init__(self):
        if len(self.true_logits) == 0 or len(self.false_logits) == 0:
            raise ValidationError("true_logits and false_logits must be non-empty")
        for v in (*self.true_logits, *self.false_logits):
            if not isinstance(v, float) or not math.isfinite(v):
                raise ValidationError(f"verification logits must be finite, got {v!r}")


@dataclass(frozen=True)
class ExampleRecord:
    """One evaluated question with per-option scores and verification logits."""

    example_id: str
    order_index: int
    gold_index: int
    options: tuple[OptionScore, ...]
    verify: dict[str, VerifyLogits] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.order_index, int) or self.order_index < 0:
            raise ValidationError(f"order_index must be a nonnegative integer, got {self.order_index!r}")
        if len(self.options) < 2:
            raise ValidationError(f"example {self.example_id!r}: needs K >= 2 options, got {len(self.options)}")
        if not isinstance(self.gold_index, int) or not (0 <= self.gold_index < len(self.options)):
            raise ValidationError(
                f"example {self.example_id!r}: gold_index {self.gold_index!r} outside [0, {len(self.options)})"
            )

    @property
    def n_options(self) -> int:
        return len(self.options)


@dataclass(frozen=True)
class RunManifest:
    """Run identity: dataset/model/seed/prompt variants and True/False token-id sets."""

    schema_version: str
    dataset_name: str
    dataset_config: str
    dataset_split: str
    dataset_revision: str
    model_id: str
    seed: int
    prompt_variants: tuple[str, ...]
    true_token_ids: tuple[int, ...]
    false_token_ids: tuple[int, ...]
    example_count: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.prompt_variants) == 0:
            raise ValidationError("prompt_variants must be non-empty")
        if self.example_count < 0:
            raise ValidationError(f"example_count must be nonnegative, got {self.example_count}")
        if not isinstance(self.seed, int):
            raise ValidationError(f"seed must be an integer, got {self.seed!r}")


@dataclass(frozen=True)
class ValidatedRun:
    """A loaded run: manifest plus records sorted by order_index (0..n-1, no gaps).

    ``unknown_field_count`` counts ignored unknown fields seen while parsing;
    zero means the files carried only schema fields.
    """

    manifest: RunManifest
    records: tuple[ExampleRecord, ...]
    unknown_field_count: int = 0

    def __post_init__(self):
        indices = [r.order_index for r in self.records]
        if indices != list(range(len(self.records))):
            raise IntegrityError("records must be sorted by order_index with no gaps from 0")


@dataclass
class ParseStats:
    """Mutable warning counter threaded through parsing."""

    unknown_fields: int = 0


_RECORD_FIELDS = {"schema_version", "example_id", "order_index", "gold_index", "options", "verify"}
_OPTION_FIELDS = {"token_count", "sum_logprob"}
_VERIFY_FIELDS = {"true_logits", "false_logits", "fallback_used"}
_MANIFEST_FIELDS = {
    "schema_version", "dataset_name", "dataset_config", "dataset_split", "dataset_revision",
    "model_id", "seed", "prompt_variants", "true_token_ids", "false_token_ids",
    "example_count", "metadata",
}


def _count_unknown(obj: dict, known: set[str], stats: ParseStats | None) -> None:
    if stats is not None:
        stats.unknown_fields += sum(1 for k in obj if k not in known)


def _require(obj: dict, key: str, context: str):
    if key not in obj:
        raise ValidationError(f"{context}: missing required field {key!r}")
    return obj[key]


def _as_int(value, context: str) -> int:
    # bool is an int subclass; reject it explicitly.
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{context}: expected integer, got {value!r}")
    return value


def _as_finite_float(value, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{context}: expected number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ValidationError(f"{context}: non-finite number {value!r}")
    return out


def parse_record_line(line: str, stats: ParseStats | None = None) -> ExampleRecord:
    """Decode one ``records.jsonl`` line into an ExampleRecord.

    Unknown fields are ignored (counted in ``stats``); missing required fields,
    non-finite numerics, and out-of-range gold indices raise ValidationError.
    Syntactically malformed lines raise ParseError.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed record line: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ParseError("record line is not an object")

    _count_unknown(obj, _RECORD_FIELDS, stats)
    example_id = str(_require(obj, "example_id", "record"))
    ctx = f"example {example_id!r}"
    order_index = _as_int(_require(obj, "order_index", ctx), f"{ctx}: order_index")
    gold_index = _as_int(_require(obj, "gold_index", ctx), f"{ctx}: gold_index")

    raw_options = _require(obj, "options", ctx)
    if not isinstance(raw_options, list):
        raise ValidationError(f"{ctx}: options must be a list")
    options = []
    for i, raw in enumerate(raw_options):
        if not isinstance(raw, dict):
            raise ValidationError(f"{ctx}: option {i} must be an object")
        _count_unknown(raw, _OPTION_FIELDS, stats)
        options.append(OptionScore(
            token_count=_as_int(_require(raw, "token_count", f"{ctx} option {i}"), f"{ctx}: option {i} token_count"),
            sum_logprob=_as_finite_float(
                _require(raw, "sum_logprob", f"{ctx} option {i}"), f"{ctx}: option {i} sum_logprob"
            ),
        ))

    raw_verify = obj.get("verify", {})
    if not isinstance(raw_verify, dict):
        raise ValidationError(f"{ctx}: verify must be an object")
    verify: dict[str, VerifyLogits] = {}
    for variant, raw in raw_verify.items():
        if not isinstance(raw, dict):
            raise ValidationError(f"{ctx}: verify[{variant!r}] must be an object")
        _count_unknown(raw, _VERIFY_FIELDS, stats)
        for side in ("true_logits", "false_logits"):
            if not isinstance(raw.get(side), list):
                raise ValidationError(f"{ctx}: verify[{variant!r}].{side} must be a list")
        verify[variant] = VerifyLogits(
            true_logits=tuple(
                _as_finite_float(v, f"{ctx}: verify[{variant!r}].true_logits") for v in raw["true_logits"]
            ),
            false_logits=tuple(
                _as_finite_float(v, f"{ctx}: verify[{variant!r}].false_logits") for v in raw["false_logits"]
            ),
            fallback_used=bool(raw.get("fallback_used", False)),
        )

    return ExampleRecord(
        example_id=example_id,
        order_index=order_index,
        gold_index=gold_index,
        options=tuple(options),
        verify=verify,
    )


def serialize_record(record: ExampleRecord) -> str:
    """Canonical single-line serialization: fixed field order, compact separators,
    variant keys sorted, floats at full round-trip precision."""
    obj = {
        "schema_version": SCHEMA_VERSION,
        "example_id": record.example_id,
        "order_index": record.order_index,
        "gold_index": record.gold_index,
        "options": [
            {"token_count": o.token_count, "sum_logprob": o.sum_logprob} for o in record.options
        ],
        "verify": {
            variant: {
                "true_logits": list(v.true_logits),
                "false_logits": list(v.false_logits),
                "fallback_used": v.fallback_used,
            }
            for variant, v in sorted(record.verify.items())
        },
    }
    return json.dumps(obj, separators=(",", ":"))


def parse_manifest(text: str, stats: ParseStats | None = None) -> RunManifest:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed manifest: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ParseError("manifest is not an object")
    _count_unknown(obj, _MANIFEST_FIELDS, stats)

    variants = _require(obj, "prompt_variants", "manifest")
    if not isinstance(variants, list):
        raise ValidationError("manifest: prompt_variants must be a list")
    for ids_key in ("true_token_ids", "false_token_ids"):
        if not isinstance(_require(obj, ids_key, "manifest"), list):
            raise ValidationError(f"manifest: {ids_key} must be a list")
    metadata = obj.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ValidationError("manifest: metadata must be an object")

    return RunManifest(
        schema_version=str(_require(obj, "schema_version", "manifest")),
        dataset_name=str(_require(obj, "dataset_name", "manifest")),
        dataset_config=str(_require(obj, "dataset_config", "manifest")),
        dataset_split=str(_require(obj, "dataset_split", "manifest")),
        dataset_revision=str(_require(obj, "dataset_revision", "manifest")),
        model_id=str(_require(obj, "model_id", "manifest")),
        seed=_as_int(_require(obj, "seed", "manifest"), "manifest: seed"),
        prompt_variants=tuple(str(v) for v in variants),
        true_token_ids=tuple(_as_int(v, "manifest: true_token_ids") for v in obj["true_token_ids"]),
        false_token_ids=tuple(_as_int(v, "manifest: false_token_ids") for v in obj["false_token_ids"]),
        example_count=_as_int(_require(obj, "example_count", "manifest"), "manifest: example_count"),
        metadata=metadata,
    )


def serialize_manifest(manifest: RunManifest) -> str:
    obj = {
        "schema_version": manifest.schema_version,
        "dataset_name": manifest.dataset_name,
        "dataset_config": manifest.dataset_config,
        "dataset_split": manifest.dataset_split,
        "dataset_revision": manifest.dataset_revision,
        "model_id": manifest.model_id,
        "seed": manifest.seed,
        "prompt_variants": list(manifest.prompt_variants),
        "true_token_ids": list(manifest.true_token_ids),
        "false_token_ids": list(manifest.false_token_ids),
        "example_count": manifest.example_count,
        "metadata": manifest.metadata,
    }
    return json.dumps(obj, indent=2) + "\n"


def load_run(directory_path: str | Path) -> ValidatedRun:
    """Load and validate a run directory (manifest.json + records.jsonl).

    Records are sorted by order_index regardless of on-disk line order, then
    cross-checked against the manifest example count; duplicate or gapped
    order indices raise IntegrityError.
    """
    directory = Path(directory_path)
    manifest_path = directory / MANIFEST_FILENAME
    records_path = directory / RECORDS_FILENAME
    for path in (manifest_path, records_path):
        if not path.is_file():
            raise FileNotFoundError(f"missing run file: {path}")

    stats = ParseStats()
    manifest = parse_manifest(manifest_path.read_text(encoding="utf-8"), stats)

    records: list[ExampleRecord] = []
    with records_path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(parse_record_line(line, stats))
            except ParseError as exc:
                raise ParseError(str(exc), line_number=lineno) from exc

    if len(records) != manifest.example_count:
        raise IntegrityError(
            f"{records_path}: manifest says {manifest.example_count} examples, file has {len(records)}"
        )
    seen: dict[int, str] = {}
    for rec in records:
        if rec.order_index in seen:
            raise IntegrityError(
                f"duplicate order_index {rec.order_index} ({seen[rec.order_index]!r} and {rec.example_id!r})"
            )
        seen[rec.order_index] = rec.example_id
    records.sort(key=lambda r: r.order_index)

    return ValidatedRun(manifest=manifest, records=tuple(records), unknown_field_count=stats.unknown_fields)


def write_run(manifest: RunManifest, records: list[ExampleRecord] | tuple[ExampleRecord, ...],
              directory_path: str | Path) -> Path:
    """Write a run directory in the canonical format. Returns the directory path."""
    directory = Path(directory_path)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / MANIFEST_FILENAME).write_text(serialize_manifest(manifest), encoding="utf-8")
    lines = "".join(serialize_record(r) + "\n" for r in records)
    (directory / RECORDS_FILENAME).write_text(lines, encoding="utf-8")
    return directory


def shuffled_order(n: int, seed: int) -> list[int]:
    """Deterministic permutation of [0, n).

    Frozen generator convention: Fisher-Yates driven by CPython's Mersenne
    Twister (``random.Random(seed)``), drawing ``j = randrange(i + 1)`` for
    i = n-1 .. 1. Same (n, seed) yields the same permutation on every
    platform and invocation.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = random.Random(seed)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.randrange(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm
