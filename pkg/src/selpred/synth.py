"""Synthetic run generation and naive brute-force oracles.

``generate_run`` fabricates schema-valid runs with a controllable link between
verification logits and LL-AVG correctness; the oracles re-derive AUROC and
AURC from their definitions with no code shared with ``selpred.metrics``.
Test fixtures only -- not a statistical model of real LM confidence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError
from .records import ExampleRecord, OptionScore, RunManifest, SCHEMA_VERSION, ValidatedRun, VerifyLogits

SYNTH_VARIANTS = ("audit_v1", "default")


@dataclass(frozen=True)
class SynthSpec:
    n_examples: int
    n_options: int
    signal_quality: float
    accuracy_target: float
    seed: int

    def __post_init__(self):
        if self.n_examples < 1:
            raise ValueError(f"n_examples must be >= 1, got {self.n_examples}")
        if self.n_options < 2:
            raise ValueError(f"n_options must be >= 2, got {self.n_options}")
        if not (0.0 <= self.signal_quality <= 1.0):
            raise ValueError(f"signal_quality must be in [0, 1], got {self.signal_quality}")
        if not (0.0 < self.accuracy_target < 1.0):
            raise ValueError(f"accuracy_target must be in (0, 1), got {self.accuracy_target}")


def generate_run(spec: SynthSpec) -> ValidatedRun:
    """Deterministic synthetic run.

    Per example, the LL-AVG winner is the gold option with probability
    ``accuracy_target``. Verification logit gaps are drawn from two
    unit-variance normal populations centered at +/- 3*signal_quality
    (correct vs incorrect LL-AVG prediction); at signal_quality == 1.0 the
    draw is reflected onto the correct side of zero, which guarantees perfect
    separation. Each side of the verify record carries two token variants
    offset by a shared constant, so logsumexp aggregation is exercised while
    the logit gap stays exact.
    """
    rng = np.random.default_rng(spec.seed)
    k = spec.n_options
    records = []
    for i in range(spec.n_examples):
        gold = int(rng.integers(0, k))
        correct = bool(rng.random() < spec.accuracy_target)
        if correct:
            winner = gold
        else:
            winner = int(rng.integers(0, k - 1))
            if winner >= gold:
                winner += 1

        token_counts = rng.integers(1, 6, size=k)
        avg = rng.normal(-2.0, 1.0, size=k)
        avg[winner] = avg.max() + 0.25 + rng.exponential(0.5)
        sums = avg * token_counts

        verify = {}
        for variant in SYNTH_VARIANTS:
            center = 3.0 * spec.signal_quality * (1.0 if correct else -1.0)
            gap = rng.normal(center, 1.0)
            if spec.signal_quality == 1.0:
                gap = abs(gap) if correct else -abs(gap)
            half = gap / 2.0
            verify[variant] = VerifyLogits(
                true_logits=(half, half - 1.0),
                false_logits=(-half, -half - 1.0),
            )

        records.append(ExampleRecord(
            example_id=f"synth-{i:06d}",
            order_index=i,
            gold_index=gold,
            options=tuple(
                OptionScore(token_count=int(c), sum_logprob=float(s))
                for c, s in zip(token_counts, sums)
            ),
            verify=verify,
        ))

    manifest = RunManifest(
        schema_version=SCHEMA_VERSION,
        dataset_name="synthetic",
        dataset_config=f"n{spec.n_examples}_k{k}_q{spec.signal_quality:g}_a{spec.accuracy_target:g}",
        dataset_split="synthetic",
        dataset_revision=f"seed{spec.seed}",
        model_id="synthetic/generator",
        seed=spec.seed,
        prompt_variants=SYNTH_VARIANTS,
        true_token_ids=(1,),
        false_token_ids=(0,),
        example_count=spec.n_examples,
    )
    return ValidatedRun(manifest=manifest, records=tuple(records))


def auroc_bruteforce(confidences, labels) -> float:
    """O(n^2) pair count: 1 per concordant (pos, neg) pair, 0.5 per tie."""
    confidences = list(confidences)
    labels = list(labels)
    positives = [c for c, y in zip(confidences, labels) if y == 1]
    negatives = [c for c, y in zip(confidences, labels) if y == 0]
    if len(positives) == 0 or len(negatives) == 0:
        raise DegenerateInputError("AUROC undefined: labels contain a single class")
    total = 0.0
    for cp in positives:
        for cn in negatives:
            if cp > cn:
                total += 1.0
            elif cp == cn:
                total += 0.5
    return total / (len(positives) * len(negatives))


def aurc_bruteforce(confidences, labels) -> float:
    """Materialize every retained prefix explicitly and integrate trapezoids."""
    n = len(list(confidences))
    if n == 0:
        raise ValueError("aurc_bruteforce needs at least one example")
    # Decreasing confidence; ties stay in input order via the index tiebreaker.
    ranked = sorted(range(n), key=lambda i: (-confidences[i], i))
    points = [(0.0, 1.0)]
    for k in range(1, n + 1):
        retained = ranked[:k]
        wrong = sum(1 for i in retained if labels[i] == 0)
        points.append((k / n, wrong / k))
    area = 0.0
    for t in range(len(points) - 1):
        c0, r0 = points[t]
        c1, r1 = points[t + 1]
        area += (c1 - c0) * (r0 + r1) / 2.0
    return area
