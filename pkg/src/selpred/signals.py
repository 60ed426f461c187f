"""Per-example confidence signals and correctness labels.

Six signals are defined over a validated run:

* ``LL-AVG``      -- max softmax over length-normalized option log-likelihoods
* ``LL-SUM``      -- max softmax over summed option log-likelihoods
* ``Self-Verify`` -- sigmoid of the True/False verification logit gap
* ``Margin``      -- gap between the top two LL-AVG option probabilities
* ``EntropyConf`` -- one minus normalized predictive entropy of the LL-AVG distribution
* ``LL-AVG-T``    -- LL-AVG with averaged scores divided by a fitted temperature

All signals except LL-SUM are conditioned on the LL-AVG prediction and carry
the y_avg correctness label; LL-SUM is scored on its own prediction (y_sum).
Argmax ties break to the lowest option index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .records import ExampleRecord, ValidatedRun, VerifyLogits

LL_AVG = "LL-AVG"
LL_SUM = "LL-SUM"
SELF_VERIFY = "Self-Verify"
MARGIN = "Margin"
ENTROPY_CONF = "EntropyConf"
LL_AVG_T = "LL-AVG-T"

#: Canonical ordering used by reports and table emitters.
ALL_SIGNALS = (LL_AVG, SELF_VERIFY, LL_SUM, MARGIN, ENTROPY_CONF, LL_AVG_T)


@dataclass(frozen=True)
class SignalFrame:
    """Per-example confidences, predicted indices, and correctness labels for one signal."""

    signal_name: str
    confidences: tuple[float, ...]
    predicted_index: tuple[int, ...]
    labels: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.confidences) == len(self.predicted_index) == len(self.labels)):
            raise ValueError("confidences, predicted_index, and labels must have equal length")
        if any(not (0.0 <= c <= 1.0) for c in self.confidences):
            raise ValueError(f"{self.signal_name}: confidences must lie in [0, 1]")
        if any(y not in (0, 1) for y in self.labels):
            raise ValueError(f"{self.signal_name}: labels must be 0/1")


def softmax(scores, temperature: float = 1.0) -> np.ndarray:
    """Softmax over ``scores / temperature``, computed with max-subtraction."""
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    s = np.asarray(scores, dtype=np.float64)
    if s.size == 0:
        raise ValueError("softmax of empty input")
    s = s / temperature
    e = np.exp(s - s.max())
    return e / e.sum()


def _logsumexp(values) -> float:
    v = np.asarray(values, dtype=np.float64)
    m = v.max()
    return float(m + math.log(np.exp(v - m).sum()))


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _argmax_confidence(scores: np.ndarray, temperature: float = 1.0) -> tuple[int, float]:
    # np.argmax returns the first maximal entry, which is the tie rule.
    idx = int(np.argmax(scores))
    conf = float(softmax(scores, temperature)[idx])
    return idx, conf


def averaged_scores(record: ExampleRecord) -> np.ndarray:
    """Length-normalized option scores (mean log-prob per token)."""
    return np.array([o.sum_logprob / o.token_count for o in record.options], dtype=np.float64)


def summed_scores(record: ExampleRecord) -> np.ndarray:
    return np.array([o.sum_logprob for o in record.options], dtype=np.float64)


def ll_avg_signal(record: ExampleRecord) -> tuple[int, float]:
    """Predicted index and confidence under length-normalized scoring."""
    return _argmax_confidence(averaged_scores(record))


def ll_sum_signal(record: ExampleRecord) -> tuple[int, float]:
    """Predicted index and confidence under unnormalized summed scoring."""
    return _argmax_confidence(summed_scores(record))


def self_verify_confidence(v: VerifyLogits) -> float:
    """sigmoid(logsumexp(true_logits) - logsumexp(false_logits))."""
    for x in (*v.true_logits, *v.false_logits):
        if not math.isfinite(x):
            raise ValueError(f"verification logit must be finite, got {x!r}")
    return _sigmoid(_logsumexp(v.true_logits) - _logsumexp(v.false_logits))


def margin_signal(probs) -> float:
    """Gap between the two largest entries of a probability vector."""
    p = np.asarray(probs, dtype=np.float64)
    if p.size < 2:
        raise ValueError("margin needs K >= 2 options")
    top = np.sort(p)[-2:]
    return float(top[1] - top[0])


def entropy_confidence(probs) -> float:
    """1 - H(p)/ln(K), with 0*log(0) = 0."""
    p = np.asarray(probs, dtype=np.float64)
    if p.size < 2:
        raise ValueError("entropy confidence needs K >= 2 options")
    nz = p[p > 0]
    entropy = float(-(nz * np.log(nz)).sum())
    conf = 1.0 - entropy / math.log(p.size)
    # H can exceed ln K by an ulp for near-uniform p; floor the exact-zero boundary.
    return max(0.0, conf)


def build_signal_frames(
    run: ValidatedRun,
    variant: str,
    temperature: float | None = None,
    signals: tuple[str, ...] | list[str] | None = None,
) -> list[SignalFrame]:
    """Build one SignalFrame per requested signal, examples in order_index order.

    ``signals`` defaults to every computable signal: the five fixed ones plus
    LL-AVG-T when ``temperature`` is given. Requesting Self-Verify for a variant
    absent from any record raises ConfigurationError; requesting LL-AVG-T
    without a temperature raises ValueError.
    """
    if signals is None:
        requested = [LL_AVG, SELF_VERIFY, LL_SUM, MARGIN, ENTROPY_CONF]
        if temperature is not None:
            requested.append(LL_AVG_T)
    else:
        unknown = [s for s in signals if s not in ALL_SIGNALS]
        if unknown:
            raise ConfigurationError(f"unknown signal name(s): {unknown} (known: {list(ALL_SIGNALS)})")
        requested = list(signals)
    if LL_AVG_T in requested and temperature is None:
        raise ValueError("LL-AVG-T requested without a temperature")
    if SELF_VERIFY in requested:
        missing = [r.example_id for r in run.records if variant not in r.verify]
        if missing:
            raise ConfigurationError(
                f"prompt variant {variant!r} missing from {len(missing)} record(s), first: {missing[0]!r}"
            )

    n = len(run.records)
    pred_avg = np.empty(n, dtype=np.int64)
    conf_avg = np.empty(n)
    pred_sum = np.empty(n, dtype=np.int64)
    conf_sum = np.empty(n)
    conf_sv = np.empty(n)
    conf_margin = np.empty(n)
    conf_entropy = np.empty(n)
    conf_avg_t = np.empty(n)
    y_avg = np.empty(n, dtype=np.int64)
    y_sum = np.empty(n, dtype=np.int64)

    for i, rec in enumerate(run.records):
        avg = averaged_scores(rec)
        pred_avg[i], conf_avg[i] = _argmax_confidence(avg)
        pred_sum[i], conf_sum[i] = _argmax_confidence(summed_scores(rec))
        y_avg[i] = int(pred_avg[i] == rec.gold_index)
        y_sum[i] = int(pred_sum[i] == rec.gold_index)
        probs_avg = softmax(avg)
        conf_margin[i] = margin_signal(probs_avg)
        conf_entropy[i] = entropy_confidence(probs_avg)
        if SELF_VERIFY in requested:
            conf_sv[i] = self_verify_confidence(rec.verify[variant])
        if LL_AVG_T in requested:
            conf_avg_t[i] = float(softmax(avg, temperature)[pred_avg[i]])

    def frame(name: str, conf: np.ndarray, pred: np.ndarray, labels: np.ndarray) -> SignalFrame:
        return SignalFrame(
            signal_name=name,
            confidences=tuple(float(c) for c in conf),
            predicted_index=tuple(int(p) for p in pred),
            labels=tuple(int(y) for y in labels),
        )

    builders = {
        LL_AVG: lambda: frame(LL_AVG, conf_avg, pred_avg, y_avg),
        LL_SUM: lambda: frame(LL_SUM, conf_sum, pred_sum, y_sum),
        SELF_VERIFY: lambda: frame(SELF_VERIFY, conf_sv, pred_avg, y_avg),
        MARGIN: lambda: frame(MARGIN, conf_margin, pred_avg, y_avg),
        ENTROPY_CONF: lambda: frame(ENTROPY_CONF, conf_entropy, pred_avg, y_avg),
        LL_AVG_T: lambda: frame(LL_AVG_T, conf_avg_t, pred_avg, y_avg),
    }
    return [builders[name]() for name in requested]
