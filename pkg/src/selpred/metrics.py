"""Correctness-ranking, selective-prediction, and calibration metrics.

Conventions frozen here:

* AUROC ties receive 0.5 credit (Mann-Whitney with midranks).
* Retention order sorts by decreasing confidence; ties keep input order,
  which is ascending order_index for frames built from a run.
* Coverage targets retain k = ceil(target * n) examples.
* ECE bins are equal-width intervals [(b-1)/B, b/B), final bin closed at 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError


@dataclass(frozen=True)
class RiskCoverageCurve:
    """Ordered (coverage, risk) points, anchored at (0, 1)."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.points or self.points[0] != (0.0, 1.0):
            raise ValueError("curve must start at the (0, 1) anchor")
        coverages = [c for c, _ in self.points]
        if any(b <= a for a, b in zip(coverages, coverages[1:])):
            raise ValueError("coverage must be strictly increasing")


@dataclass(frozen=True)
class MetricReport:
    """Scalar metrics for one (dataset, model, prompt, signal) cell.

    ``None`` marks a metric that is undefined on the input (rendered as NA).
    Operating points are keyed by their target value.
    """

    dataset: str
    model: str
    prompt: str
    signal: str
    accuracy_llavg: float
    auroc: float | None
    aurc: float
    brier: float
    ece10: float
    err_at: dict[float, float] = field(default_factory=dict)
    cov_at: dict[float, float] = field(default_factory=dict)


def _as_arrays(confidences, labels) -> tuple[np.ndarray, np.ndarray]:
    c = np.asarray(confidences, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if c.shape != y.shape or c.ndim != 1:
        raise ValueError(f"confidences and labels must be equal-length 1-D, got {c.shape} vs {y.shape}")
    return c, y


def _descending_order(c: np.ndarray) -> np.ndarray:
    # Stable sort keeps ties in input order, i.e. ascending order_index.
    return np.argsort(-c, kind="stable")


def _ceil_scaled(target: float, n: int) -> int:
    # target*n picks up float fuzz (0.8*35 = 28.000000000000004); subtract a
    # guard so the rational ceil survives.
    return min(n, math.ceil(target * n - 1e-9))


def auroc(confidences, labels) -> float:
    """Probability a random positive outranks a random negative, ties worth 0.5.

    Computed from midranks in O(n log n); raises DegenerateInputError when the
    labels contain a single class.
    """
    c, y = _as_arrays(confidences, labels)
    pos = y == 1
    n_pos = int(pos.sum())
    n_neg = int(c.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DegenerateInputError("AUROC undefined: labels contain a single class")

    order = np.argsort(c, kind="mergesort")
    sorted_c = c[order]
    n = c.size
    boundaries = np.flatnonzero(np.diff(sorted_c)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n]))
    # Midrank of a tie group spanning sorted positions [start, end) is the
    # mean of 1-based ranks start+1 .. end.
    midranks = (starts + ends + 1) / 2.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.repeat(midranks, ends - starts)

    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def risk_coverage_curve(confidences, labels) -> RiskCoverageCurve:
    """Discrete risk-coverage curve over all retained prefixes, anchor (0,1) prepended."""
    c, y = _as_arrays(confidences, labels)
    n = c.size
    if n == 0:
        raise ValueError("risk_coverage_curve needs at least one example")
    order = _descending_order(c)
    errors = np.cumsum(1 - y[order])
    ks = np.arange(1, n + 1)
    points = [(0.0, 1.0)]
    points.extend((float(k / n), float(e / k)) for k, e in zip(ks, errors))
    return RiskCoverageCurve(points=tuple(points))


def aurc(curve: RiskCoverageCurve) -> float:
    """Trapezoidal integral of the risk-coverage curve."""
    total = 0.0
    for (c0, r0), (c1, r1) in zip(curve.points, curve.points[1:]):
        total += (c1 - c0) * (r0 + r1) / 2.0
    return total


def err_at_coverage(confidences, labels, target: float) -> float:
    """Error rate on the top-k retained prefix, k = ceil(target * n)."""
    if not (0.0 < target <= 1.0):
        raise ValueError(f"coverage target must be in (0, 1], got {target}")
    c, y = _as_arrays(confidences, labels)
    if c.size == 0:
        raise ValueError("err_at_coverage needs at least one example")
    k = _ceil_scaled(target, c.size)
    order = _descending_order(c)
    errors = int((1 - y[order[:k]]).sum())
    return errors / k


def cov_at_error(confidences, labels, max_risk: float) -> float:
    """Largest coverage k/n whose retained-prefix risk is <= max_risk (0.0 if none)."""
    if not (0.0 <= max_risk <= 1.0):
        raise ValueError(f"max_risk must be in [0, 1], got {max_risk}")
    c, y = _as_arrays(confidences, labels)
    n = c.size
    if n == 0:
        raise ValueError("cov_at_error needs at least one example")
    order = _descending_order(c)
    errors = np.cumsum(1 - y[order])
    ks = np.arange(1, n + 1)
    ok = np.flatnonzero(errors / ks <= max_risk)
    if ok.size == 0:
        return 0.0
    return float((ok[-1] + 1) / n)


def brier(confidences, labels) -> float:
    """Mean squared difference between confidence and 0/1 correctness."""
    c, y = _as_arrays(confidences, labels)
    if c.size == 0:
        raise ValueError("brier needs at least one example")
    return float(np.mean((c - y) ** 2))


def ece(confidences, labels, bins: int = 10) -> float:
    """Expected calibration error over equal-width bins.

    Bin b covers [(b-1)/B, b/B) with the last bin closed at 1.0; empty bins
    contribute zero. Binning compares against exact edges rather than using
    floor(c*B), so boundary confidences land in the spec'd interval.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    c, y = _as_arrays(confidences, labels)
    n = c.size
    if n == 0:
        raise ValueError("ece needs at least one example")
    if c.min() < 0.0 or c.max() > 1.0:
        raise ValueError("ece confidences must lie in [0, 1]")

    edges = np.arange(1, bins) / bins
    assignment = np.searchsorted(edges, c, side="right")
    total = 0.0
    for b in range(bins):
        mask = assignment == b
        n_b = int(mask.sum())
        if n_b == 0:
            continue
        acc_b = float(y[mask].mean())
        conf_b = float(c[mask].mean())
        total += (n_b / n) * abs(acc_b - conf_b)
    return total
