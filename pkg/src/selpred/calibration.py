"""Temperature-scaling fit and bootstrap confidence intervals for AUROC deltas.

Frozen conventions:

* Calibration split: size = min(max(ceil(fraction*n), minimum), n-1), indices
  taken as the first entries of the engine's seeded permutation.
* Temperature search: 64 log-spaced grid points on [0.05, 20], then
  golden-section refinement (in log space) between the best point's
  neighbors, relative tolerance 1e-4. Grid ties break toward T = 1.
* Bootstrap: replicate r draws its index multiset from a generator derived
  from (seed, r), so serial and parallel execution agree; single-class
  replicates are discarded; CIs are empirical linear-interpolation
  percentiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, StatisticsError
from .metrics import auroc
from .records import shuffled_order

TEMPERATURE_BOUNDS = (0.05, 20.0)
TEMPERATURE_GRID_POINTS = 64
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CalibrationSplit:
    calibration_indices: tuple[int, ...]
    evaluation_indices: tuple[int, ...]


@dataclass(frozen=True)
class TemperatureFit:
    temperature: float
    calibration_nll: float  # mean NLL per calibration example, nats
    iterations: int


@dataclass(frozen=True)
class BootstrapResult:
    mean_delta: float
    ci_low: float
    ci_high: float
    kept_replicates: int
    discarded_replicates: int


def split_calibration(n: int, fraction: float = 0.2, minimum: int = 50,
                      seed: int = 42) -> CalibrationSplit:
    """Deterministic calibration/evaluation split of [0, n)."""
    if n < 2:
        raise ValueError(f"need n >= 2 to split, got {n}")
    # Same ceil guard as err_at_coverage: fraction*n carries float fuzz.
    size = min(max(math.ceil(fraction * n - 1e-9), minimum), n - 1)
    perm = shuffled_order(n, seed)
    calibration = sorted(perm[:size])
    evaluation = sorted(perm[size:])
    return CalibrationSplit(
        calibration_indices=tuple(calibration),
        evaluation_indices=tuple(evaluation),
    )


def _padded_scores(score_vectors) -> np.ndarray:
    """Stack ragged score vectors into (m, Kmax), padding with -inf."""
    vectors = [np.asarray(v, dtype=np.float64) for v in score_vectors]
    for v in vectors:
        if v.ndim != 1 or v.size < 2:
            raise ValueError("each score vector needs K >= 2 entries")
        if not np.all(np.isfinite(v)):
            raise ValueError("score vectors must be finite")
    k_max = max(v.size for v in vectors)
    out = np.full((len(vectors), k_max), -np.inf)
    for i, v in enumerate(vectors):
        out[i, : v.size] = v
    return out


def _mean_nll(scores: np.ndarray, gold: np.ndarray, temperature: float) -> float:
    """Mean -log softmax(scores/T)[gold]; -inf padding contributes nothing."""
    scaled = scores / temperature
    row_max = scaled.max(axis=1)
    lse = row_max + np.log(np.exp(scaled - row_max[:, None]).sum(axis=1))
    gold_scores = scaled[np.arange(scores.shape[0]), gold]
    return float(np.mean(lse - gold_scores))


def fit_temperature(avg_scores_per_example, gold_indices, calibration_indices) -> TemperatureFit:
    """Fit T minimizing calibration NLL of softmax(scores / T) at the gold index.

    Log-spaced grid search followed by golden-section refinement between the
    best grid point's neighbors; the refined value is kept only when strictly
    better, so a flat objective returns the grid point nearest T = 1. A final
    T = 1 candidate guarantees NLL(T*) <= NLL(1).
    """
    cal = list(calibration_indices)
    if len(cal) == 0:
        raise ValueError("calibration set is empty")
    scores = _padded_scores([avg_scores_per_example[i] for i in cal])
    gold = np.asarray([gold_indices[i] for i in cal], dtype=np.int64)
    if gold.min() < 0 or np.any(gold >= np.sum(np.isfinite(scores), axis=1)):
        raise ValueError("gold index outside its score vector")

    lo, hi = TEMPERATURE_BOUNDS
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), TEMPERATURE_GRID_POINTS))
    grid_nll = np.array([_mean_nll(scores, gold, t) for t in grid])

    best_nll = grid_nll.min()
    tied = np.flatnonzero(grid_nll == best_nll)
    # Tie rule: nearest to T=1 in log space, then the smaller temperature.
    best_idx = int(min(tied, key=lambda i: (abs(math.log(grid[i])), grid[i])))
    best_t = float(grid[best_idx])

    bracket_lo = math.log(grid[max(best_idx - 1, 0)])
    bracket_hi = math.log(grid[min(best_idx + 1, grid.size - 1)])

    def f(log_t: float) -> float:
        return _mean_nll(scores, gold, math.exp(log_t))

    a, b = bracket_lo, bracket_hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    iterations = 0
    while b - a > 1e-4:
        iterations += 1
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    refined_t = math.exp((a + b) / 2.0)
    refined_nll = _mean_nll(scores, gold, refined_t)

    final_t, final_nll = best_t, float(best_nll)
    if refined_nll < final_nll:
        final_t, final_nll = refined_t, refined_nll
    nll_at_one = _mean_nll(scores, gold, 1.0)
    if nll_at_one < final_nll:
        final_t, final_nll = 1.0, nll_at_one

    return TemperatureFit(temperature=final_t, calibration_nll=final_nll, iterations=iterations)


def bootstrap_replicate_indices(seed: int, replicate: int, n: int) -> np.ndarray:
    """The index multiset for one replicate, derived from (seed, replicate)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(replicate,))))
    return rng.integers(0, n, size=n)


def bootstrap_delta_auroc(conf_a, conf_b, labels, replicates: int = 2000,
                          seed: int = 42) -> BootstrapResult:
    """Percentile bootstrap of AUROC(conf_a) - AUROC(conf_b) on shared labels.

    Each replicate resamples one index multiset applied jointly to conf_a,
    conf_b, and labels. Replicates whose resampled labels are single-class are
    discarded (never imputed); the CI is the empirical [2.5, 97.5] percentile
    interval over kept replicates.
    """
    a = np.asarray(conf_a, dtype=np.float64)
    b = np.asarray(conf_b, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if not (a.shape == b.shape == y.shape) or a.ndim != 1:
        raise ValueError("conf_a, conf_b, labels must be equal-length 1-D")
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    n_pos = int((y == 1).sum())
    if n_pos == 0 or n_pos == y.size:
        raise DegenerateInputError("bootstrap undefined: labels contain a single class")

    deltas: list[float] = []
    discarded = 0
    for r in range(replicates):
        idx = bootstrap_replicate_indices(seed, r, y.size)
        y_r = y[idx]
        k = int((y_r == 1).sum())
        if k == 0 or k == y_r.size:
            discarded += 1
            continue
        deltas.append(auroc(a[idx], y_r) - auroc(b[idx], y_r))

    if not deltas:
        raise StatisticsError(f"all {replicates} bootstrap replicates were single-class")
    return BootstrapResult(
        mean_delta=float(np.mean(deltas)),
        ci_low=percentile(deltas, 2.5),
        ci_high=percentile(deltas, 97.5),
        kept_replicates=len(deltas),
        discarded_replicates=discarded,
    )


def percentile(values, q: float) -> float:
    """Empirical percentile with linear interpolation between order statistics."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("percentile of empty list")
    if not (0.0 <= q <= 100.0):
        raise ValueError(f"q must be in [0, 100], got {q}")
    return float(np.percentile(v, q))
