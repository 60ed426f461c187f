"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines on stdout.
"""

from __future__ import annotations

import csv
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

import selpred.calibration as calibration
from selpred.calibration import bootstrap_delta_auroc, bootstrap_replicate_indices, fit_temperature
from selpred.cli import main as cli_main
from selpred.errors import DegenerateInputError
from selpred.metrics import (
    MetricReport,
    aurc,
    auroc,
    brier,
    cov_at_error,
    ece,
    err_at_coverage,
    risk_coverage_curve,
)
from selpred.records import VerifyLogits, load_run
from selpred.report import emit_main_table, emit_operating_points
from selpred.signals import LL_AVG, LL_SUM, SELF_VERIFY, build_signal_frames, self_verify_confidence
from selpred.synth import aurc_bruteforce, auroc_bruteforce


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[acceptance] FAIL {name}")
        raise
    print(f"[acceptance] PASS {name}")


def random_instance(rng):
    n = int(rng.integers(2, 65))
    conf = rng.random(n)
    if n >= 4:
        dup = int(rng.integers(1, max(2, n // 3), endpoint=True))
        idx = rng.choice(n, size=dup * 2, replace=False)
        conf[idx[:dup]] = conf[idx[dup:]]
    labels = rng.integers(0, 2, n)
    if labels.min() == labels.max():
        labels[0] = 1 - labels[0]
    return conf, labels


def test_oracle_equivalence():
    with criterion("oracle equivalence: auroc/aurc vs brute force, 200 instances, 1e-12"):
        start = time.perf_counter()
        rng = np.random.default_rng(2024)
        for _ in range(200):
            conf, labels = random_instance(rng)
            assert abs(auroc(conf, labels) - auroc_bruteforce(list(conf), list(labels))) < 1e-12
            fast = aurc(risk_coverage_curve(conf, labels))
            assert abs(fast - aurc_bruteforce(list(conf), list(labels))) < 1e-12
        elapsed = time.perf_counter() - start
        assert elapsed < 10.0, f"oracle equivalence took {elapsed:.1f}s"


def test_hand_computed_fixtures():
    with criterion("hand-computed fixtures: AURC/AUROC/Brier/ECE exact"):
        assert aurc(risk_coverage_curve([0.9, 0.1], [1, 0])) == 0.375
        assert aurc(risk_coverage_curve([0.9, 0.8, 0.7, 0.6, 0.5], [1, 1, 1, 1, 1])) == 0.1
        assert auroc([0.8, 0.7, 0.6, 0.5], [1, 0, 1, 0]) == 0.75
        assert brier([0.5, 0.5], [1, 0]) == 0.25
        assert ece([0.95, 0.95], [0, 0]) == 0.95


def test_rank_invariance():
    with criterion("rank invariance: monotone transforms, 100 instances, bit-identical"):
        rng = np.random.default_rng(77)
        transforms = (
            lambda c: 0.5 * c,
            lambda c: c + 2.0,
            lambda c: np.exp(c),
            lambda c: c ** 3,
        )
        for _ in range(100):
            conf, labels = random_instance(rng)
            base = (
                auroc(conf, labels),
                aurc(risk_coverage_curve(conf, labels)),
                err_at_coverage(conf, labels, 0.8),
                err_at_coverage(conf, labels, 0.5),
                cov_at_error(conf, labels, 0.2),
                cov_at_error(conf, labels, 0.1),
            )
            for transform in transforms:
                t = transform(conf)
                assert base == (
                    auroc(t, labels),
                    aurc(risk_coverage_curve(t, labels)),
                    err_at_coverage(t, labels, 0.8),
                    err_at_coverage(t, labels, 0.5),
                    cov_at_error(t, labels, 0.2),
                    cov_at_error(t, labels, 0.1),
                )


def test_self_verify_math():
    with criterion("self-verify sigmoid/logsumexp fixtures"):
        v = self_verify_confidence(VerifyLogits((1.0,), (0.0,)))
        assert abs(v - 0.731059) < 1e-6
        v = self_verify_confidence(VerifyLogits((0.0, 0.0), (0.0,)))
        assert abs(v - 2.0 / 3.0) < 1e-9
        for x in (-50.0, -1.0, 0.0, 2.5, 60.0):
            assert self_verify_confidence(VerifyLogits((x,), (x,))) == 0.5


def dense_grid_oracle(scores, gold):
    """Independent minimizer: log-spaced grid sweep refined to 1e-5 resolution.

    A full-range pass at 1e-3 log spacing locates the minimum; a second pass
    covers +/- 2e-2 log around it at 1e-5 spacing, so the returned argmin has
    1e-5 grid resolution.
    """
    s = np.asarray(scores)
    g = np.asarray(gold)

    def sweep(log_ts):
        best_nll, best_t = math.inf, None
        for chunk in np.array_split(log_ts, max(1, log_ts.size // 2048)):
            ts = np.exp(chunk)  # (G,)
            scaled = s[None, :, :] / ts[:, None, None]  # (G, m, K)
            m = scaled.max(axis=2, keepdims=True)
            lse = m[:, :, 0] + np.log(np.exp(scaled - m).sum(axis=2))
            nll = (lse - scaled[:, np.arange(s.shape[0]), g]).mean(axis=1)
            i = int(nll.argmin())
            if nll[i] < best_nll:
                best_nll, best_t = float(nll[i]), float(ts[i])
        return best_t, best_nll

    coarse_t, _ = sweep(np.arange(math.log(0.05), math.log(20.0) + 1e-3, 1e-3))
    lo = max(math.log(0.05), math.log(coarse_t) - 2e-2)
    hi = min(math.log(20.0), math.log(coarse_t) + 2e-2)
    return sweep(np.arange(lo, hi + 1e-5, 1e-5))


def test_temperature_recovery():
    with criterion("temperature recovery: T* within 5% of 3.0 vs 1e-5 grid oracle"):
        start = time.perf_counter()
        rng = np.random.default_rng(123)
        n, k = 400, 4
        z = rng.normal(0.0, 2.0, size=(n, k))
        gold = np.array([
            rng.choice(k, p=np.exp(r - r.max()) / np.exp(r - r.max()).sum()) for r in z
        ])
        scores = [3.0 * row for row in z]

        fit = fit_temperature(scores, list(gold), list(range(n)))
        assert abs(fit.temperature - 3.0) / 3.0 < 0.05

        oracle_t, oracle_nll = dense_grid_oracle(np.asarray(scores), gold)
        assert abs(oracle_t - 3.0) / 3.0 < 0.05
        assert abs(math.log(fit.temperature / oracle_t)) < 1e-3
        # Golden section stops at 1e-4 log width, so its NLL can sit ~1e-8
        # above the 1e-5-resolution grid minimum.
        assert fit.calibration_nll <= oracle_nll + 1e-6

        # NLL(T*) <= NLL(1) on every tested instance.
        for seed in range(4):
            rng_i = np.random.default_rng(seed)
            z_i = rng_i.normal(0.0, 1.5, size=(150, 4))
            gold_i = rng_i.integers(0, 4, size=150)
            scores_i = [row for row in z_i]
            fit_i = fit_temperature(scores_i, list(gold_i), list(range(150)))
            scaled = z_i
            m = scaled.max(axis=1)
            lse = m + np.log(np.exp(scaled - m[:, None]).sum(axis=1))
            nll_one = float((lse - scaled[np.arange(150), gold_i]).mean())
            assert fit_i.calibration_nll <= nll_one + 1e-9

        elapsed = time.perf_counter() - start
        assert elapsed < 5.0, f"temperature recovery took {elapsed:.1f}s"


def test_bootstrap_contract(monkeypatch):
    with criterion("bootstrap: zero delta on identity, joint resampling x2000, no imputation"):
        conf = np.linspace(0.05, 0.95, 30)
        labels = np.array([0, 1] * 15)
        result = bootstrap_delta_auroc(conf, conf, labels, replicates=2000, seed=42)
        assert result.mean_delta == 0.0
        assert (result.ci_low, result.ci_high) == (0.0, 0.0)
        assert result.kept_replicates + result.discarded_replicates == 2000

        rng = np.random.default_rng(6)
        a = np.clip(0.5 * labels + 0.5 * rng.random(30), 0, 1)
        b = rng.random(30)
        recorded = []
        original = calibration.bootstrap_replicate_indices

        def recording(seed, replicate, n):
            idx = original(seed, replicate, n)
            recorded.append(idx)
            return idx

        monkeypatch.setattr(calibration, "bootstrap_replicate_indices", recording)
        result = bootstrap_delta_auroc(a, b, labels, replicates=2000, seed=42)
        monkeypatch.setattr(calibration, "bootstrap_replicate_indices", original)
        assert len(recorded) == 2000  # one shared index multiset per replicate
        deltas = []
        for idx in recorded:
            y_r = labels[idx]
            if y_r.min() == y_r.max():
                continue
            deltas.append(auroc(a[idx], y_r) - auroc(b[idx], y_r))
        assert len(deltas) == result.kept_replicates
        assert result.mean_delta == pytest.approx(float(np.mean(deltas)), abs=1e-15)

        with pytest.raises(DegenerateInputError):
            bootstrap_delta_auroc([0.1, 0.2, 0.3], [0.3, 0.2, 0.1], [1, 1, 1])


def test_end_to_end_determinism(tmp_path):
    with criterion("end-to-end determinism: synth -> eval twice, byte-identical"):
        run_dir = tmp_path / "run"
        assert cli_main(["synth", "--n", "120", "--options", "4", "--quality", "0.8",
                         "--accuracy", "0.6", "--seed", "42", "--out", str(run_dir)]) == 0
        out_a, out_b = tmp_path / "out_a", tmp_path / "out_b"
        for out in (out_a, out_b):
            assert cli_main(["eval", "--run-dir", str(run_dir), "--out", str(out)]) == 0

        files_a = sorted(p.relative_to(out_a) for p in out_a.rglob("*") if p.is_file())
        files_b = sorted(p.relative_to(out_b) for p in out_b.rglob("*") if p.is_file())
        assert files_a == files_b and files_a
        for rel in files_a:
            assert (out_a / rel).read_bytes() == (out_b / rel).read_bytes(), rel

        # Table cells equal direct API calls to 1e-12 before rounding.
        run = load_run(run_dir)
        rows = list(csv.reader((out_a / "main_table.csv").read_text().splitlines()))
        header, body = rows[0], rows[1:]
        for variant in ("audit_v1", "default"):
            frames = {f.signal_name: f for f in build_signal_frames(run, variant)}
            row = next(r for r in body if r[2] == variant)
            for signal in (LL_AVG, SELF_VERIFY, LL_SUM):
                api_auroc = auroc(frames[signal].confidences, frames[signal].labels)
                api_aurc = aurc(risk_coverage_curve(frames[signal].confidences, frames[signal].labels))
                assert row[header.index(f"AUROC ({signal})")] == f"{api_auroc:.3f}"
                assert row[header.index(f"AURC ({signal})")] == f"{api_aurc:.3f}"


def test_table_rendering_fixtures(tmp_path):
    with criterion("table rendering: stored fixtures reproduce reference rows"):
        base = dict(dataset="ARC-Challenge", model="Qwen-7B", prompt="default",
                    accuracy_llavg=0.602, brier=0.0, ece10=0.0)
        reports = [
            MetricReport(signal=LL_AVG, auroc=0.555, aurc=0.364, **base),
            MetricReport(signal=SELF_VERIFY, auroc=0.886, aurc=0.143, **base),
            MetricReport(signal=LL_SUM, auroc=0.753, aurc=0.154, **base),
        ]
        emit_main_table(reports, tmp_path)
        rows = list(csv.reader((tmp_path / "main_table.csv").read_text().splitlines()))
        assert " ".join(rows[1][3:]) == "0.602 0.555 0.886 0.753 0.364 0.143 0.154"

        op = MetricReport(
            dataset="ARC-Challenge", model="Qwen-7B", prompt="default", signal=SELF_VERIFY,
            accuracy_llavg=0.602, auroc=0.886, aurc=0.143, brier=0.0, ece10=0.0,
            err_at={0.8: 0.271, 0.5: 0.121}, cov_at={0.2: 0.666, 0.1: 0.463},
        )
        emit_operating_points([op], tmp_path)
        rows = list(csv.reader((tmp_path / "operating_points.csv").read_text().splitlines()))
        assert " ".join(rows[1][4:]) == "0.271 0.121 0.666 0.463"
