"""Evaluation orchestration and table emission.

``evaluate`` turns run directories into MetricReports, pairwise delta rows,
bootstrap rows, prompt-ablation rows, and risk-coverage curves; the ``emit_*``
functions render those into delimited CSV plus aligned text tables. All
rounding happens at render time (3 decimals); undefined cells render as "NA".
Output files are byte-deterministic for a fixed config and input runs.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .calibration import (
    BootstrapResult,
    bootstrap_delta_auroc,
    fit_temperature,
    split_calibration,
)
from .errors import ConfigurationError, DegenerateInputError, SelpredError, StatisticsError
from .metrics import (
    MetricReport,
    RiskCoverageCurve,
    aurc,
    auroc,
    brier,
    cov_at_error,
    ece,
    err_at_coverage,
    risk_coverage_curve,
)
from .records import ValidatedRun, load_run
from .signals import (
    ALL_SIGNALS,
    ENTROPY_CONF,
    LL_AVG,
    LL_AVG_T,
    LL_SUM,
    MARGIN,
    SELF_VERIFY,
    SignalFrame,
    averaged_scores,
    build_signal_frames,
)

DEFAULT_SIGNALS = (LL_AVG, SELF_VERIFY, LL_SUM, MARGIN, ENTROPY_CONF, LL_AVG_T)
MAIN_TABLE_SIGNALS = (LL_AVG, SELF_VERIFY, LL_SUM)


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = 2000
    seed: int = 42
    enabled: bool = True


@dataclass(frozen=True)
class TemperatureConfig:
    fraction: float = 0.2
    minimum: int = 50
    seed: int = 42


@dataclass(frozen=True)
class EvalConfig:
    run_directories: tuple[str, ...]
    signals: tuple[str, ...] = DEFAULT_SIGNALS
    prompt_variants: tuple[str, ...] | None = None  # None: use each run's manifest
    coverage_targets: tuple[float, ...] = (0.8, 0.5)
    risk_targets: tuple[float, ...] = (0.2, 0.1)
    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)
    temperature: TemperatureConfig = field(default_factory=TemperatureConfig)
    output_directory: str = ""
    figures: bool = True

    def __post_init__(self):
        if not self.run_directories:
            raise ConfigurationError("at least one run directory is required")
        unknown = [s for s in self.signals if s not in ALL_SIGNALS]
        if unknown:
            raise ConfigurationError(f"unknown signal name(s): {unknown} (known: {list(ALL_SIGNALS)})")
        for t in self.coverage_targets:
            if not (0.0 < t <= 1.0):
                raise ConfigurationError(f"coverage target must be in (0, 1], got {t}")
        for t in self.risk_targets:
            if not (0.0 <= t <= 1.0):
                raise ConfigurationError(f"risk target must be in [0, 1], got {t}")


@dataclass(frozen=True)
class DeltaRow:
    """Self-Verify minus LL-AVG / LL-SUM metric differences for one table row."""

    dataset: str
    model: str
    prompt: str
    d_auroc_sv_llavg: float | None
    d_aurc_sv_llavg: float | None
    d_auroc_sv_llsum: float | None
    d_aurc_sv_llsum: float | None


@dataclass(frozen=True)
class BootstrapRow:
    dataset: str
    model: str
    prompt: str
    result: BootstrapResult | None  # None: degenerate labels, rendered NA


@dataclass(frozen=True)
class AblationRow:
    dataset: str
    model: str
    variant_a: str
    variant_b: str
    aurc_a: float
    aurc_b: float
    auroc_a: float | None
    auroc_b: float | None


@dataclass(frozen=True)
class EvalResult:
    config: EvalConfig
    reports: tuple[MetricReport, ...]
    deltas: tuple[DeltaRow, ...]
    bootstraps: tuple[BootstrapRow, ...]
    ablations: tuple[AblationRow, ...]
    curves: dict[tuple[str, str, str, str], RiskCoverageCurve]  # (dataset, model, prompt, signal)


def _signal_sort_key(signal: str) -> int:
    return ALL_SIGNALS.index(signal)


def _report_sort_key(r: MetricReport):
    return (r.dataset, r.model, r.prompt, _signal_sort_key(r.signal))


def _llavg_labels(run: ValidatedRun) -> np.ndarray:
    labels = np.empty(len(run.records), dtype=np.int64)
    for i, rec in enumerate(run.records):
        labels[i] = int(int(np.argmax(averaged_scores(rec))) == rec.gold_index)
    return labels


def _metric_report(dataset: str, model: str, prompt: str, frame: SignalFrame,
                   accuracy_llavg: float, coverage_targets, risk_targets) -> MetricReport:
    conf, labels = frame.confidences, frame.labels
    try:
        auroc_value = auroc(conf, labels)
    except DegenerateInputError:
        auroc_value = None
    curve = risk_coverage_curve(conf, labels)
    return MetricReport(
        dataset=dataset,
        model=model,
        prompt=prompt,
        signal=frame.signal_name,
        accuracy_llavg=accuracy_llavg,
        auroc=auroc_value,
        aurc=aurc(curve),
        brier=brier(conf, labels),
        ece10=ece(conf, labels, bins=10),
        err_at={t: err_at_coverage(conf, labels, t) for t in coverage_targets},
        cov_at={t: cov_at_error(conf, labels, t) for t in risk_targets},
    )


def evaluate(config: EvalConfig) -> EvalResult:
    """Run the full metric pipeline over every configured run directory."""
    reports: list[MetricReport] = []
    deltas: list[DeltaRow] = []
    bootstraps: list[BootstrapRow] = []
    ablations: list[AblationRow] = []
    curves: dict[tuple[str, str, str, str], RiskCoverageCurve] = {}

    for directory in config.run_directories:
        try:
            run = load_run(directory)
        except (OSError, SelpredError) as exc:
            raise type(exc)(f"run directory {directory}: {exc}") from exc
        dataset, model = run.manifest.dataset_name, run.manifest.model_id
        variants = tuple(config.prompt_variants or run.manifest.prompt_variants)
        n = len(run.records)

        run_signals = list(config.signals)
        temperature = None
        if LL_AVG_T in run_signals:
            if n < 2:
                run_signals.remove(LL_AVG_T)  # no held-out split possible
            else:
                split = split_calibration(
                    n, config.temperature.fraction, config.temperature.minimum, config.temperature.seed
                )
                fit = fit_temperature(
                    [averaged_scores(r) for r in run.records],
                    [r.gold_index for r in run.records],
                    split.calibration_indices,
                )
                temperature = fit.temperature

        accuracy_llavg = float(_llavg_labels(run).mean())

        # Variant-independent signals are computed once per run and repeated
        # across prompt rows; only Self-Verify depends on the variant.
        shared_names = [s for s in run_signals if s != SELF_VERIFY]
        shared_frames = (
            build_signal_frames(run, variants[0], temperature, shared_names) if shared_names else []
        )
        sv_reports: dict[str, MetricReport] = {}
        shared_reports_by_prompt: dict[tuple[str, str], MetricReport] = {}

        for variant in variants:
            frames = list(shared_frames)
            if SELF_VERIFY in run_signals:
                frames.extend(build_signal_frames(run, variant, temperature, [SELF_VERIFY]))
            for frame in frames:
                report = _metric_report(
                    dataset, model, variant, frame, accuracy_llavg,
                    config.coverage_targets, config.risk_targets,
                )
                reports.append(report)
                curves[(dataset, model, variant, frame.signal_name)] = risk_coverage_curve(
                    frame.confidences, frame.labels
                )
                if frame.signal_name == SELF_VERIFY:
                    sv_reports[variant] = report
                else:
                    shared_reports_by_prompt[(variant, frame.signal_name)] = report

            if SELF_VERIFY in run_signals and LL_AVG in run_signals:
                sv = sv_reports[variant]
                llavg = shared_reports_by_prompt[(variant, LL_AVG)]
                llsum = shared_reports_by_prompt.get((variant, LL_SUM))
                deltas.append(DeltaRow(
                    dataset=dataset, model=model, prompt=variant,
                    d_auroc_sv_llavg=_diff(sv.auroc, llavg.auroc),
                    d_aurc_sv_llavg=sv.aurc - llavg.aurc,
                    d_auroc_sv_llsum=_diff(sv.auroc, llsum.auroc) if llsum else None,
                    d_aurc_sv_llsum=(sv.aurc - llsum.aurc) if llsum else None,
                ))
                if config.bootstrap.enabled:
                    sv_frame = next(f for f in frames if f.signal_name == SELF_VERIFY)
                    llavg_frame = next(f for f in shared_frames if f.signal_name == LL_AVG)
                    try:
                        result = bootstrap_delta_auroc(
                            sv_frame.confidences, llavg_frame.confidences, sv_frame.labels,
                            replicates=config.bootstrap.replicates, seed=config.bootstrap.seed,
                        )
                    except (DegenerateInputError, StatisticsError):
                        result = None
                    bootstraps.append(BootstrapRow(dataset=dataset, model=model, prompt=variant, result=result))

        if SELF_VERIFY in run_signals and len(variants) >= 2:
            va, vb = sorted(variants)[:2]
            ablations.append(AblationRow(
                dataset=dataset, model=model, variant_a=va, variant_b=vb,
                aurc_a=sv_reports[va].aurc, aurc_b=sv_reports[vb].aurc,
                auroc_a=sv_reports[va].auroc, auroc_b=sv_reports[vb].auroc,
            ))

    reports.sort(key=_report_sort_key)
    deltas.sort(key=lambda d: (d.dataset, d.model, d.prompt))
    bootstraps.sort(key=lambda b: (b.dataset, b.model, b.prompt))
    ablations.sort(key=lambda a: (a.dataset, a.model))
    return EvalResult(
        config=config,
        reports=tuple(reports),
        deltas=tuple(deltas),
        bootstraps=tuple(bootstraps),
        ablations=tuple(ablations),
        curves=curves,
    )


def _diff(a: float | None, b: float | None) -> float | None:
    if a is None or b is None:
        return None
    return a - b


# ---------------------------------------------------------------------------
# rendering


def format_cell(value: float | None) -> str:
    return "NA" if value is None else f"{value:.3f}"


def _target_label(kind: str, target: float) -> str:
    pct = format(target * 100, "g")
    return f"err@{pct}%cov" if kind == "err" else f"cov@{pct}%err"


def _write_tables(directory: Path, stem: str, header: list[str], rows: list[list[str]],
                  notes: list[str] | None = None) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"{stem}.csv"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for note in notes or []:
        buffer.write(f"# {note}\n")
    writer.writerow(header)
    writer.writerows(rows)
    csv_path.write_text(buffer.getvalue(), encoding="utf-8")

    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i])
              for i in range(len(header))]
    lines = [note_line for note_line in (f"# {n}" for n in notes or [])]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    (directory / f"{stem}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return csv_path


def emit_main_table(reports, directory: str | Path) -> Path:
    """Main results table: accuracy plus AUROC/AURC for the three core signals."""
    reports = sorted(reports, key=_report_sort_key)
    by_cell: dict[tuple[str, str, str], dict[str, MetricReport]] = {}
    for r in reports:
        by_cell.setdefault((r.dataset, r.model, r.prompt), {})[r.signal] = r

    present = [s for s in MAIN_TABLE_SIGNALS if any(r.signal == s for r in reports)]
    omitted = [s for s in MAIN_TABLE_SIGNALS if s not in present]
    header = ["Dataset", "Model", "Prompt", "Acc (LL-AVG)"]
    header += [f"AUROC ({s})" for s in present]
    header += [f"AURC ({s})" for s in present]

    rows = []
    for (dataset, model, prompt), cells in sorted(by_cell.items()):
        any_report = next(iter(cells.values()))
        row = [dataset, model, prompt, format_cell(any_report.accuracy_llavg)]
        row += [format_cell(cells[s].auroc) if s in cells else "NA" for s in present]
        row += [format_cell(cells[s].aurc) if s in cells else "NA" for s in present]
        rows.append(row)

    notes = [f"columns omitted (signal not evaluated): {', '.join(omitted)}"] if omitted else None
    return _write_tables(Path(directory), "main_table", header, rows, notes)


def emit_operating_points(reports, directory: str | Path) -> Path:
    """Operating-point table: err@coverage and cov@error per signal row."""
    reports = sorted(reports, key=_report_sort_key)
    coverage_targets = sorted({t for r in reports for t in r.err_at}, reverse=True)
    risk_targets = sorted({t for r in reports for t in r.cov_at}, reverse=True)
    header = ["Dataset", "Model", "Prompt", "Signal"]
    header += [_target_label("err", t) for t in coverage_targets]
    header += [_target_label("cov", t) for t in risk_targets]
    rows = []
    for r in reports:
        row = [r.dataset, r.model, r.prompt, r.signal]
        row += [format_cell(r.err_at.get(t)) for t in coverage_targets]
        row += [format_cell(r.cov_at.get(t)) for t in risk_targets]
        rows.append(row)
    return _write_tables(Path(directory), "operating_points", header, rows)


def emit_calibration_table(reports, directory: str | Path) -> Path:
    """Brier and ECE-10 per signal, one row per (dataset, model, prompt)."""
    reports = sorted(reports, key=_report_sort_key)
    present = [s for s in ALL_SIGNALS if any(r.signal == s for r in reports)]
    by_cell: dict[tuple[str, str, str], dict[str, MetricReport]] = {}
    for r in reports:
        by_cell.setdefault((r.dataset, r.model, r.prompt), {})[r.signal] = r
    header = ["Dataset", "Model", "Prompt"]
    header += [f"Brier ({s})" for s in present]
    header += [f"ECE10 ({s})" for s in present]
    rows = []
    for (dataset, model, prompt), cells in sorted(by_cell.items()):
        row = [dataset, model, prompt]
        row += [format_cell(cells[s].brier) if s in cells else "NA" for s in present]
        row += [format_cell(cells[s].ece10) if s in cells else "NA" for s in present]
        rows.append(row)
    return _write_tables(Path(directory), "calibration_table", header, rows)


def emit_delta_table(deltas, directory: str | Path) -> Path:
    header = [
        "Dataset", "Model", "Prompt",
        "Delta AUROC (SV-LLAVG)", "Delta AURC (SV-LLAVG)",
        "Delta AUROC (SV-LLSUM)", "Delta AURC (SV-LLSUM)",
    ]
    rows = [
        [d.dataset, d.model, d.prompt,
         format_cell(d.d_auroc_sv_llavg), format_cell(d.d_aurc_sv_llavg),
         format_cell(d.d_auroc_sv_llsum), format_cell(d.d_aurc_sv_llsum)]
        for d in sorted(deltas, key=lambda d: (d.dataset, d.model, d.prompt))
    ]
    return _write_tables(Path(directory), "deltas", header, rows)


def emit_bootstrap_table(bootstraps, directory: str | Path) -> Path:
    header = ["Dataset", "Model", "Prompt", "Mean Delta AUROC", "CI 2.5%", "CI 97.5%",
              "Kept Replicates", "Discarded Replicates"]
    rows = []
    for b in sorted(bootstraps, key=lambda b: (b.dataset, b.model, b.prompt)):
        if b.result is None:
            rows.append([b.dataset, b.model, b.prompt, "NA", "NA", "NA", "NA", "NA"])
        else:
            rows.append([
                b.dataset, b.model, b.prompt,
                format_cell(b.result.mean_delta), format_cell(b.result.ci_low),
                format_cell(b.result.ci_high),
                str(b.result.kept_replicates), str(b.result.discarded_replicates),
            ])
    notes = ["replicate counts are drawn counts; discards reduce the kept count"]
    return _write_tables(Path(directory), "bootstrap", header, rows, notes)


def emit_ablation_table(ablations, directory: str | Path) -> Path:
    """Self-Verify prompt-sensitivity table across two verification variants."""
    ablations = sorted(ablations, key=lambda a: (a.dataset, a.model))
    if ablations and all(
        (a.variant_a, a.variant_b) == (ablations[0].variant_a, ablations[0].variant_b) for a in ablations
    ):
        va, vb = ablations[0].variant_a, ablations[0].variant_b
        header = ["Dataset", "Model", f"AURC ({va})", f"AURC ({vb})",
                  f"AUROC ({va})", f"AUROC ({vb})", "|Delta AUROC|", "|Delta AURC|"]
        rows = [
            [a.dataset, a.model, format_cell(a.aurc_a), format_cell(a.aurc_b),
             format_cell(a.auroc_a), format_cell(a.auroc_b),
             format_cell(_abs_diff(a.auroc_a, a.auroc_b)), format_cell(abs(a.aurc_a - a.aurc_b))]
            for a in ablations
        ]
    else:
        header = ["Dataset", "Model", "Variant A", "Variant B", "AURC (A)", "AURC (B)",
                  "AUROC (A)", "AUROC (B)", "|Delta AUROC|", "|Delta AURC|"]
        rows = [
            [a.dataset, a.model, a.variant_a, a.variant_b,
             format_cell(a.aurc_a), format_cell(a.aurc_b),
             format_cell(a.auroc_a), format_cell(a.auroc_b),
             format_cell(_abs_diff(a.auroc_a, a.auroc_b)), format_cell(abs(a.aurc_a - a.aurc_b))]
            for a in ablations
        ]
    return _write_tables(Path(directory), "prompt_ablation", header, rows)


def _abs_diff(a: float | None, b: float | None) -> float | None:
    if a is None or b is None:
        return None
    return abs(a - b)


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", text)


def curve_filename(dataset: str, model: str, prompt: str, signal: str) -> str:
    return f"curve__{_slug(dataset)}__{_slug(model)}__{_slug(prompt)}__{_slug(signal)}.csv"


def emit_curves(curves: dict[tuple[str, str, str, str], RiskCoverageCurve],
                directory: str | Path) -> list[Path]:
    """One `coverage,risk` file per (dataset, model, prompt, signal), full precision."""
    out_dir = Path(directory) / "curves"
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for key in sorted(curves, key=lambda k: (k[0], k[1], k[2], _signal_sort_key(k[3]))):
        path = out_dir / curve_filename(*key)
        lines = ["coverage,risk"]
        lines.extend(f"{c!r},{r!r}" for c, r in curves[key].points)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        paths.append(path)
    return paths


def _config_snapshot(config: EvalConfig) -> dict:
    # output_directory is intentionally excluded: the snapshot lives inside it,
    # and rerunning into a different directory must reproduce identical bytes.
    return {
        "run_directories": list(config.run_directories),
        "signals": list(config.signals),
        "prompt_variants": list(config.prompt_variants) if config.prompt_variants else None,
        "coverage_targets": list(config.coverage_targets),
        "risk_targets": list(config.risk_targets),
        "bootstrap": {
            "replicates": config.bootstrap.replicates,
            "seed": config.bootstrap.seed,
            "enabled": config.bootstrap.enabled,
        },
        "temperature": {
            "fraction": config.temperature.fraction,
            "minimum": config.temperature.minimum,
            "seed": config.temperature.seed,
        },
        "figures": config.figures,
    }


def write_outputs(result: EvalResult, directory: str | Path) -> Path:
    """Write the config snapshot, every table, curve files, and (optionally) figures."""
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(
        json.dumps(_config_snapshot(result.config), indent=2) + "\n", encoding="utf-8"
    )
    emit_main_table(result.reports, out_dir)
    emit_operating_points(result.reports, out_dir)
    emit_calibration_table(result.reports, out_dir)
    emit_delta_table(result.deltas, out_dir)
    if result.bootstraps:
        emit_bootstrap_table(result.bootstraps, out_dir)
    if result.ablations:
        emit_ablation_table(result.ablations, out_dir)
    emit_curves(result.curves, out_dir)
    if result.config.figures:
        from .figures import write_figures  # deferred: matplotlib import is heavy

        write_figures(result, out_dir)
    return out_dir
