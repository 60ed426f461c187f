"""Figure rendering for the report path: risk-coverage curves and metric bars.

PNG companions to the delimited outputs; the CSV curve files stay the
plot-ready interface. Rendering is byte-deterministic (Agg backend, fixed
style, no timestamps), so figure output is safe inside reproducibility
checks that diff whole output directories.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .metrics import RiskCoverageCurve
from .signals import ALL_SIGNALS

_STYLE = {
    "figure.figsize": (5.0, 3.4),
    "figure.dpi": 150,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.labelsize": 10,
    "font.size": 9,
    "legend.fontsize": 8,
}

_SIGNAL_COLORS = {
    "LL-AVG": "tab:blue",
    "Self-Verify": "tab:red",
    "LL-SUM": "tab:green",
    "Margin": "tab:orange",
    "EntropyConf": "tab:purple",
    "LL-AVG-T": "tab:brown",
}


def _slug(text: str) -> str:
    import re

    return re.sub(r"[^A-Za-z0-9._-]+", "-", text)


def plot_risk_coverage(curves_by_signal: dict[str, RiskCoverageCurve], title: str,
                       path: str | Path) -> Path:
    """Overlay one risk-coverage curve per signal."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for signal in sorted(curves_by_signal, key=ALL_SIGNALS.index):
            curve = curves_by_signal[signal]
            cov = [c for c, _ in curve.points]
            risk = [r for _, r in curve.points]
            ax.plot(cov, risk, label=signal, color=_SIGNAL_COLORS.get(signal), linewidth=1.4)
        ax.set_xlabel("coverage")
        ax.set_ylabel("risk")
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, 1.02)
        ax.set_title(title, fontsize=9)
        ax.legend(loc="best")
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def plot_metric_bars(values: dict[tuple[str, str], float | None], metric: str, title: str,
                     path: str | Path) -> Path:
    """Grouped bars of one metric, keyed by (prompt, signal); NA cells are skipped."""
    items = [(k, v) for k, v in sorted(values.items(), key=lambda kv: (kv[0][0], ALL_SIGNALS.index(kv[0][1])))
             if v is not None]
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        xs = range(len(items))
        heights = [v for _, v in items]
        colors = [_SIGNAL_COLORS.get(signal, "tab:gray") for (_, signal), _ in items]
        ax.bar(xs, heights, color=colors)
        ax.set_xticks(list(xs))
        ax.set_xticklabels([f"{signal}\n{prompt}" for (prompt, signal), _ in items], fontsize=7)
        ax.set_ylabel(metric)
        ax.set_ylim(0.0, 1.0)
        ax.set_title(title, fontsize=9)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def write_figures(result, directory: str | Path) -> list[Path]:
    """Render per-(run, prompt) curve overlays and per-run AUROC/AURC bars."""
    fig_dir = Path(directory) / "figures"
    fig_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    groups: dict[tuple[str, str, str], dict[str, RiskCoverageCurve]] = {}
    for (dataset, model, prompt, signal), curve in result.curves.items():
        groups.setdefault((dataset, model, prompt), {})[signal] = curve
    for (dataset, model, prompt), by_signal in sorted(groups.items()):
        path = fig_dir / f"risk_coverage__{_slug(dataset)}__{_slug(model)}__{_slug(prompt)}.png"
        written.append(plot_risk_coverage(by_signal, f"{dataset} / {model} ({prompt})", path))

    runs: dict[tuple[str, str], list] = {}
    for report in result.reports:
        runs.setdefault((report.dataset, report.model), []).append(report)
    for (dataset, model), reports in sorted(runs.items()):
        for metric, getter in (("AUROC", lambda r: r.auroc), ("AURC", lambda r: r.aurc)):
            values = {(r.prompt, r.signal): getter(r) for r in reports}
            path = fig_dir / f"{metric.lower()}__{_slug(dataset)}__{_slug(model)}.png"
            written.append(plot_metric_bars(values, metric, f"{metric}: {dataset} / {model}", path))
    return written
