"""Selective-prediction evaluation engine.

Computes multiple-choice confidence signals (LL-AVG, LL-SUM, Self-Verify,
margin, entropy, temperature-scaled LL-AVG) from per-example score records
and derives the full metric suite: AUROC, risk-coverage curves, AURC,
operating points, Brier, ECE-10, and bootstrap AUROC-delta intervals.
"""

from .calibration import (
    BootstrapResult,
    CalibrationSplit,
    TemperatureFit,
    bootstrap_delta_auroc,
    fit_temperature,
    percentile,
    split_calibration,
)
from .errors import (
    ConfigurationError,
    DegenerateInputError,
    IntegrityError,
    ParseError,
    SelpredError,
    StatisticsError,
    ValidationError,
)
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
from .records import (
    ExampleRecord,
    OptionScore,
    RunManifest,
    ValidatedRun,
    VerifyLogits,
    load_run,
    parse_record_line,
    serialize_record,
    shuffled_order,
    write_run,
)
from .report import (
    DeltaRow,
    EvalConfig,
    EvalResult,
    emit_calibration_table,
    emit_curves,
    emit_main_table,
    emit_operating_points,
    evaluate,
    write_outputs,
)
from .signals import (
    ALL_SIGNALS,
    SignalFrame,
    build_signal_frames,
    entropy_confidence,
    ll_avg_signal,
    ll_sum_signal,
    margin_signal,
    self_verify_confidence,
    softmax,
)
from .synth import SynthSpec, aurc_bruteforce, auroc_bruteforce, generate_run

__version__ = "0.1.0"
