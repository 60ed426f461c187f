"""Command-line interface.

Subcommands:

* ``eval``   -- load run directories, compute metrics, write tables/curves/figures
* ``synth``  -- write a synthetic run directory in the record format
* ``curves`` -- write risk-coverage curve files (and figures) for one run

Exit codes: 0 success, 1 validation/integrity/IO error, 2 configuration error.
``SELPRED_OUT`` provides the default output root when ``--out`` is omitted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import ConfigurationError, IntegrityError, ParseError, SelpredError, ValidationError
from .records import write_run
from .report import (
    BootstrapConfig,
    DEFAULT_SIGNALS,
    EvalConfig,
    TemperatureConfig,
    emit_curves,
    evaluate,
    write_outputs,
)
from .synth import SynthSpec, generate_run

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_CONFIG_ERROR = 2


def _default_out() -> str:
    return os.environ.get("SELPRED_OUT", "selpred-out")


def _load_config_file(path: str) -> dict:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigurationError(f"config file {path} must hold a JSON object")
    return obj


def _build_eval_config(args) -> EvalConfig:
    """Merge the config file with flag overrides; flags win."""
    file_cfg = _load_config_file(args.config) if args.config else {}

    run_dirs = list(args.run_dir or []) or list(file_cfg.get("run_directories", []))
    if not run_dirs:
        raise ConfigurationError("no run directories: pass --run-dir or set run_directories in the config")

    if args.signals:
        signals = tuple(s.strip() for s in args.signals.split(",") if s.strip())
    else:
        signals = tuple(file_cfg.get("signals", DEFAULT_SIGNALS))

    variants = file_cfg.get("prompt_variants")
    boot_cfg = dict(file_cfg.get("bootstrap", {}))
    if args.no_bootstrap:
        boot_cfg["enabled"] = False
    temp_cfg = dict(file_cfg.get("temperature", {}))

    out_dir = args.out or file_cfg.get("output_directory") or _default_out()
    figures = file_cfg.get("figures", True)
    if args.no_figures:
        figures = False

    return EvalConfig(
        run_directories=tuple(run_dirs),
        signals=signals,
        prompt_variants=tuple(variants) if variants else None,
        coverage_targets=tuple(file_cfg.get("coverage_targets", (0.8, 0.5))),
        risk_targets=tuple(file_cfg.get("risk_targets", (0.2, 0.1))),
        bootstrap=BootstrapConfig(
            replicates=int(boot_cfg.get("replicates", 2000)),
            seed=int(boot_cfg.get("seed", 42)),
            enabled=bool(boot_cfg.get("enabled", True)),
        ),
        temperature=TemperatureConfig(
            fraction=float(temp_cfg.get("fraction", 0.2)),
            minimum=int(temp_cfg.get("minimum", 50)),
            seed=int(temp_cfg.get("seed", 42)),
        ),
        output_directory=str(out_dir),
        figures=figures,
    )


def _cmd_eval(args) -> int:
    config = _build_eval_config(args)
    result = evaluate(config)
    out_dir = write_outputs(result, config.output_directory)
    print(f"wrote evaluation outputs to {out_dir}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    spec = SynthSpec(
        n_examples=args.n,
        n_options=args.options,
        signal_quality=args.quality,
        accuracy_target=args.accuracy,
        seed=args.seed,
    )
    run = generate_run(spec)
    out = write_run(run.manifest, run.records, args.out)
    print(f"wrote synthetic run ({spec.n_examples} examples) to {out}")
    return EXIT_OK


def _cmd_curves(args) -> int:
    config = EvalConfig(
        run_directories=(args.run_dir,),
        bootstrap=BootstrapConfig(enabled=False),
        output_directory=args.out or _default_out(),
        figures=not args.no_figures,
    )
    result = evaluate(config)
    paths = emit_curves(result.curves, config.output_directory)
    if config.figures:
        from .figures import write_figures

        write_figures(result, config.output_directory)
    print(f"wrote {len(paths)} curve files to {Path(config.output_directory) / 'curves'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="selpred",
                                     description="Selective-prediction evaluation engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate run directories and emit report tables")
    p_eval.add_argument("--config", help="JSON config file; flags override its values")
    p_eval.add_argument("--run-dir", action="append", help="run directory (repeatable)")
    p_eval.add_argument("--out", help="output directory (default: $SELPRED_OUT or ./selpred-out)")
    p_eval.add_argument("--signals", help="comma-separated signal names")
    p_eval.add_argument("--no-bootstrap", action="store_true", help="skip bootstrap CIs")
    p_eval.add_argument("--no-figures", action="store_true", help="skip PNG figure rendering")
    p_eval.set_defaults(func=_cmd_eval)

    p_synth = sub.add_parser("synth", help="generate a synthetic run directory")
    p_synth.add_argument("--n", type=int, required=True, help="number of examples")
    p_synth.add_argument("--options", type=int, required=True, help="options per example (K)")
    p_synth.add_argument("--quality", type=float, required=True,
                         help="verification signal quality in [0, 1]")
    p_synth.add_argument("--accuracy", type=float, required=True,
                         help="target LL-AVG accuracy in (0, 1)")
    p_synth.add_argument("--seed", type=int, required=True)
    p_synth.add_argument("--out", required=True, help="run directory to write")
    p_synth.set_defaults(func=_cmd_synth)

    p_curves = sub.add_parser("curves", help="write risk-coverage curve files for one run")
    p_curves.add_argument("--run-dir", required=True)
    p_curves.add_argument("--out", help="output directory (default: $SELPRED_OUT or ./selpred-out)")
    p_curves.add_argument("--no-figures", action="store_true", help="skip PNG figure rendering")
    p_curves.set_defaults(func=_cmd_curves)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (ParseError, ValidationError, IntegrityError, SelpredError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
