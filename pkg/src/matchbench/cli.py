"""Command-line entry point.

One verb per pipeline stage plus `all`. Configuration comes from an
optional JSON file; --seed and --out override the config's global seed
and output directory. Failures exit nonzero with a single JSON object on
stderr so wrapping tools can parse the error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .csvio import ParseError
from .generator import ConfigError
from .pipeline import (
    STAGE_ORDER,
    MissingPrerequisiteError,
    PipelineConfig,
    StaleArtifactError,
    run_all,
    run_stage,
)

DEFAULT_OUT = "matchbench-out"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchbench",
        description=(
            "Confounding-aware test-set design and evaluation: generate or ingest a "
            "dataset, filter, audit, build designed/random/matched splits, train the "
            "two reference classifiers, and compare AUCs across split variants."
        ),
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in STAGE_ORDER + ("all",):
        p = sub.add_parser(verb, help=f"run the {verb} stage" if verb != "all" else "run every stage in order")
        p.add_argument("--config", type=Path, default=None, help="pipeline config JSON")
        p.add_argument("--seed", type=int, default=None, help="global seed (overrides config)")
        p.add_argument("--out", type=Path, default=None, help="output directory (overrides config)")
        p.add_argument("--tune", action="store_true", help="cross-validate the regularization strength")
        p.add_argument("--input", type=Path, default=None, help="ingest this CSV instead of generating")
    return parser


def _load_config(args) -> PipelineConfig:
    if args.config is not None:
        cfg = PipelineConfig.from_dict(json.loads(Path(args.config).read_text()))
    else:
        cfg = PipelineConfig(out_dir=DEFAULT_OUT)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out_dir=str(args.out))
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.tune:
        cfg = dataclasses.replace(cfg, tune=True)
    if args.input is not None:
        cfg = dataclasses.replace(cfg, input_path=str(args.input), generator=None)
    return cfg


def _emit_error(exc: Exception) -> None:
    payload = {
        "error": type(exc).__name__,
        "message": str(exc),
    }
    if isinstance(exc, ConfigError):
        payload["details"] = exc.errors
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.verb == "all":
            results = run_all(cfg)
        else:
            results = [run_stage(args.verb, cfg)]
        for res in results:
            status = "skipped (up to date)" if res.skipped else res.message
            print(f"stage {res.stage}: {status}")
        return 0
    except (
        ConfigError,
        ParseError,
        MissingPrerequisiteError,
        StaleArtifactError,
        ValueError,
        OSError,
    ) as exc:
        _emit_error(exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
