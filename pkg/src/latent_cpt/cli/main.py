"""Command-line entry point.

    latent-cpt <stage> --config config.json [--out DIR] [--seed N] [--svg]

Exit codes: 0 success, 1 stage failure (error JSON on stderr), 2 config
error. --seed overrides the stage's primary seed; --out overrides the output
directory.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from ..errors import ConfigError, LatentCptError
from .config import PipelineConfig, load_config
from .stages import STAGE_FUNCS, STAGES


def _apply_overrides(cfg: PipelineConfig, stage: str, out: str | None,
                     seed: int | None) -> PipelineConfig:
    if out is not None:
        cfg = dataclasses.replace(cfg, out_dir=Path(out))
    if seed is None:
        return cfg
    if stage == "synth":
        return dataclasses.replace(cfg, synth_seed=seed)
    if stage in ("prepare", "encode", "reconstruct-report"):
        return dataclasses.replace(cfg, split_seed=seed)
    if stage == "train-ae":
        ae = {ch: dataclasses.replace(cfg.ae_config(ch), seed=seed)
              for ch in ("ic", "qc1ncs")}
        return dataclasses.replace(cfg, ae_configs=ae)
    if stage in ("train-clf", "evaluate"):
        return dataclasses.replace(
            cfg, gbdt_config=dataclasses.replace(cfg.gbdt_config, seed=seed)
        )
    if stage == "explain":
        return dataclasses.replace(
            cfg, explain=dataclasses.replace(cfg.explain, background_seed=seed)
        )
    if stage == "probe":
        return dataclasses.replace(cfg, probe=dataclasses.replace(cfg.probe, seed=seed))
    return cfg


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latent-cpt",
        description="Latent-feature CPT pipeline: synthesis, autoencoding, "
                    "boosted-tree prediction, and Shapley explanations.",
    )
    parser.add_argument("stage", choices=STAGES, help="pipeline stage to run")
    parser.add_argument("--config", required=True, help="path to the JSON config file")
    parser.add_argument("--out", default=None, help="override the output directory")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the stage's primary seed")
    parser.add_argument("--svg", action="store_true",
                        help="also render static SVG plots (explain/probe)")
    return parser


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = _apply_overrides(cfg, args.stage, args.out, args.seed)
    except ConfigError as exc:
        json.dump({"error": type(exc).__name__, "stage": args.stage,
                   "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2

    func = STAGE_FUNCS[args.stage]
    try:
        if args.stage in ("explain", "probe"):
            outputs = func(cfg, svg=args.svg)
        else:
            outputs = func(cfg)
    except (LatentCptError, OSError) as exc:
        doc = {"error": type(exc).__name__, "stage": args.stage, "message": str(exc)}
        json.dump(doc, sys.stderr)
        sys.stderr.write("\n")
        return 1
    for path in outputs:
        print(path)
    return 0


def entrypoint() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    entrypoint()
