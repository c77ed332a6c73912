"""Command-line entry point: config-driven stages plus the ablation matrix.

Exit codes: 0 success, 1 user error (bad config/data, missing artifacts),
2 internal error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
import traceback

from . import pipeline

STAGES = (
    "index",
    "split",
    "retrieve",
    "featurize",
    "train",
    "rerank",
    "evaluate",
    "export-xh-graphs",
    "run-matrix",
)

# stages that never touch embeddings can skip loading a file provider
_NEEDS_PROVIDER = {"featurize", "train", "rerank", "export-xh-graphs"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claimrank",
        description="Retrieve, rerank and evaluate previously fact-checked claims.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGES:
        p = sub.add_parser(name, help=f"run the {name.replace('-', ' ')} stage")
        p.add_argument("--config", required=True, help="experiment config JSON")
        p.add_argument("--seed", type=int, default=None,
                       help="override the split and ranker seeds")
        p.add_argument("--out", default=None, help="override the output directory")
        if name == "featurize":
            p.add_argument("--subset", choices=("train", "test"), required=True)
    return parser


def _load_config(args) -> pipeline.ExperimentConfig:
    config = pipeline.load_config(args.config)
    if args.out is not None:
        config = dataclasses.replace(config, out_dir=args.out)
    if args.seed is not None:
        config = dataclasses.replace(
            config,
            split=dataclasses.replace(config.split, seed=args.seed),
            train_config=dataclasses.replace(config.train_config, seed=args.seed),
        )
    return config


def _run(args) -> int:
    config = _load_config(args)
    if args.command == "run-matrix":
        json_path, txt_path = pipeline.run_matrix(config)
        with open(txt_path, encoding="utf-8") as fh:
            sys.stdout.write(fh.read())
        print(f"wrote {json_path}")
        return 0
    exp = pipeline.open_experiment(config, need_provider=args.command in _NEEDS_PROVIDER)
    if args.command == "index":
        print(f"wrote {pipeline.stage_index(exp)}")
    elif args.command == "split":
        print(f"wrote {pipeline.stage_split(exp)}")
    elif args.command == "retrieve":
        print(f"wrote {pipeline.stage_retrieve(exp)}")
    elif args.command == "featurize":
        print(f"wrote {pipeline.stage_featurize(exp, args.subset)}")
    elif args.command == "train":
        print(f"wrote {pipeline.stage_train(exp)}")
    elif args.command == "rerank":
        print(f"wrote {pipeline.stage_rerank(exp)}")
    elif args.command == "evaluate":
        json_path, report = pipeline.stage_evaluate(exp)
        sys.stdout.write(pipeline.evaluation.format_table([(config.run_tag, report)]))
        print(f"wrote {json_path}")
    elif args.command == "export-xh-graphs":
        print(f"wrote {pipeline.stage_export_xh_graphs(exp)}")
    else:  # pragma: no cover - argparse restricts choices
        raise AssertionError(args.command)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _run(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
