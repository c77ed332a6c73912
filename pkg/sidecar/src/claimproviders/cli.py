"""Command-line entry point: one executable, one subcommand per job kind."""

from __future__ import annotations

import argparse
import logging
import sys
import traceback

from . import jobs

_SUBCOMMANDS = {
    "embed-corpus": ("embed",),
    "resolve-coref": ("coref-source", "coref-target"),
    "xh-score": ("xh-score",),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claimproviders",
        description="generate embedding, coreference, and stance provider files",
    )
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name, help=f"run {name} jobs")
        p.add_argument("--config", required=True, help="job config JSON")
        p.add_argument("--out", default=None, help="override the output path")
    return parser


def _run(args) -> int:
    job = jobs.load_job(args.config)
    allowed = _SUBCOMMANDS[args.command]
    if job["kind"] not in allowed:
        raise jobs.JobError(
            f"{args.config}: job kind {job['kind']!r} does not belong to "
            f"`claimproviders {args.command}` (expected {' or '.join(allowed)})"
        )
    if args.out is not None:
        job = dict(job, output=args.out)
    n = jobs.run_job(job)
    print(f"wrote {n} entries -> {job['output']}")
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
