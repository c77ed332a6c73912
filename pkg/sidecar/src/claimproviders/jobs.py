"""Job configs and the writers that produce the provider files.

A job is one JSON object: its ``kind`` selects the operation, the rest
names inputs, the model, and the output path.  Output formats match the
consuming engine's loaders exactly (JSONL, sorted keys, one record per
line; embedding files carry a dim/provenance header line).
"""

from __future__ import annotations

import json
import logging
import os

from . import corefjob, extract, stance
from .encoders import make_encoder

logger = logging.getLogger(__name__)

KINDS = ("embed", "coref-source", "coref-target", "xh-score")


class JobError(ValueError):
    pass


def load_job(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            job = json.load(fh)
    except json.JSONDecodeError as exc:
        raise JobError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(job, dict):
        raise JobError(f"{path}: job config must be a JSON object")
    kind = job.get("kind")
    if kind not in KINDS:
        raise JobError(f"{path}: kind must be one of {KINDS}, got {kind!r}")
    if not job.get("output"):
        raise JobError(f"{path}: job needs an 'output' path")

    required = {
        "embed": (),
        "coref-source": ("transcripts",),
        "coref-target": ("claims",),
        "xh-score": ("graphs",),
    }[kind]
    for key in required:
        if not job.get(key):
            raise JobError(f"{path}: {kind} job needs {key!r}")
    if kind == "embed" and not any(
        job.get(k) for k in ("claims", "transcripts", "texts")
    ):
        raise JobError(f"{path}: embed job needs at least one of claims/transcripts/texts")
    return job


def _write_lines(path, objs) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def write_embedding_file(path, dim: int, provenance: str, entries) -> int:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"dim": dim, "provenance": provenance}, sort_keys=True))
        fh.write("\n")
        n = 0
        for text, vec in entries:
            fh.write(json.dumps({"text": text, "vector": [float(x) for x in vec]},
                               sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def run_embed(job: dict) -> int:
    encoder = make_encoder(job.get("encoder", {}))
    texts = extract.collect_texts(
        claims_path=job.get("claims"),
        transcripts_path=job.get("transcripts"),
        pairs_path=job.get("pairs"),
        source_coref_path=job.get("source_coref"),
        target_coref_path=job.get("target_coref"),
        texts_path=job.get("texts"),
    )
    logger.info("embedding %d unique texts with %s", len(texts), encoder.provenance)
    entries = ((t, encoder.embed(t)) for t in texts)
    return write_embedding_file(job["output"], encoder.dim, encoder.provenance, entries)


def run_coref(job: dict) -> int:
    resolver = corefjob.make_resolver(job.get("resolver", {}))
    if job["kind"] == "coref-source":
        records = corefjob.source_records(job["transcripts"], resolver)
    else:
        records = corefjob.target_records(job["claims"], resolver)
    return _write_lines(job["output"], records)


def run_xh_score(job: dict) -> int:
    model = stance.load_stance_model(job.get("model"))
    records = stance.load_graphs(job["graphs"])
    logger.info("scoring %d graphs with %s", len(records), model["provenance"])
    return _write_lines(job["output"], stance.score_graphs(model, records))


def run_job(job: dict) -> int:
    """Dispatch one validated job; returns the entry count written."""
    out_dir = os.path.dirname(os.path.abspath(job["output"]))
    os.makedirs(out_dir, exist_ok=True)
    if job["kind"] == "embed":
        return run_embed(job)
    if job["kind"] in ("coref-source", "coref-target"):
        return run_coref(job)
    return run_xh_score(job)
