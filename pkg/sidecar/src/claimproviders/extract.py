"""Collects every text a downstream feature extractor will want embedded.

Given the corpus files (and optionally the coreference files that will ride
along), this produces the deduplicated text list for embed-corpus: claim
texts and titles, body sentences, transcript lines, and — when a pairs file
is supplied — the joined multi-line query texts.  Raw and coref-resolved
variants are both included so the same embedding file serves configurations
with and without coreference.
"""

from __future__ import annotations

import json

from .textseg import split_sentences


class InputError(ValueError):
    pass


def _read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield line_no, json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc


def _require(obj, keys, path, line_no):
    for key in keys:
        if key not in obj:
            raise InputError(f"{path}:{line_no}: missing field {key!r}")


def load_coref_overrides(path, side):
    """(doc_id, unit) → resolved_text for one side's coref file."""
    overrides = {}
    for line_no, obj in _read_jsonl(path):
        _require(obj, ("side", "doc_id", "unit", "resolved_text"), path, line_no)
        if obj["side"] != side:
            continue
        overrides[(obj["doc_id"], obj["unit"])] = obj["resolved_text"]
    return overrides


def collect_texts(claims_path=None, transcripts_path=None, pairs_path=None,
                  source_coref_path=None, target_coref_path=None,
                  texts_path=None) -> list[str]:
    """Deduplicated, insertion-ordered text list across all given inputs."""
    src = load_coref_overrides(source_coref_path, "source") if source_coref_path else {}
    tgt = load_coref_overrides(target_coref_path, "target") if target_coref_path else {}

    out: dict[str, None] = {}

    def add(text):
        if text:
            out.setdefault(text)

    if claims_path:
        for line_no, obj in _read_jsonl(claims_path):
            _require(obj, ("id", "ver_claim", "title", "body"), claims_path, line_no)
            cid = obj["id"]
            add(obj["ver_claim"])
            add(tgt.get((cid, "ver_claim"), obj["ver_claim"]))
            add(obj["title"])
            # raw first, then the resolved variant (identical when no coref)
            for body in (obj["body"], tgt.get((cid, "body"), obj["body"])):
                for sentence in split_sentences(body):
                    add(sentence)

    raw_lines: dict[tuple[str, int], str] = {}
    resolved_lines: dict[tuple[str, int], str] = {}
    if transcripts_path:
        for line_no, obj in _read_jsonl(transcripts_path):
            _require(obj, ("debate_id", "line_no", "text"), transcripts_path, line_no)
            key = (obj["debate_id"], obj["line_no"])
            raw_lines[key] = obj["text"]
            resolved_lines[key] = src.get(key, obj["text"])
            add(raw_lines[key])
            add(resolved_lines[key])

    if pairs_path:
        if not transcripts_path:
            raise InputError("pairs input needs the transcripts file for line texts")
        for line_no, obj in _read_jsonl(pairs_path):
            _require(obj, ("debate_id", "line_nos"), pairs_path, line_no)
            debate = obj["debate_id"]
            for table in (raw_lines, resolved_lines):
                parts = []
                for ln in sorted(obj["line_nos"]):
                    if (debate, ln) not in table:
                        raise InputError(
                            f"{pairs_path}:{line_no}: line {ln} of debate {debate!r} "
                            "not present in the transcripts file"
                        )
                    parts.append(table[(debate, ln)])
                add(" ".join(parts))

    if texts_path:
        with open(texts_path, encoding="utf-8") as fh:
            for raw in fh:
                add(raw.rstrip("\n"))

    return list(out)
