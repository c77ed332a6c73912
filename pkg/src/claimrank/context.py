"""Context provider contracts: co-reference files, global score triples, and
the evidence-graph export for an external multi-hop scorer.

Everything here is file-backed and model-free.  A missing co-reference file
degrades to the identity resolver; a missing score triple degrades to zeros,
so every pipeline configuration runs without external models.
"""

from __future__ import annotations

import json

from .embed import ranked_sentence_sims
from .textproc import split_sentences

SIDES = ("source", "target")
TARGET_UNITS = ("ver_claim", "body")
GLOBAL_SUM_TOL = 1e-6
XH_TOP_SENTENCES = 3


class ProviderError(ValueError):
    """Raised on malformed provider files."""


class CorefResolutionSet:
    """Resolved-text lookup for one side; identity passthrough for absent keys."""

    def __init__(self, side: str, entries: dict | None = None):
        if side not in SIDES:
            raise ProviderError(f"side must be one of {SIDES}, got {side!r}")
        self.side = side
        self.entries: dict[tuple[str, object], str] = dict(entries or {})

    def resolve(self, doc_id: str, unit, raw_text: str) -> str:
        return self.entries.get((doc_id, unit), raw_text)

    def __len__(self) -> int:
        return len(self.entries)


def identity_coref(side: str) -> CorefResolutionSet:
    return CorefResolutionSet(side)


def load_coref_file(path, side: str) -> CorefResolutionSet:
    """Load coref.jsonl, keeping only entries for ``side``.

    Source units are line numbers; target units name the claim part.
    """
    entries: dict[tuple[str, object], str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProviderError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc
            for key in ("side", "doc_id", "unit", "resolved_text"):
                if key not in obj:
                    raise ProviderError(f"{path}:{line_no}: missing field {key!r}")
            if obj["side"] not in SIDES:
                raise ProviderError(f"{path}:{line_no}: bad side {obj['side']!r}")
            if obj["side"] != side:
                continue
            unit = obj["unit"]
            if side == "source":
                if isinstance(unit, bool) or not isinstance(unit, int):
                    raise ProviderError(f"{path}:{line_no}: source unit must be a line number")
            else:
                if unit not in TARGET_UNITS:
                    raise ProviderError(
                        f"{path}:{line_no}: target unit must be one of {TARGET_UNITS}"
                    )
            if not isinstance(obj["resolved_text"], str):
                raise ProviderError(f"{path}:{line_no}: resolved_text must be a string")
            key = (obj["doc_id"], unit)
            if key in entries:
                raise ProviderError(f"{path}:{line_no}: duplicate key {key!r}")
            entries[key] = obj["resolved_text"]
    return CorefResolutionSet(side, entries)


class GlobalScoreSet:
    """(query_id, ver_claim_id) → (p_support, p_refute, p_nei) lookup."""

    def __init__(self, entries: dict | None = None):
        self.entries: dict[tuple[str, str], tuple[float, float, float]] = dict(entries or {})

    def lookup(self, query_id: str, cand_id: str) -> tuple[tuple[float, float, float], bool]:
        triple = self.entries.get((query_id, cand_id))
        if triple is None:
            return (0.0, 0.0, 0.0), False
        return triple, True

    def __len__(self) -> int:
        return len(self.entries)


def empty_global_scores() -> GlobalScoreSet:
    return GlobalScoreSet()


def _check_triple(p_s, p_r, p_n, where):
    triple = (p_s, p_r, p_n)
    for v in triple:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ProviderError(f"{where}: probabilities must be numbers")
        if not 0.0 <= v <= 1.0:
            raise ProviderError(f"{where}: probability {v} out of [0,1]")
    total = p_s + p_r + p_n
    if abs(total - 1.0) > GLOBAL_SUM_TOL:
        raise ProviderError(f"{where}: triple sums to {total}, expected 1 ± {GLOBAL_SUM_TOL}")
    return (float(p_s), float(p_r), float(p_n))


def load_global_scores(path) -> GlobalScoreSet:
    entries: dict[tuple[str, str], tuple[float, float, float]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProviderError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc
            for key in ("query_id", "ver_claim_id", "p_support", "p_refute", "p_nei"):
                if key not in obj:
                    raise ProviderError(f"{path}:{line_no}: missing field {key!r}")
            triple = _check_triple(
                obj["p_support"], obj["p_refute"], obj["p_nei"], f"{path}:{line_no}"
            )
            key = (obj["query_id"], obj["ver_claim_id"])
            if key in entries:
                raise ProviderError(f"{path}:{line_no}: duplicate (query, claim) key {key!r}")
            entries[key] = triple
    return GlobalScoreSet(entries)


def save_global_scores(path, score_set: GlobalScoreSet) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for (qid, cid), (p_s, p_r, p_n) in sorted(score_set.entries.items()):
            row = {
                "query_id": qid,
                "ver_claim_id": cid,
                "p_support": p_s,
                "p_refute": p_r,
                "p_nei": p_n,
            }
            fh.write(json.dumps(row, sort_keys=True))
            fh.write("\n")


def lookup_global(score_set: GlobalScoreSet, query_id: str, cand_id: str):
    return score_set.lookup(query_id, cand_id)


def xh_graph_record(query_id, query_text, claim, provider, target_coref=None) -> dict:
    """One evidence-graph record: claim node, title node, top-3 body sentences.

    Empty node texts are dropped; the remaining node order is fixed.
    """
    coref = target_coref or identity_coref("target")
    ver_claim = coref.resolve(claim.id, "ver_claim", claim.ver_claim)
    body = coref.resolve(claim.id, "body", claim.body)
    nodes = [ver_claim, claim.title]
    sentences = split_sentences(body)
    ranked = ranked_sentence_sims(provider, query_text, sentences)
    nodes.extend(sentences[i] for i, _ in ranked[:XH_TOP_SENTENCES])
    nodes = [n for n in nodes if n.strip()]
    return {
        "query_id": query_id,
        "ver_claim_id": claim.id,
        "query": query_text,
        "nodes": nodes,
    }


def export_xh_graphs(queries, candidates_by_query, claims_by_id, provider, path,
                     target_coref=None) -> int:
    """Write one JSONL record per (query, candidate); returns the record count.

    ``queries`` yields (query_id, query_text); ``candidates_by_query`` maps
    query_id to its ordered candidate id list.
    """
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for query_id, query_text in queries:
            for cand_id in candidates_by_query.get(query_id, ()):
                record = xh_graph_record(
                    query_id, query_text, claims_by_id[cand_id], provider, target_coref
                )
                fh.write(json.dumps(record, sort_keys=True))
                fh.write("\n")
                n += 1
    return n


def load_xh_graphs(path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProviderError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc
            for key in ("query_id", "ver_claim_id", "query", "nodes"):
                if key not in obj:
                    raise ProviderError(f"{path}:{line_no}: missing field {key!r}")
            if not isinstance(obj["nodes"], list) or len(obj["nodes"]) > 5:
                raise ProviderError(f"{path}:{line_no}: nodes must be a list of ≤ 5 texts")
            records.append(obj)
    return records
