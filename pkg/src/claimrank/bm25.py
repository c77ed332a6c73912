"""Inverted index over verified claims and BM25 candidate retrieval.

Four fields are indexed per claim: the normalized claim text, the article
title, the article body, and their space-joined concatenation.  Retrieval
ranks on the combined field by default; the other fields feed the per-field
similarity channels downstream.

The persisted form is a single binary file: an 8-byte magic, a u32 header
length, a JSON header (params, tokenizer config + hash, doc ids, per-field
document lengths and vocabularies), then for each field and vocabulary term
a u32 postings count followed by (u32 doc index, u32 term frequency) pairs.
All integers little-endian.  See docs/index-format.md.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .textproc import TokenizerConfig, tokenize

MAGIC = b"CRIDX001"
FIELDS = ("ver_claim", "title", "body", "combined")
DEFAULT_TOP_K = 100


class IndexError_(ValueError):
    """Raised on malformed index files or contract violations."""


@dataclass(frozen=True)
class BM25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self):
        if self.k1 <= 0:
            raise IndexError_(f"k1 must be positive, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise IndexError_(f"b must be in [0,1], got {self.b}")


@dataclass
class _FieldIndex:
    # term -> (doc index array, tf array), both sorted by doc index
    postings: dict[str, tuple[np.ndarray, np.ndarray]]
    doc_lens: np.ndarray
    avg_len: float


@dataclass
class InvertedIndex:
    params: BM25Params
    tokenizer: TokenizerConfig
    doc_ids: tuple[str, ...]
    fields: dict[str, _FieldIndex] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        self._id_to_idx = {d: i for i, d in enumerate(self.doc_ids)}

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def doc_index(self, doc_id: str) -> int:
        try:
            return self._id_to_idx[doc_id]
        except KeyError:
            raise IndexError_(f"unknown doc id {doc_id!r}") from None

    def field_index(self, name: str) -> _FieldIndex:
        try:
            return self.fields[name]
        except KeyError:
            raise IndexError_(f"unknown field {name!r}; expected one of {FIELDS}") from None


def combined_text(ver_claim: str, title: str, body: str) -> str:
    return f"{ver_claim} {title} {body}"


def _field_texts(claim) -> dict[str, str]:
    return {
        "ver_claim": claim.ver_claim,
        "title": claim.title,
        "body": claim.body,
        "combined": combined_text(claim.ver_claim, claim.title, claim.body),
    }


def build_index(claims, tokenizer: TokenizerConfig, params: BM25Params | None = None) -> InvertedIndex:
    params = params or BM25Params()
    doc_ids = []
    seen = set()
    for c in claims:
        if c.id in seen:
            raise IndexError_(f"duplicate claim id {c.id!r}")
        seen.add(c.id)
        doc_ids.append(c.id)

    raw: dict[str, dict[str, list[list[int]]]] = {f: {} for f in FIELDS}
    lens: dict[str, list[int]] = {f: [] for f in FIELDS}
    for di, claim in enumerate(claims):
        for fname, text in _field_texts(claim).items():
            tokens = tokenize(text, tokenizer)
            lens[fname].append(len(tokens))
            counts: dict[str, int] = {}
            for t in tokens:
                counts[t] = counts.get(t, 0) + 1
            post = raw[fname]
            for term, tf in counts.items():
                post.setdefault(term, []).append([di, tf])

    fields = {}
    for fname in FIELDS:
        postings = {
            term: (
                np.asarray([p[0] for p in plist], dtype=np.uint32),
                np.asarray([p[1] for p in plist], dtype=np.uint32),
            )
            for term, plist in raw[fname].items()
        }
        dl = np.asarray(lens[fname], dtype=np.float64)
        avg = float(dl.mean()) if dl.size else 0.0
        fields[fname] = _FieldIndex(postings, dl, avg)
    return InvertedIndex(params, tokenizer, tuple(doc_ids), fields)


def _idf(n_docs: int, df: int) -> float:
    # +1 smoothing keeps every IDF strictly positive
    return math.log((n_docs - df + 0.5) / (df + 0.5) + 1.0)


def _length_norm(fi: _FieldIndex, params: BM25Params) -> np.ndarray:
    if fi.avg_len > 0:
        rel = fi.doc_lens / fi.avg_len
    else:
        rel = np.zeros_like(fi.doc_lens)
    return params.k1 * (1.0 - params.b + params.b * rel)


def bm25_score(index: InvertedIndex, field_name: str, query_tokens, doc_id: str) -> float:
    """Score one document on one field; sums over query tokens with multiplicity."""
    fi = index.field_index(field_name)
    di = index.doc_index(doc_id)
    params = index.params
    norm = None
    score = 0.0
    for tok in query_tokens:
        entry = fi.postings.get(tok)
        if entry is None:
            continue
        docs, tfs = entry
        pos = int(np.searchsorted(docs, di))
        if pos >= docs.size or docs[pos] != di:
            continue
        tf = float(tfs[pos])
        if norm is None:
            norm = _length_norm(fi, params)
        score += _idf(index.n_docs, docs.size) * tf * (params.k1 + 1.0) / (tf + norm[di])
    return score


def score_all(index: InvertedIndex, field_name: str, query_tokens) -> np.ndarray:
    """BM25 of every document on one field, as a dense vector."""
    fi = index.field_index(field_name)
    params = index.params
    scores = np.zeros(index.n_docs, dtype=np.float64)
    if not index.n_docs:
        return scores
    norm = _length_norm(fi, params)
    for tok in query_tokens:
        entry = fi.postings.get(tok)
        if entry is None:
            continue
        docs, tfs = entry
        idf = _idf(index.n_docs, docs.size)
        tf = tfs.astype(np.float64)
        scores[docs] += idf * tf * (params.k1 + 1.0) / (tf + norm[docs])
    return scores


def retrieve_topk(
    index: InvertedIndex,
    query_text: str,
    k: int = DEFAULT_TOP_K,
    field_name: str = "combined",
) -> list[tuple[str, float]]:
    """Top-k candidates by field BM25, descending; ties by ascending doc id.

    Only strictly positive scores are returned, so an empty or fully
    out-of-vocabulary query yields an empty list.
    """
    if k < 1:
        raise IndexError_(f"k must be >= 1, got {k}")
    tokens = tokenize(query_text, index.tokenizer)
    scores = score_all(index, field_name, tokens)
    hits = [(index.doc_ids[i], float(scores[i])) for i in np.nonzero(scores > 0.0)[0]]
    hits.sort(key=lambda h: (-h[1], h[0]))
    return hits[:k]


# ---------------------------------------------------------------------------
# persistence


def save_index(index: InvertedIndex, path) -> None:
    header = {
        "version": 1,
        "params": {"k1": index.params.k1, "b": index.params.b},
        "tokenizer": index.tokenizer.to_dict(),
        "tokenizer_hash": index.tokenizer.config_hash(),
        "idf": "ln((N-df+0.5)/(df+0.5)+1)",
        "doc_ids": list(index.doc_ids),
        "fields": {
            fname: {
                "doc_lens": [int(x) for x in fi.doc_lens],
                "vocab": sorted(fi.postings),
            }
            for fname, fi in index.fields.items()
        },
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for fname in FIELDS:
            fi = index.fields[fname]
            for term in sorted(fi.postings):
                docs, tfs = fi.postings[term]
                fh.write(struct.pack("<I", docs.size))
                pairs = np.empty(docs.size * 2, dtype="<u4")
                pairs[0::2] = docs
                pairs[1::2] = tfs
                fh.write(pairs.tobytes())


def load_index(path) -> InvertedIndex:
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise IndexError_(f"{path}: not an index file (bad magic {magic!r})")
        raw = fh.read(4)
        if len(raw) != 4:
            raise IndexError_(f"{path}: truncated header")
        (hlen,) = struct.unpack("<I", raw)
        header = json.loads(fh.read(hlen).decode("utf-8"))
        if header.get("version") != 1:
            raise IndexError_(f"{path}: unsupported index version {header.get('version')!r}")
        params = BM25Params(**header["params"])
        tokenizer = TokenizerConfig.from_dict(header["tokenizer"])
        if tokenizer.config_hash() != header["tokenizer_hash"]:
            raise IndexError_(f"{path}: tokenizer hash mismatch")
        doc_ids = tuple(header["doc_ids"])
        fields = {}
        for fname in FIELDS:
            meta = header["fields"][fname]
            postings = {}
            for term in meta["vocab"]:
                raw = fh.read(4)
                if len(raw) != 4:
                    raise IndexError_(f"{path}: truncated postings for {term!r}")
                (n,) = struct.unpack("<I", raw)
                raw = fh.read(8 * n)
                if len(raw) != 8 * n:
                    raise IndexError_(f"{path}: truncated postings for {term!r}")
                buf = np.frombuffer(raw, dtype="<u4")
                postings[term] = (
                    buf[0::2].astype(np.uint32),
                    buf[1::2].astype(np.uint32),
                )
            dl = np.asarray(meta["doc_lens"], dtype=np.float64)
            avg = float(dl.mean()) if dl.size else 0.0
            fields[fname] = _FieldIndex(postings, dl, avg)
        trailing = fh.read(1)
        if trailing:
            raise IndexError_(f"{path}: trailing bytes after postings")
    return InvertedIndex(params, tokenizer, doc_ids, fields)
