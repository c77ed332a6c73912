"""Text-embedding providers and the cosine-similarity feature channels.

Two providers exist: a deterministic hashed n-gram embedder that needs no
external model, and a file-backed provider that serves precomputed vectors
keyed by exact text string.  Both return the zero vector for empty text.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .textproc import DEFAULT_TOKENIZER, tokenize

HASHED_DIM = 256


class EmbeddingError(ValueError):
    """Raised on malformed embedding files or missing lookup keys."""


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """a·b/(‖a‖‖b‖); 0.0 when either vector has zero norm."""
    if a.shape != b.shape:
        raise EmbeddingError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


class HashedEmbedder:
    """Signed feature hashing of token unigrams and bigrams, L2-normalized.

    blake2b(ngram) supplies 64 bits: the top bit picks the sign, the rest
    pick the bucket.  Deterministic across platforms and processes.
    """

    kind = "hashed_fallback"

    def __init__(self, dim: int = HASHED_DIM):
        if dim < 1:
            raise EmbeddingError(f"dim must be positive, got {dim}")
        self.dim = dim
        self.provenance = f"hashed-ngrams/blake2b/{dim}"
        self._cache: dict[str, np.ndarray] = {}

    def embed(self, text: str) -> np.ndarray:
        cached = self._cache.get(text)
        if cached is not None:
            return cached
        tokens = tokenize(text, DEFAULT_TOKENIZER)
        vec = np.zeros(self.dim, dtype=np.float64)
        grams = list(tokens)
        grams.extend(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
        for gram in grams:
            h = int.from_bytes(
                hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest(), "big"
            )
            sign = 1.0 if h >> 63 else -1.0
            vec[(h & (1 << 63) - 1) % self.dim] += sign
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        vec.setflags(write=False)
        if len(self._cache) < 200_000:
            self._cache[text] = vec
        return vec


class FileEmbedder:
    """Serves vectors from a preloaded {text: vector} table; misses are errors."""

    kind = "file"

    def __init__(self, dim: int, provenance: str, table: dict[str, np.ndarray]):
        self.dim = dim
        self.provenance = provenance
        self._table = table
        self._zero = np.zeros(dim, dtype=np.float64)
        self._zero.setflags(write=False)

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            return self._zero
        vec = self._table.get(text)
        if vec is None:
            key = text if len(text) <= 120 else text[:117] + "..."
            raise EmbeddingError(f"no embedding for text key {key!r}")
        return vec


def embed(provider, text: str) -> np.ndarray:
    return provider.embed(text)


def load_embedding_file(path) -> FileEmbedder:
    """Load the JSONL embedding artifact: a header line, then one entry per text."""
    table: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        try:
            header = json.loads(first)
        except json.JSONDecodeError as exc:
            raise EmbeddingError(f"{path}:1: invalid JSON header ({exc.msg})") from exc
        if not isinstance(header, dict) or "dim" not in header:
            raise EmbeddingError(f"{path}:1: header must carry 'dim'")
        dim = header["dim"]
        if not isinstance(dim, int) or dim < 1:
            raise EmbeddingError(f"{path}:1: 'dim' must be a positive integer")
        provenance = str(header.get("provenance", "unknown"))
        for line_no, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EmbeddingError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc
            if "text" not in obj or "vector" not in obj:
                raise EmbeddingError(f"{path}:{line_no}: entry needs 'text' and 'vector'")
            text = obj["text"]
            if text in table:
                raise EmbeddingError(f"{path}:{line_no}: duplicate text key")
            vec = np.asarray(obj["vector"], dtype=np.float64)
            if vec.shape != (dim,):
                raise EmbeddingError(
                    f"{path}:{line_no}: vector has {vec.shape[0] if vec.ndim == 1 else '?'} "
                    f"dims, header says {dim}"
                )
            if not np.all(np.isfinite(vec)):
                raise EmbeddingError(f"{path}:{line_no}: non-finite vector component")
            vec.setflags(write=False)
            table[text] = vec
    return FileEmbedder(dim, provenance, table)


def save_embedding_file(path, dim: int, provenance: str, entries) -> None:
    """Write the embedding artifact; ``entries`` yields (text, vector)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"dim": dim, "provenance": provenance}, sort_keys=True))
        fh.write("\n")
        seen = set()
        for text, vec in entries:
            if text in seen:
                raise EmbeddingError(f"duplicate text key {text!r}")
            seen.add(text)
            row = {"text": text, "vector": [float(x) for x in vec]}
            fh.write(json.dumps(row, sort_keys=True))
            fh.write("\n")


def ranked_sentence_sims(provider, query_text: str, sentences) -> list[tuple[int, float]]:
    """(sentence index, cosine) pairs sorted by similarity descending.

    Ties keep the original sentence order, so downstream consumers that need
    the sentences themselves and those that need only the values agree.
    """
    q = provider.embed(query_text)
    sims = [cosine(q, provider.embed(s)) for s in sentences]
    order = sorted(range(len(sims)), key=lambda i: (-sims[i], i))
    return [(i, sims[i]) for i in order]


def top_sentence_sims(provider, query_text: str, sentences, m: int) -> list[float]:
    """The m largest query-to-sentence cosines, descending, zero-padded."""
    if m < 1:
        raise EmbeddingError(f"m must be >= 1, got {m}")
    ranked = ranked_sentence_sims(provider, query_text, sentences)
    out = [sim for _, sim in ranked[:m]]
    out.extend(0.0 for _ in range(m - len(out)))
    return out
