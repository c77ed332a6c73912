"""Text encoders behind the embed-corpus job.

The hashed encoder is the self-sufficient default: signed feature hashing of
token unigrams and bigrams, deterministic across platforms.  A
sentence-transformers model can be plugged in from a local directory when
the package is installed; nothing is ever downloaded.
"""

from __future__ import annotations

import hashlib
import logging

import numpy as np

from .textseg import tokens

logger = logging.getLogger(__name__)

DEFAULT_DIM = 384
DEFAULT_MAX_TOKENS = 512


class EncoderError(ValueError):
    pass


class HashedEncoder:
    kind = "hashed"

    def __init__(self, dim: int = DEFAULT_DIM, max_tokens: int = DEFAULT_MAX_TOKENS):
        if dim < 1:
            raise EncoderError(f"dim must be positive, got {dim}")
        if max_tokens < 1:
            raise EncoderError(f"max_tokens must be positive, got {max_tokens}")
        self.dim = dim
        self.max_tokens = max_tokens
        self.provenance = f"hashed-ngrams/blake2b/{dim}"

    def embed(self, text: str) -> np.ndarray:
        toks = tokens(text)
        if len(toks) > self.max_tokens:
            logger.warning(
                "text with %d tokens truncated to %d: %.60r...",
                len(toks), self.max_tokens, text,
            )
            toks = toks[: self.max_tokens]
        vec = np.zeros(self.dim, dtype=np.float64)
        grams = list(toks)
        grams.extend(f"{a} {b}" for a, b in zip(toks, toks[1:]))
        for gram in grams:
            h = int.from_bytes(
                hashlib.blake2b(gram.encode("utf-8"), digest_size=8).digest(), "big"
            )
            sign = 1.0 if h >> 63 else -1.0
            vec[(h & (1 << 63) - 1) % self.dim] += sign
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


class SentenceTransformerEncoder:
    """Wraps a locally stored sentence-transformers model directory."""

    kind = "sentence-transformer"

    def __init__(self, path: str):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise EncoderError(
                "sentence-transformers is not installed; install the 'st' extra "
                "or use the hashed encoder"
            ) from exc
        try:
            self._model = SentenceTransformer(path)
        except Exception as exc:  # model libs raise a zoo of types
            raise EncoderError(f"could not load sentence-transformer model from {path!r}: {exc}")
        self.dim = int(self._model.get_sentence_embedding_dimension())
        self.provenance = f"sentence-transformer/{path}"

    def embed(self, text: str) -> np.ndarray:
        vec = np.asarray(self._model.encode([text])[0], dtype=np.float64)
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec


def make_encoder(cfg: dict):
    """Build an encoder from the job config's ``encoder`` object."""
    kind = cfg.get("kind", "hashed")
    if kind == "hashed":
        return HashedEncoder(
            dim=int(cfg.get("dim", DEFAULT_DIM)),
            max_tokens=int(cfg.get("max_tokens", DEFAULT_MAX_TOKENS)),
        )
    if kind == "sentence-transformer":
        path = cfg.get("path")
        if not path:
            raise EncoderError("sentence-transformer encoder needs a 'path'")
        return SentenceTransformerEncoder(path)
    raise EncoderError(f"unknown encoder kind {kind!r}; expected hashed or sentence-transformer")
