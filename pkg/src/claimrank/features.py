"""Per-(query, candidate) feature vectors.

The base vector interleaves two halves: similarity channels (four BM25
fields, then claim/title embedding cosines, then the top-m body-sentence
cosines) and the reciprocal ranks of the candidate within its pool on each
of those channels.  With the default top_m = 3 that is 9 + 9 = 18 dims.
Local context concatenates the scaled base vectors of neighboring transcript
sentences against the same candidate; global score triples are appended
unscaled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bm25
from .embed import cosine, top_sentence_sims
from .textproc import tokenize


class FeatureError(ValueError):
    """Raised on dimension/config mismatches in feature assembly."""


@dataclass(frozen=True)
class FeatureConfig:
    top_m_sentences: int = 3
    fc_k: int = 0
    fc_l: int = 0
    use_global: bool = False

    def __post_init__(self):
        if self.top_m_sentences < 1:
            raise FeatureError(f"top_m_sentences must be >= 1, got {self.top_m_sentences}")
        if self.fc_k < 0 or self.fc_l < 0:
            raise FeatureError(f"fc window must be non-negative, got ({self.fc_k},{self.fc_l})")

    @property
    def n_sim_channels(self) -> int:
        return 4 + 2 + self.top_m_sentences

    @property
    def n_base(self) -> int:
        return 2 * self.n_sim_channels

    @property
    def dim(self) -> int:
        return self.n_base * (self.fc_k + self.fc_l + 1) + (3 if self.use_global else 0)

    def to_dict(self) -> dict:
        return {
            "top_m_sentences": self.top_m_sentences,
            "fc_k": self.fc_k,
            "fc_l": self.fc_l,
            "use_global": self.use_global,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(**d)


@dataclass(frozen=True)
class CandidateView:
    """A verified claim's texts as the feature extractor sees them (post-coref)."""

    id: str
    ver_claim: str
    title: str
    body: str
    body_sentences: tuple[str, ...]


def base_similarities(query_text, candidate: CandidateView, index, provider,
                      top_m: int = 3, query_tokens=None) -> np.ndarray:
    """The similarity half of the base vector for one candidate."""
    if query_tokens is None:
        query_tokens = tokenize(query_text, index.tokenizer)
    q_emb = provider.embed(query_text)
    out = np.empty(4 + 2 + top_m, dtype=np.float64)
    for i, field in enumerate(bm25.FIELDS):
        out[i] = bm25.bm25_score(index, field, query_tokens, candidate.id)
    out[4] = cosine(q_emb, provider.embed(candidate.ver_claim))
    out[5] = cosine(q_emb, provider.embed(candidate.title))
    out[6 : 6 + top_m] = top_sentence_sims(
        provider, query_text, candidate.body_sentences, top_m
    )
    return out


def similarity_matrix(query_text, candidates, index, provider, top_m: int = 3) -> np.ndarray:
    """Stacked base_similarities for one query over its candidate pool."""
    query_tokens = tokenize(query_text, index.tokenizer)
    rows = [
        base_similarities(query_text, c, index, provider, top_m, query_tokens)
        for c in candidates
    ]
    return np.vstack(rows) if rows else np.empty((0, 4 + 2 + top_m), dtype=np.float64)


def reciprocal_ranks(sims: np.ndarray, cand_ids) -> np.ndarray:
    """Per-channel reciprocal ranks over one pool.

    Each channel ranks candidates by similarity descending; ties break by
    ascending candidate id, so every candidate gets a distinct rank.
    """
    n, channels = sims.shape
    if n == 0:
        raise FeatureError("reciprocal_ranks needs a non-empty pool")
    rr = np.empty_like(sims)
    for c in range(channels):
        order = sorted(range(n), key=lambda i: (-sims[i, c], cand_ids[i]))
        for rank, i in enumerate(order, start=1):
            rr[i, c] = 1.0 / rank
    return rr


def base_vectors(sims: np.ndarray, cand_ids) -> np.ndarray:
    """Similarity channels ⧺ reciprocal-rank channels, one row per candidate."""
    return np.hstack([sims, reciprocal_ranks(sims, cand_ids)])


@dataclass(frozen=True)
class ScalerParams:
    mins: np.ndarray
    maxs: np.ndarray

    def to_dict(self) -> dict:
        return {"mins": [float(x) for x in self.mins], "maxs": [float(x) for x in self.maxs]}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerParams":
        return cls(
            np.asarray(d["mins"], dtype=np.float64),
            np.asarray(d["maxs"], dtype=np.float64),
        )


def fit_scaler(train_vectors: np.ndarray) -> ScalerParams:
    """Per-dimension min/max over the training base vectors."""
    train_vectors = np.asarray(train_vectors, dtype=np.float64)
    if train_vectors.ndim != 2 or train_vectors.shape[0] == 0:
        raise FeatureError("fit_scaler needs at least one training vector")
    return ScalerParams(train_vectors.min(axis=0).copy(), train_vectors.max(axis=0).copy())


def apply_scaler(params: ScalerParams, v: np.ndarray) -> np.ndarray:
    """Map each dim into [−1, 1]; constant training dims map to 0; clamps."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != params.mins.shape[0]:
        raise FeatureError(
            f"vector has {v.shape[-1]} dims, scaler fitted on {params.mins.shape[0]}"
        )
    span = params.maxs - params.mins
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = -1.0 + 2.0 * (v - params.mins) / span
    scaled = np.where(span > 0, scaled, 0.0)
    return np.clip(scaled, -1.0, 1.0)


def fc_concat(center: np.ndarray, prev, nxt) -> np.ndarray:
    """Local-context concatenation S_{i−k} … S_i … S_{i+l}.

    ``prev`` holds the k previous-sentence vectors oldest-first; ``nxt`` the
    l following ones.  ``None`` marks a neighbor outside the transcript and
    contributes zeros.
    """
    width = center.shape[0]
    blocks = []
    for block in (*prev, center, *nxt):
        if block is None:
            blocks.append(np.zeros(width, dtype=np.float64))
        else:
            if block.shape[0] != width:
                raise FeatureError(
                    f"neighbor block has {block.shape[0]} dims, center has {width}"
                )
            blocks.append(np.asarray(block, dtype=np.float64))
    return np.concatenate(blocks)


def assemble(fc_vector: np.ndarray, config: FeatureConfig,
             global_triple=None) -> np.ndarray:
    """Final vector: local-context block ⧺ optional unscaled global triple."""
    expected_fc = config.n_base * (config.fc_k + config.fc_l + 1)
    if fc_vector.shape[0] != expected_fc:
        raise FeatureError(
            f"context block has {fc_vector.shape[0]} dims, config expects {expected_fc}"
        )
    if not config.use_global:
        return np.asarray(fc_vector, dtype=np.float64)
    triple = (0.0, 0.0, 0.0) if global_triple is None else global_triple
    if len(triple) != 3:
        raise FeatureError(f"global triple must have 3 values, got {len(triple)}")
    return np.concatenate([fc_vector, np.asarray(triple, dtype=np.float64)])
