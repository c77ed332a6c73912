"""Stance scoring over exported evidence graphs.

Consumes the evidence-graph JSONL the ranking engine exports (query text
plus up to five candidate text nodes) and emits one
(p_support, p_refute, p_nei) probability triple per record.

Scoring requires a model file — a JSON linear-stance model mapping graph
overlap features to three logits — and refuses to run without one; scores
are never fabricated.  The feature extraction is deliberately simple so a
model trained elsewhere stays interpretable; heavier scorers can replace
this module as long as they keep the output schema.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .textseg import tokens

N_FEATURES = 4
_NEGATIONS = frozenset({"not", "no", "never", "none", "isn", "aren", "wasn",
                        "weren", "don", "doesn", "didn", "won", "couldn",
                        "shouldn", "wouldn", "hasn", "haven", "hadn",
                        "cannot", "without"})


class StanceError(ValueError):
    pass


MISSING_MODEL_HINT = (
    "stance scoring needs a model file: a JSON object with kind 'linear-stance', "
    f"a 3x{N_FEATURES} 'weights' matrix and a length-3 'bias' vector. "
    "Train one on labeled (query, claim) stance data; scores are never "
    "fabricated without a model."
)


def load_stance_model(path) -> dict:
    if not path:
        raise StanceError("no model path given. " + MISSING_MODEL_HINT)
    if not os.path.exists(path):
        raise StanceError(f"stance model not found at {path!r}. " + MISSING_MODEL_HINT)
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise StanceError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict) or obj.get("kind") != "linear-stance":
        raise StanceError(f"{path}: model kind must be 'linear-stance'. " + MISSING_MODEL_HINT)
    weights = np.asarray(obj.get("weights"), dtype=np.float64)
    bias = np.asarray(obj.get("bias"), dtype=np.float64)
    if weights.shape != (3, N_FEATURES):
        raise StanceError(
            f"{path}: weights must be 3x{N_FEATURES}, got {weights.shape}"
        )
    if bias.shape != (3,):
        raise StanceError(f"{path}: bias must have length 3, got {bias.shape}")
    if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
        raise StanceError(f"{path}: non-finite model parameter")
    return {"weights": weights, "bias": bias,
            "provenance": str(obj.get("provenance", "linear-stance"))}


def _jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def graph_features(query: str, nodes: list[str]) -> np.ndarray:
    """Overlap features for one evidence graph."""
    q = frozenset(tokens(query))
    node_sets = [frozenset(tokens(n)) for n in nodes]
    sims = [_jaccard(q, s) for s in node_sets] or [0.0]
    claim_sim = sims[0]  # first node is the claim text by convention
    neg_q = bool(q & _NEGATIONS)
    neg_claim = bool(node_sets[0] & _NEGATIONS) if node_sets else False
    return np.array(
        [claim_sim, max(sims), sum(sims) / len(sims), float(neg_q != neg_claim)],
        dtype=np.float64,
    )


def _softmax(logits: np.ndarray) -> np.ndarray:
    z = np.exp(logits - logits.max())
    return z / z.sum()


def load_graphs(path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StanceError(f"{path}:{line_no}: invalid JSON ({exc.msg})") from exc
            for key in ("query_id", "ver_claim_id", "query", "nodes"):
                if key not in obj:
                    raise StanceError(f"{path}:{line_no}: missing field {key!r}")
            if not isinstance(obj["nodes"], list) or len(obj["nodes"]) > 5:
                raise StanceError(f"{path}:{line_no}: nodes must be a list of at most 5 texts")
            records.append(obj)
    return records


def score_graphs(model: dict, records: list[dict]) -> list[dict]:
    """One probability triple per graph record, in input order."""
    rows = []
    for rec in records:
        logits = model["weights"] @ graph_features(rec["query"], rec["nodes"]) + model["bias"]
        p = _softmax(logits)
        p = p / p.sum()  # pin the sum against rounding drift
        rows.append({
            "query_id": rec["query_id"],
            "ver_claim_id": rec["ver_claim_id"],
            "p_support": float(p[0]),
            "p_refute": float(p[1]),
            "p_nei": float(p[2]),
        })
    return rows
