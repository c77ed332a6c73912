"""Generates the provider files a claim-matching engine consumes:
text embeddings, coreference resolutions, and stance-probability triples."""

from .corefjob import HeuristicResolver, IdentityResolver, apply_edits, resolve_units
from .encoders import HashedEncoder, make_encoder
from .extract import collect_texts
from .jobs import load_job, run_job, write_embedding_file
from .stance import graph_features, load_stance_model, score_graphs
from .textseg import split_sentences, tokens

__version__ = "0.1.0"

__all__ = [
    "HeuristicResolver", "IdentityResolver", "apply_edits", "resolve_units",
    "HashedEncoder", "make_encoder",
    "collect_texts",
    "load_job", "run_job", "write_embedding_file",
    "graph_features", "load_stance_model", "score_graphs",
    "split_sentences", "tokens",
    "__version__",
]
