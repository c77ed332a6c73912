"""Retrieval and kernel-rankSVM reranking engine for detecting previously
fact-checked claims in political-event transcripts."""

from .bm25 import BM25Params, InvertedIndex, build_index, load_index, retrieve_topk, save_index
from .corpus import ClaimPair, DatasetBundle, SplitSpec, load_corpus, split
from .embed import HashedEmbedder, cosine, load_embedding_file, top_sentence_sims
from .evaluation import EvalReport, average_precision, evaluate, mean_reciprocal_rank
from .features import FeatureConfig, ScalerParams, apply_scaler, fc_concat, fit_scaler
from .pipeline import ExperimentConfig, run_experiment, run_matrix
from .ranker import RankSVMModel, TrainConfig, build_constraints, decision, rerank, train
from .textproc import TokenizerConfig, split_sentences, tokenize

__version__ = "0.1.0"

__all__ = [
    "BM25Params", "InvertedIndex", "build_index", "load_index", "retrieve_topk", "save_index",
    "ClaimPair", "DatasetBundle", "SplitSpec", "load_corpus", "split",
    "HashedEmbedder", "cosine", "load_embedding_file", "top_sentence_sims",
    "EvalReport", "average_precision", "evaluate", "mean_reciprocal_rank",
    "FeatureConfig", "ScalerParams", "apply_scaler", "fc_concat", "fit_scaler",
    "ExperimentConfig", "run_experiment", "run_matrix",
    "RankSVMModel", "TrainConfig", "build_constraints", "decision", "rerank", "train",
    "TokenizerConfig", "split_sentences", "tokenize",
    "__version__",
]
