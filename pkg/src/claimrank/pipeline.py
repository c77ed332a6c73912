"""Experiment orchestration: config, file-based stages, and the ablation matrix.

Every stage reads upstream artifacts from the output directory and writes its
own, so any stage can be rerun in isolation and the sidecar can regenerate
provider files between stages.  All artifacts are deterministic functions of
the config and the input files; a ``.prov.json`` sidecar beside each artifact
records the serialized config and input content hashes.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
from dataclasses import dataclass

import numpy as np

from . import bm25, context, evaluation, features, ranker
from .corpus import DatasetBundle, SplitSpec, load_corpus, load_split, save_split, split
from .embed import HashedEmbedder, load_embedding_file
from .features import CandidateView, FeatureConfig, ScalerParams
from .textproc import TokenizerConfig, split_sentences

logger = logging.getLogger(__name__)

ARTIFACTS = {
    "index": "index.bin",
    "split": "split.json",
    "candidates": "candidates.jsonl",
    "features_train": "features_train.jsonl",
    "features_test": "features_test.jsonl",
    "scaler": "scaler.json",
    "model": "model.json",
    "run": "run.txt",
    "report_json": "report.json",
    "report_txt": "report.txt",
    "xh_graphs": "xh_graphs.jsonl",
    "matrix_json": "matrix_report.json",
    "matrix_txt": "matrix_report.txt",
}

# ablation matrix: toggles applied on top of the base config, in report order
MATRIX_ROWS = (
    "baseline",
    "fc",
    "src-coref",
    "src-coref+fc",
    "global",
    "tgt-coref",
    "tgt-coref+global",
    "src+tgt-coref",
    "all",
)


class PipelineError(ValueError):
    """User-facing pipeline errors: bad config, missing artifacts, mismatches."""


@dataclass(frozen=True)
class ExperimentConfig:
    claims_path: str
    transcripts_path: str
    pairs_path: str
    out_dir: str
    split: SplitSpec = SplitSpec("chrono")
    tokenizer: TokenizerConfig = TokenizerConfig()
    bm25_params: bm25.BM25Params = bm25.BM25Params()
    top_k: int = 100
    retrieval_field: str = "combined"
    embedding: dict = dataclasses.field(default_factory=lambda: {"kind": "hashed_fallback", "dim": 256})
    source_coref_path: str | None = None
    target_coref_path: str | None = None
    global_scores_path: str | None = None
    fc: tuple[int, int] | None = None
    use_global: bool = False
    top_m_sentences: int = 3
    train_config: ranker.TrainConfig = ranker.TrainConfig()
    run_tag: str = "claimrank"

    def __post_init__(self):
        if self.top_k < 1:
            raise PipelineError(f"top_k must be >= 1, got {self.top_k}")
        if self.retrieval_field not in bm25.FIELDS:
            raise PipelineError(f"unknown retrieval field {self.retrieval_field!r}")
        kind = self.embedding.get("kind")
        if kind not in ("hashed_fallback", "file"):
            raise PipelineError(f"embedding kind must be hashed_fallback or file, got {kind!r}")
        if kind == "file" and not self.embedding.get("path"):
            raise PipelineError("file embedding provider needs a 'path'")
        if self.fc is not None:
            k, l = self.fc
            if k < 0 or l < 0:
                raise PipelineError(f"fc window must be non-negative, got {self.fc}")

    @property
    def feature_config(self) -> FeatureConfig:
        k, l = self.fc or (0, 0)
        return FeatureConfig(self.top_m_sentences, k, l, self.use_global)

    def to_dict(self) -> dict:
        return {
            "claims": self.claims_path,
            "transcripts": self.transcripts_path,
            "pairs": self.pairs_path,
            "out_dir": self.out_dir,
            "split": {
                "kind": self.split.kind,
                "seed": self.split.seed,
                "train_ratio": self.split.train_ratio,
                "chrono_train_debates": self.split.chrono_train_debates,
                "chrono_test_debates": self.split.chrono_test_debates,
            },
            "tokenizer": self.tokenizer.to_dict(),
            "bm25": {"k1": self.bm25_params.k1, "b": self.bm25_params.b},
            "retrieval": {"top_k": self.top_k, "field": self.retrieval_field},
            "embedding": dict(self.embedding),
            "source_coref": self.source_coref_path,
            "target_coref": self.target_coref_path,
            "global_scores": self.global_scores_path,
            "fc": list(self.fc) if self.fc else None,
            "use_global": self.use_global,
            "top_m_sentences": self.top_m_sentences,
            "ranker": self.train_config.to_dict(),
            "run_tag": self.run_tag,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        for key in ("claims", "transcripts", "pairs", "out_dir"):
            if key not in d:
                raise PipelineError(f"config missing required key {key!r}")
        sp = dict(d.get("split") or {})
        spec = SplitSpec(
            kind=sp.get("kind", "chrono"),
            train_ratio=sp.get("train_ratio", 0.8),
            seed=sp.get("seed"),
            chrono_train_debates=sp.get("chrono_train_debates", 50),
            chrono_test_debates=sp.get("chrono_test_debates", 20),
        )
        retrieval = d.get("retrieval", {})
        fc = d.get("fc")
        return cls(
            claims_path=d["claims"],
            transcripts_path=d["transcripts"],
            pairs_path=d["pairs"],
            out_dir=d["out_dir"],
            split=spec,
            tokenizer=TokenizerConfig.from_dict(d.get("tokenizer", {})),
            bm25_params=bm25.BM25Params(**d.get("bm25", {})),
            top_k=retrieval.get("top_k", 100),
            retrieval_field=retrieval.get("field", "combined"),
            embedding=dict(d.get("embedding", {"kind": "hashed_fallback", "dim": 256})),
            source_coref_path=d.get("source_coref"),
            target_coref_path=d.get("target_coref"),
            global_scores_path=d.get("global_scores"),
            fc=tuple(fc) if fc else None,
            use_global=bool(d.get("use_global", False)),
            top_m_sentences=d.get("top_m_sentences", 3),
            train_config=ranker.TrainConfig(**d.get("ranker", {})),
            run_tag=d.get("run_tag", "claimrank"),
        )


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PipelineError(f"{path}: invalid JSON config ({exc.msg})") from exc
    return ExperimentConfig.from_dict(payload)


def semantic_feature_hash(config: ExperimentConfig, provider) -> str:
    """Hash of everything that shapes feature values.

    Provider files and coref files are identified by role, not path, so a
    run with an empty coref file hashes identically to one with none.
    """
    payload = {
        "tokenizer": config.tokenizer.config_hash(),
        "bm25": {"k1": config.bm25_params.k1, "b": config.bm25_params.b},
        "retrieval": {"top_k": config.top_k, "field": config.retrieval_field},
        "embedding": {"kind": provider.kind, "dim": provider.dim},
        "features": config.feature_config.to_dict(),
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# runtime experiment state


@dataclass
class Experiment:
    config: ExperimentConfig
    bundle: DatasetBundle
    src_coref: context.CorefResolutionSet
    tgt_coref: context.CorefResolutionSet
    global_scores: context.GlobalScoreSet
    provider: object
    views: dict[str, CandidateView]
    view_list: list[CandidateView]
    index: bm25.InvertedIndex | None = None

    def line_text(self, sentence) -> str:
        return self.src_coref.resolve(sentence.debate_id, sentence.line_no, sentence.text)

    def query_text(self, pair) -> str:
        transcript = self.bundle.transcripts_by_id[pair.debate_id]
        wanted = set(pair.line_nos)
        parts = [self.line_text(s) for s in transcript.sentences if s.line_no in wanted]
        return " ".join(parts)

    def query_positions(self, pair) -> list[int]:
        transcript = self.bundle.transcripts_by_id[pair.debate_id]
        pos = {s.line_no: i for i, s in enumerate(transcript.sentences)}
        return sorted(pos[ln] for ln in pair.line_nos)


def make_provider(config: ExperimentConfig):
    kind = config.embedding["kind"]
    if kind == "hashed_fallback":
        return HashedEmbedder(int(config.embedding.get("dim", 256)))
    return load_embedding_file(config.embedding["path"])


def build_views(bundle: DatasetBundle, tgt_coref) -> dict[str, CandidateView]:
    views = {}
    for c in bundle.claims:
        ver_claim = tgt_coref.resolve(c.id, "ver_claim", c.ver_claim)
        body = tgt_coref.resolve(c.id, "body", c.body)
        views[c.id] = CandidateView(
            c.id, ver_claim, c.title, body, tuple(split_sentences(body))
        )
    return views


def open_experiment(config: ExperimentConfig, need_provider: bool = True) -> Experiment:
    bundle = load_corpus(config.claims_path, config.transcripts_path, config.pairs_path)
    src = (
        context.load_coref_file(config.source_coref_path, "source")
        if config.source_coref_path
        else context.identity_coref("source")
    )
    tgt = (
        context.load_coref_file(config.target_coref_path, "target")
        if config.target_coref_path
        else context.identity_coref("target")
    )
    scores = (
        context.load_global_scores(config.global_scores_path)
        if config.global_scores_path
        else context.empty_global_scores()
    )
    provider = make_provider(config) if need_provider else HashedEmbedder(8)
    views = build_views(bundle, tgt)
    view_list = [views[c.id] for c in bundle.claims]
    return Experiment(config, bundle, src, tgt, scores, provider, views, view_list)


# ---------------------------------------------------------------------------
# provenance sidecars and artifact plumbing


def artifact_path(out_dir, name) -> str:
    return os.path.join(out_dir, ARTIFACTS[name])


def require_artifact(out_dir, name, producing_stage) -> str:
    path = artifact_path(out_dir, name)
    if not os.path.exists(path):
        raise PipelineError(
            f"missing artifact {ARTIFACTS[name]!r} in {out_dir!r}; "
            f"run `claimrank {producing_stage}` first"
        )
    return path


def _sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_prov(artifact, config: ExperimentConfig, inputs: dict) -> None:
    payload = {
        "config": config.to_dict(),
        "inputs": {name: _sha256_file(p) for name, p in sorted(inputs.items()) if p},
    }
    with open(f"{artifact}.prov.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# stages


def stage_index(exp: Experiment) -> str:
    cfg = exp.config
    os.makedirs(cfg.out_dir, exist_ok=True)
    index = bm25.build_index(exp.view_list, cfg.tokenizer, cfg.bm25_params)
    path = artifact_path(cfg.out_dir, "index")
    bm25.save_index(index, path)
    write_prov(path, cfg, {"claims": cfg.claims_path, "target_coref": cfg.target_coref_path})
    exp.index = index
    return path


def stage_split(exp: Experiment) -> str:
    cfg = exp.config
    os.makedirs(cfg.out_dir, exist_ok=True)
    train, test = split(exp.bundle, cfg.split)
    path = artifact_path(cfg.out_dir, "split")
    save_split(path, cfg.split, train, test)
    write_prov(path, cfg, {"transcripts": cfg.transcripts_path, "pairs": cfg.pairs_path})
    return path


def _load_index(exp: Experiment) -> bm25.InvertedIndex:
    if exp.index is None:
        path = require_artifact(exp.config.out_dir, "index", "index")
        exp.index = bm25.load_index(path)
        if exp.index.tokenizer.config_hash() != exp.config.tokenizer.config_hash():
            raise PipelineError(
                "index was built with a different tokenizer config; rerun `claimrank index`"
            )
    return exp.index


def _split_pairs(exp: Experiment) -> tuple[list[int], list[int]]:
    path = require_artifact(exp.config.out_dir, "split", "split")
    payload = load_split(path)
    n = len(exp.bundle.pairs)
    for side in ("train", "test"):
        for i in payload[side]:
            if not isinstance(i, int) or not 0 <= i < n:
                raise PipelineError(f"split file references pair index {i!r} out of range")
    return payload["train"], payload["test"]


def stage_retrieve(exp: Experiment) -> str:
    """Top-k candidate pools for every split pair, train and test alike."""
    cfg = exp.config
    index = _load_index(exp)
    train, test = _split_pairs(exp)
    path = artifact_path(cfg.out_dir, "candidates")
    with open(path, "w", encoding="utf-8") as fh:
        for i in sorted(train) + sorted(test):
            pair = exp.bundle.pairs[i]
            hits = bm25.retrieve_topk(
                index, exp.query_text(pair), cfg.top_k, cfg.retrieval_field
            )
            row = {
                "query_id": pair.query_id,
                "candidates": [[cid, score] for cid, score in hits],
            }
            fh.write(json.dumps(row, sort_keys=True))
            fh.write("\n")
    write_prov(path, cfg, {
        "index": artifact_path(cfg.out_dir, "index"),
        "split": artifact_path(cfg.out_dir, "split"),
        "source_coref": cfg.source_coref_path,
    })
    return path


def load_candidates(path) -> dict[str, list[tuple[str, float]]]:
    pools = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "query_id" not in obj or "candidates" not in obj:
                raise PipelineError(f"{path}:{line_no}: bad candidates row")
            pools[obj["query_id"]] = [(cid, float(s)) for cid, s in obj["candidates"]]
    return pools


@dataclass
class QueryFeatureSet:
    query_id: str
    cand_ids: list[str]
    vectors: np.ndarray  # (n_candidates, final_dim)
    gold_ids: frozenset


@dataclass
class _StagedQuery:
    pair: object
    cand_ids: list[str]
    central: np.ndarray
    prev: list[np.ndarray | None]
    nxt: list[np.ndarray | None]


def _stage_query_vectors(exp: Experiment, pair, pools, inject_golds: bool):
    cfg = exp.config
    qid = pair.query_id
    pool_ids = [cid for cid, _ in pools.get(qid, [])]
    if inject_golds:
        missing = sorted(set(pair.ver_claim_ids) - set(pool_ids))
        pool_ids = pool_ids + missing
    if not pool_ids:
        return None
    views = [exp.views[cid] for cid in pool_ids]
    top_m = cfg.top_m_sentences
    qtext = exp.query_text(pair)
    sims = features.similarity_matrix(qtext, views, exp.index, exp.provider, top_m)
    central = features.base_vectors(sims, pool_ids)
    k, l = cfg.fc or (0, 0)
    prev: list[np.ndarray | None] = []
    nxt: list[np.ndarray | None] = []
    if k or l:
        transcript = exp.bundle.transcripts_by_id[pair.debate_id]
        positions = exp.query_positions(pair)
        lo, hi = positions[0], positions[-1]

        def neighbor_matrix(p):
            if not 0 <= p < len(transcript.sentences):
                return None
            text = exp.line_text(transcript.sentences[p])
            m = features.similarity_matrix(text, views, exp.index, exp.provider, top_m)
            return features.base_vectors(m, pool_ids)

        prev = [neighbor_matrix(lo + off) for off in range(-k, 0)]
        nxt = [neighbor_matrix(hi + off) for off in range(1, l + 1)]
    return _StagedQuery(pair, pool_ids, central, prev, nxt)


def _finalize_query(exp: Experiment, staged: _StagedQuery, scaler: ScalerParams) -> QueryFeatureSet:
    cfg = exp.config
    fconf = cfg.feature_config
    central = features.apply_scaler(scaler, staged.central)
    prev = [None if m is None else features.apply_scaler(scaler, m) for m in staged.prev]
    nxt = [None if m is None else features.apply_scaler(scaler, m) for m in staged.nxt]
    qid = staged.pair.query_id
    rows = []
    for i, cid in enumerate(staged.cand_ids):
        fc_vec = features.fc_concat(
            central[i],
            [None if m is None else m[i] for m in prev],
            [None if m is None else m[i] for m in nxt],
        )
        triple = None
        if cfg.use_global:
            triple, _present = exp.global_scores.lookup(qid, cid)
        rows.append(features.assemble(fc_vec, fconf, triple))
    return QueryFeatureSet(
        qid, staged.cand_ids, np.vstack(rows), frozenset(staged.pair.ver_claim_ids)
    )


def featurize_pairs(exp: Experiment, pair_indices, pools, inject_golds: bool,
                    scaler: ScalerParams | None = None):
    """Assemble final vectors for the given pairs.

    Training mode (scaler=None) fits the min-max scaler on the central base
    vectors of these pairs; test mode applies the one passed in.  Returns
    (feature sets, scaler).
    """
    staged = []
    for i in sorted(pair_indices):
        sq = _stage_query_vectors(exp, exp.bundle.pairs[i], pools, inject_golds)
        if sq is None:
            logger.warning(
                "query %s: empty candidate pool, no features",
                exp.bundle.pairs[i].query_id,
            )
            continue
        staged.append(sq)
    if scaler is None:
        if not staged:
            raise PipelineError("no feature vectors to fit the scaler on")
        scaler = features.fit_scaler(np.vstack([sq.central for sq in staged]))
    featsets = [_finalize_query(exp, sq, scaler) for sq in staged]
    return featsets, scaler


def save_features(path, featsets, config_hash: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for fs in featsets:
            for cid, vec in zip(fs.cand_ids, fs.vectors):
                row = {
                    "query_id": fs.query_id,
                    "ver_claim_id": cid,
                    "vector": [float(x) for x in vec],
                    "config_hash": config_hash,
                }
                fh.write(json.dumps(row, sort_keys=True))
                fh.write("\n")


def load_features(path, expect_hash: str | None = None):
    """Rebuild per-query feature groups (pool order preserved)."""
    order: list[str] = []
    groups: dict[str, list[tuple[str, list[float]]]] = {}
    seen_hash = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            for key in ("query_id", "ver_claim_id", "vector", "config_hash"):
                if key not in obj:
                    raise PipelineError(f"{path}:{line_no}: missing field {key!r}")
            if seen_hash is None:
                seen_hash = obj["config_hash"]
            elif obj["config_hash"] != seen_hash:
                raise PipelineError(f"{path}:{line_no}: mixed config hashes in one file")
            qid = obj["query_id"]
            if qid not in groups:
                groups[qid] = []
                order.append(qid)
            groups[qid].append((obj["ver_claim_id"], obj["vector"]))
    if expect_hash is not None and seen_hash is not None and seen_hash != expect_hash:
        raise PipelineError(
            f"{path}: feature config hash {seen_hash[:12]}… does not match the "
            f"current config ({expect_hash[:12]}…); rerun `claimrank featurize`"
        )
    out = []
    for qid in order:
        cids = [c for c, _ in groups[qid]]
        vecs = np.asarray([v for _, v in groups[qid]], dtype=np.float64)
        out.append(QueryFeatureSet(qid, cids, vecs, frozenset()))
    return out, seen_hash


def save_scaler(path, scaler: ScalerParams, config_hash: str) -> None:
    payload = {"config_hash": config_hash, **scaler.to_dict()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_scaler(path, expect_hash: str | None = None) -> ScalerParams:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if expect_hash is not None and payload.get("config_hash") != expect_hash:
        raise PipelineError(
            f"{path}: scaler was fitted under a different feature config; "
            "rerun `claimrank featurize --subset train`"
        )
    return ScalerParams.from_dict(payload)


def stage_featurize(exp: Experiment, subset: str) -> str:
    cfg = exp.config
    if subset not in ("train", "test"):
        raise PipelineError(f"featurize subset must be train or test, got {subset!r}")
    _load_index(exp)
    train, test = _split_pairs(exp)
    pools = load_candidates(require_artifact(cfg.out_dir, "candidates", "retrieve"))
    chash = semantic_feature_hash(cfg, exp.provider)
    scaler_path = artifact_path(cfg.out_dir, "scaler")
    if subset == "train":
        featsets, scaler = featurize_pairs(exp, train, pools, inject_golds=True)
        save_scaler(scaler_path, scaler, chash)
        write_prov(scaler_path, cfg, {
            "candidates": artifact_path(cfg.out_dir, "candidates"),
        })
    else:
        if not os.path.exists(scaler_path):
            raise PipelineError(
                "missing scaler.json; run `claimrank featurize --subset train` first"
            )
        scaler = load_scaler(scaler_path, chash)
        featsets, _ = featurize_pairs(exp, test, pools, inject_golds=False, scaler=scaler)
    path = artifact_path(cfg.out_dir, f"features_{subset}")
    save_features(path, featsets, chash)
    write_prov(path, cfg, {
        "candidates": artifact_path(cfg.out_dir, "candidates"),
        "source_coref": cfg.source_coref_path,
        "target_coref": cfg.target_coref_path,
        "global_scores": cfg.global_scores_path,
    })
    return path


def _golds_by_query(exp: Experiment, pair_indices) -> dict[str, frozenset]:
    return {
        exp.bundle.pairs[i].query_id: frozenset(exp.bundle.pairs[i].ver_claim_ids)
        for i in pair_indices
    }


def stage_train(exp: Experiment) -> str:
    cfg = exp.config
    chash = semantic_feature_hash(cfg, exp.provider)
    feat_path = require_artifact(cfg.out_dir, "features_train", "featurize --subset train")
    featsets, _ = load_features(feat_path, expect_hash=chash)
    scaler = load_scaler(require_artifact(cfg.out_dir, "scaler", "featurize --subset train"), chash)
    train_idx, _ = _split_pairs(exp)
    golds = _golds_by_query(exp, train_idx)
    query_pools = [
        (fs.query_id, list(zip(fs.cand_ids, fs.vectors)), golds.get(fs.query_id, frozenset()))
        for fs in featsets
    ]
    constraints = ranker.build_constraints(query_pools, cfg.train_config)
    if not constraints:
        raise PipelineError("no training constraints could be built from the features")
    model = ranker.train(
        constraints,
        cfg.train_config,
        feature_config=cfg.feature_config,
        feature_config_hash=chash,
        scaler=scaler,
    )
    path = artifact_path(cfg.out_dir, "model")
    ranker.save_model(model, path)
    write_prov(path, cfg, {"features_train": feat_path})
    return path


def stage_rerank(exp: Experiment) -> str:
    cfg = exp.config
    model = ranker.load_model(require_artifact(cfg.out_dir, "model", "train"))
    feat_path = require_artifact(cfg.out_dir, "features_test", "featurize --subset test")
    featsets, fhash = load_features(feat_path)
    if fhash is not None and model.feature_config_hash and fhash != model.feature_config_hash:
        raise PipelineError(
            "model and test features were built under different feature configs; "
            "rerun `claimrank featurize` and `claimrank train` with one config"
        )
    run = {}
    for fs in featsets:
        run[fs.query_id] = ranker.rerank(model, zip(fs.cand_ids, fs.vectors))
    path = artifact_path(cfg.out_dir, "run")
    evaluation.save_run(path, run, cfg.run_tag)
    write_prov(path, cfg, {"model": artifact_path(cfg.out_dir, "model"),
                           "features_test": feat_path})
    return path


def test_qrels(exp: Experiment) -> dict:
    _, test_idx = _split_pairs(exp)
    return evaluation.qrels_from_pairs([exp.bundle.pairs[i] for i in test_idx])


def stage_evaluate(exp: Experiment) -> tuple[str, evaluation.EvalReport]:
    cfg = exp.config
    run = evaluation.load_run(require_artifact(cfg.out_dir, "run", "rerank"))
    qrels = test_qrels(exp)
    ranked = evaluation.ranked_ids(run)
    report = evaluation.evaluate(ranked, qrels)
    mrr = evaluation.mean_reciprocal_rank(ranked, qrels)
    json_path = artifact_path(cfg.out_dir, "report_json")
    payload = report.to_dict()
    payload["mrr_overall"] = mrr
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    table = evaluation.format_table([(cfg.run_tag, report)])
    txt_path = artifact_path(cfg.out_dir, "report_txt")
    with open(txt_path, "w", encoding="utf-8") as fh:
        fh.write(table)
    write_prov(json_path, cfg, {"run": artifact_path(cfg.out_dir, "run"),
                                "pairs": cfg.pairs_path})
    write_prov(txt_path, cfg, {"run": artifact_path(cfg.out_dir, "run"),
                               "pairs": cfg.pairs_path})
    return json_path, report


def stage_export_xh_graphs(exp: Experiment) -> str:
    cfg = exp.config
    _load_index(exp)
    train, test = _split_pairs(exp)
    pools = load_candidates(require_artifact(cfg.out_dir, "candidates", "retrieve"))
    queries = []
    for i in sorted(train) + sorted(test):
        pair = exp.bundle.pairs[i]
        queries.append((pair.query_id, exp.query_text(pair)))
    candidates_by_query = {qid: [cid for cid, _ in pool] for qid, pool in pools.items()}
    path = artifact_path(cfg.out_dir, "xh_graphs")
    n = context.export_xh_graphs(
        queries, candidates_by_query, exp.views, exp.provider, path,
        target_coref=None,  # views are already coref-resolved
    )
    logger.info("exported %d evidence graphs", n)
    write_prov(path, cfg, {"candidates": artifact_path(cfg.out_dir, "candidates")})
    return path


def run_experiment(config: ExperimentConfig) -> evaluation.EvalReport:
    """All stages, in order, into config.out_dir."""
    exp = open_experiment(config)
    stage_index(exp)
    stage_split(exp)
    stage_retrieve(exp)
    stage_featurize(exp, "train")
    stage_featurize(exp, "test")
    stage_train(exp)
    stage_rerank(exp)
    _, report = stage_evaluate(exp)
    return report


def matrix_rows(config: ExperimentConfig) -> list[tuple[str, ExperimentConfig]]:
    """The nine ablation configurations derived from one base config."""
    fc = config.fc or (3, 1)
    src = config.source_coref_path
    tgt = config.target_coref_path

    def derive(name, *, use_fc=False, use_src=False, use_tgt=False, use_global=False):
        return name, dataclasses.replace(
            config,
            out_dir=os.path.join(config.out_dir, name),
            fc=fc if use_fc else None,
            source_coref_path=src if use_src else None,
            target_coref_path=tgt if use_tgt else None,
            use_global=use_global,
            run_tag=name,
        )

    return [
        derive("baseline"),
        derive("fc", use_fc=True),
        derive("src-coref", use_src=True),
        derive("src-coref+fc", use_src=True, use_fc=True),
        derive("global", use_global=True),
        derive("tgt-coref", use_tgt=True),
        derive("tgt-coref+global", use_tgt=True, use_global=True),
        derive("src+tgt-coref", use_src=True, use_tgt=True),
        derive("all", use_src=True, use_fc=True, use_global=True),
    ]


def run_matrix(config: ExperimentConfig) -> tuple[str, str]:
    """Run the nine-row ablation matrix; emit one consolidated report."""
    rows = []
    for name, row_config in matrix_rows(config):
        logger.info("matrix row %s -> %s", name, row_config.out_dir)
        report = run_experiment(row_config)
        rows.append((name, report))
    os.makedirs(config.out_dir, exist_ok=True)
    json_path = artifact_path(config.out_dir, "matrix_json")
    payload = {name: rep.to_dict() for name, rep in rows}
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    table = evaluation.format_table(rows)
    txt_path = artifact_path(config.out_dir, "matrix_txt")
    with open(txt_path, "w", encoding="utf-8") as fh:
        fh.write(table)
    return json_path, txt_path
