"""Generated files must satisfy the consuming engine's own loaders.

These tests import the ranking engine and feed it our outputs: every file
has to load without errors, cover the texts/keys the engine will ask for,
and carry a full experiment end to end.  Skipped when the engine package
is not installed.
"""

import dataclasses
import json
import random

import numpy as np
import pytest

claimrank = pytest.importorskip("claimrank")

from claimrank import context as engine_context  # noqa: E402
from claimrank import pipeline as engine_pipeline  # noqa: E402
from claimrank.corpus import SplitSpec  # noqa: E402
from claimrank.embed import cosine, load_embedding_file  # noqa: E402
from claimrank.textproc import split_sentences as engine_split_sentences  # noqa: E402

from claimproviders import collect_texts, run_job, split_sentences
from claimproviders.encoders import HashedEncoder

from providertestutil import write_jsonl

EMB_DIM = 96


@pytest.fixture(scope="module")
def handoff(corpus, tmp_path_factory):
    """Coref both sides, then embeddings covering raw + resolved texts."""
    root = tmp_path_factory.mktemp("handoff")
    paths = {
        "source": str(root / "coref_source.jsonl"),
        "target": str(root / "coref_target.jsonl"),
        "embeddings": str(root / "embeddings.jsonl"),
    }
    run_job({
        "kind": "coref-source",
        "transcripts": corpus["transcripts"],
        "resolver": {"kind": "heuristic"},
        "output": paths["source"],
    })
    run_job({
        "kind": "coref-target",
        "claims": corpus["claims"],
        "resolver": {"kind": "heuristic"},
        "output": paths["target"],
    })
    run_job({
        "kind": "embed",
        "encoder": {"kind": "hashed", "dim": EMB_DIM},
        "claims": corpus["claims"],
        "transcripts": corpus["transcripts"],
        "pairs": corpus["pairs"],
        "source_coref": paths["source"],
        "target_coref": paths["target"],
        "output": paths["embeddings"],
    })
    return paths


def test_embedding_file_loads_in_engine_and_covers_every_text(corpus, handoff):
    provider = load_embedding_file(handoff["embeddings"])
    assert provider.kind == "file"
    assert provider.dim == EMB_DIM

    texts = collect_texts(
        claims_path=corpus["claims"],
        transcripts_path=corpus["transcripts"],
        pairs_path=corpus["pairs"],
        source_coref_path=handoff["source"],
        target_coref_path=handoff["target"],
    )
    assert texts
    # any miss raises in the engine's provider, so plain iteration is the check
    for text in texts:
        vec = provider.embed(text)
        assert vec.shape == (EMB_DIM,)


def test_embedding_self_cosine_within_tolerance(handoff):
    with open(handoff["embeddings"], encoding="utf-8") as fh:
        fh.readline()
        rows = [json.loads(line) for line in fh if line.strip()]
    sample = rows if len(rows) <= 100 else random.Random(0).sample(rows, 100)
    assert sample
    for row in sample:
        vec = np.asarray(row["vector"], dtype=np.float64)
        assert cosine(vec, vec) == pytest.approx(1.0, abs=1e-6)


def test_file_vectors_round_trip_encoder_output_exactly(handoff):
    # json float serialization is repr-exact for float64
    encoder = HashedEncoder(dim=EMB_DIM)
    provider = load_embedding_file(handoff["embeddings"])
    with open(handoff["embeddings"], encoding="utf-8") as fh:
        fh.readline()
        rows = [json.loads(line) for line in fh if line.strip()]
    for row in rows[:10]:
        assert np.array_equal(provider.embed(row["text"]), encoder.embed(row["text"]))


def test_source_coref_loads_in_engine_and_covers_every_line(corpus, handoff):
    resolved = engine_context.load_coref_file(handoff["source"], "source")
    expected = set()
    with open(corpus["transcripts"], encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            expected.add((obj["debate_id"], obj["line_no"]))
    assert set(resolved.entries) == expected
    assert len(resolved) == corpus["n_lines"]


def test_target_coref_loads_in_engine_and_covers_every_claim_part(corpus, handoff):
    resolved = engine_context.load_coref_file(handoff["target"], "target")
    with open(corpus["claims"], encoding="utf-8") as fh:
        claim_ids = [json.loads(line)["id"] for line in fh]
    expected = {(cid, unit) for cid in claim_ids for unit in ("body", "ver_claim")}
    assert set(resolved.entries) == expected


def test_sentence_splitters_agree_on_corpus_and_edge_cases(corpus, handoff):
    texts = []
    with open(corpus["claims"], encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            texts.extend((obj["body"], obj["ver_claim"], obj["title"]))
    target = engine_context.load_coref_file(handoff["target"], "target")
    texts.extend(target.entries.values())
    texts.extend([
        "Dr. Vega agreed. The panel did not.",
        'He said "it fell." Then he left.',
        "One sentence without a terminator",
        "Numbers hit 3.5 percent. Then they fell!",
        "",
    ])
    for text in texts:
        assert split_sentences(text) == engine_split_sentences(text)


def test_stance_scores_load_in_engine(tmp_path, stance_model_file):
    graphs = [
        {
            "query_id": f"d{i}:3",
            "ver_claim_id": f"c{i}",
            "query": "he claims the economy rate fell sharply",
            "nodes": ["the economy rate fell by two percent",
                      "Checking the figure",
                      "No revision followed."],
        }
        for i in range(3)
    ]
    graphs_path = write_jsonl(tmp_path / "graphs.jsonl", graphs)
    out = tmp_path / "scores.jsonl"
    n = run_job({
        "kind": "xh-score",
        "graphs": graphs_path,
        "model": stance_model_file,
        "output": str(out),
    })
    assert n == len(graphs)
    # the engine loader enforces the sum and range constraints itself
    scores = engine_context.load_global_scores(out)
    assert len(scores) == len(graphs)
    for record in graphs:
        triple, found = scores.lookup(record["query_id"], record["ver_claim_id"])
        assert found
        assert sum(triple) == pytest.approx(1.0, abs=1e-6)


def test_engine_experiment_runs_on_generated_files(
    corpus, handoff, stance_model_file, tmp_path
):
    """Full in-vivo run: graphs out of the engine, stance scores back in.

    The file-backed embedding provider raises on any unknown text, so a
    completed run proves the embed job covered everything the engine
    actually asks for, coref included.
    """
    base = engine_pipeline.ExperimentConfig(
        claims_path=corpus["claims"],
        transcripts_path=corpus["transcripts"],
        pairs_path=corpus["pairs"],
        out_dir=str(tmp_path / "stage_run"),
        split=SplitSpec("sentence_random", train_ratio=0.8, seed=5),
        embedding={"kind": "file", "path": handoff["embeddings"]},
        source_coref_path=handoff["source"],
        target_coref_path=handoff["target"],
        top_k=10,
    )
    exp = engine_pipeline.open_experiment(base)
    engine_pipeline.stage_index(exp)
    engine_pipeline.stage_split(exp)
    engine_pipeline.stage_retrieve(exp)
    graphs_path = engine_pipeline.stage_export_xh_graphs(exp)

    scores_path = tmp_path / "global_scores.jsonl"
    n_scores = run_job({
        "kind": "xh-score",
        "graphs": graphs_path,
        "model": stance_model_file,
        "output": str(scores_path),
    })
    assert n_scores == len(engine_context.load_xh_graphs(graphs_path))
    assert n_scores > 0

    full = dataclasses.replace(
        base,
        out_dir=str(tmp_path / "full_run"),
        global_scores_path=str(scores_path),
        use_global=True,
    )
    report = engine_pipeline.run_experiment(full)
    assert 0.0 <= report.map_overall <= 1.0
    assert (tmp_path / "full_run" / "report.json").exists()
