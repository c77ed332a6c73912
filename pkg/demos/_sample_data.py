"""Tiny self-contained corpus generator shared by the demo scripts.

Every claim gets a rare marker token so retrieval and reranking have an
unambiguous signal; queries paraphrase one claim per debate.
"""

from __future__ import annotations

import json
import os

import numpy as np

TOPICS = ("economy", "immigration", "healthcare", "crime", "energy",
          "education", "trade", "wages")
VERBS = ("rose", "fell", "doubled", "halved", "stalled")


def _write(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def build_corpus(dir_path, n_claims=60, n_debates=12, n_queries=10, seed=7,
                 masked=False):
    """Write claims/transcripts/pairs JSONL files; returns their paths.

    With ``masked`` the query lines drop the topic and marker words (as if
    the speaker used a pronoun), so retrieval needs a coreference file to
    recover the signal.
    """
    os.makedirs(dir_path, exist_ok=True)
    rng = np.random.default_rng(seed)
    claims = []
    for i in range(n_claims):
        topic = TOPICS[i % len(TOPICS)]
        verb = VERBS[i % len(VERBS)]
        marker = f"marker{i:03d}"
        claims.append({
            "id": f"c{i:03d}",
            "ver_claim": f"the {topic} {marker} rate {verb} by ten percent",
            "title": f"Checking the {topic} {marker} numbers",
            "body": (f"The {topic} figure known as {marker} {verb} last year. "
                     f"Analysts debated the {topic} trend. "
                     f"The ruling cited official {marker} data."),
        })

    transcripts = []
    pairs = []
    fillers = ("let us move on to the next topic",
               "the moderator asked for a short answer",
               "that is a question for my opponent",
               "we will come back to this after the break")
    for d in range(n_debates):
        debate_id = f"d{d:02d}"
        date = f"{2012 + d // 5}-{(d % 5) * 2 + 1:02d}-15"
        query_slot = 3 if d < n_queries else None
        for line_no in range(1, 7):
            if query_slot is not None and line_no == query_slot:
                gold = claims[(d * n_claims) // n_debates]
                marker = gold["id"].replace("c", "marker")
                topic = gold["ver_claim"].split()[1]
                if masked:
                    text = "they claim that rate changed dramatically"
                else:
                    text = f"they claim the {topic} {marker} rate changed dramatically"
                pairs.append({
                    "debate_id": debate_id,
                    "line_nos": [line_no],
                    "ver_claim_ids": [gold["id"]],
                    "category": "clean",
                })
            else:
                text = fillers[(d + line_no) % len(fillers)]
            transcripts.append({
                "debate_id": debate_id,
                "event_date": date,
                "line_no": line_no,
                "speaker": f"speaker{line_no % 2}",
                "text": text,
            })

    paths = {
        "claims": os.path.join(dir_path, "claims.jsonl"),
        "transcripts": os.path.join(dir_path, "transcripts.jsonl"),
        "pairs": os.path.join(dir_path, "pairs.jsonl"),
    }
    _write(paths["claims"], claims)
    _write(paths["transcripts"], transcripts)
    _write(paths["pairs"], pairs)
    return paths


def build_provider_files(dir_path, paths):
    """Matching coref and global-score files for the ablation demo."""
    claims = [json.loads(l) for l in open(paths["claims"], encoding="utf-8")]
    pairs = [json.loads(l) for l in open(paths["pairs"], encoding="utf-8")]
    claims_by_id = {c["id"]: c for c in claims}
    src = []
    for p in pairs:
        gold = claims_by_id[p["ver_claim_ids"][0]]
        topic, marker = gold["ver_claim"].split()[1:3]
        src.append({
            "side": "source", "doc_id": p["debate_id"], "unit": p["line_nos"][0],
            "resolved_text": f"the senator claims the {topic} {marker} "
                             "rate changed dramatically",
        })
    tgt = [{"side": "target", "doc_id": c["id"], "unit": "body",
            "resolved_text": c["body"].replace("The ruling", f"The {c['id']} ruling")}
           for c in claims]
    glob = [{"query_id": f"{p['debate_id']}:{p['line_nos'][0]}",
             "ver_claim_id": p["ver_claim_ids"][0],
             "p_support": 0.8, "p_refute": 0.15, "p_nei": 0.05}
            for p in pairs]
    out = {
        "source_coref": os.path.join(dir_path, "coref_source.jsonl"),
        "target_coref": os.path.join(dir_path, "coref_target.jsonl"),
        "global_scores": os.path.join(dir_path, "global_scores.jsonl"),
    }
    _write(out["source_coref"], src)
    _write(out["target_coref"], tgt)
    _write(out["global_scores"], glob)
    return out
