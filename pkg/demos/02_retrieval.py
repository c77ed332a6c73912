"""Build an inverted index over verified claims and retrieve candidates.

Run with:  python3 demos/02_retrieval.py
"""

import os
import tempfile

from claimrank import bm25, corpus, textproc
from _sample_data import build_corpus


def main():
    with tempfile.TemporaryDirectory() as work:
        paths = build_corpus(work, n_claims=60, n_debates=15, n_queries=15)
        bundle = corpus.load_corpus(paths["claims"], paths["transcripts"], paths["pairs"])

        tokenizer = textproc.TokenizerConfig(stemmer="porter",
                                             stopwords=textproc.default_stopwords())
        index = bm25.build_index(bundle.claims, tokenizer)
        print(f"indexed {index.n_docs} claims; fields: {sorted(index.fields)}")

        query = "they claim the immigration marker001 rate changed dramatically"
        tokens = textproc.tokenize(query, tokenizer)
        print(f"\nquery: {query!r}")
        print(f"tokens after stemming/stopwords: {tokens}")

        hits = bm25.retrieve_topk(index, query, k=5)
        print("\ntop 5 on the combined field:")
        for rank, (doc_id, score) in enumerate(hits, start=1):
            claim = bundle.claims_by_id[doc_id]
            print(f"  {rank}. {doc_id}  score {score:7.4f}  {claim.ver_claim!r}")

        # per-field scores for the best hit show where the evidence lives
        best = hits[0][0]
        print(f"\nper-field scores for {best}:")
        for field in sorted(index.fields):
            s = bm25.bm25_score(index, field, tokens, best)
            print(f"  {field:10s} {s:7.4f}")

        path = os.path.join(work, "index.bin")
        bm25.save_index(index, path)
        reloaded = bm25.load_index(path)
        again = bm25.retrieve_topk(reloaded, query, k=5)
        print(f"\nsaved {os.path.getsize(path)} bytes; "
              f"reloaded index returns identical ranking: {again == hits}")


if __name__ == "__main__":
    main()
