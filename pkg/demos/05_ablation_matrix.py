"""Run the nine-row ablation matrix and print the consolidated table.

Each row re-runs the full pipeline with one combination of the optional
inputs (neighbor-window features, source/target coreference files, global
stance probabilities) switched on.

Run with:  python3 demos/05_ablation_matrix.py
"""

import logging
import os
import sys
import tempfile

from claimrank import corpus, pipeline
from _sample_data import build_corpus, build_provider_files


def main():
    # the masked rows legitimately produce contradictory training pairs;
    # route the warnings through stdout so they read in order
    logging.basicConfig(stream=sys.stdout, level=logging.WARNING,
                        format="  [%(levelname)s] %(message)s")
    with tempfile.TemporaryDirectory() as work:
        # masked queries say "that rate" instead of naming the topic, so the
        # rows with a coreference or stance file have something to recover
        paths = build_corpus(work, n_claims=40, n_debates=10, n_queries=10,
                             masked=True)
        providers = build_provider_files(work, paths)

        config = pipeline.ExperimentConfig(
            claims_path=paths["claims"],
            transcripts_path=paths["transcripts"],
            pairs_path=paths["pairs"],
            out_dir=os.path.join(work, "matrix"),
            split=corpus.SplitSpec("sentence_random", train_ratio=0.7, seed=9),
            embedding={"kind": "hashed_fallback", "dim": 128},
            source_coref_path=providers["source_coref"],
            target_coref_path=providers["target_coref"],
            global_scores_path=providers["global_scores"],
            fc=(1, 1),
        )

        print("rows to run:")
        for name, row in pipeline.matrix_rows(config):
            flags = []
            if row.fc:
                flags.append(f"fc={row.fc}")
            if row.source_coref_path:
                flags.append("src-coref")
            if row.target_coref_path:
                flags.append("tgt-coref")
            if row.use_global:
                flags.append("global")
            print(f"  {name:18s} {', '.join(flags) or '(retrieval features only)'}")

        json_path, txt_path = pipeline.run_matrix(config)
        print(f"\nconsolidated report: {json_path}")
        with open(txt_path, encoding="utf-8") as fh:
            print(fh.read())


if __name__ == "__main__":
    main()
