"""Load a corpus and compare the four train/test split protocols.

Run with:  python3 demos/01_corpus_and_splits.py
"""

import tempfile

from claimrank import corpus
from _sample_data import build_corpus


def describe(name, bundle, train, test):
    dates = {t.debate_id: t.event_date for t in bundle.transcripts}

    def date_range(indices):
        ds = sorted(dates[bundle.pairs[i].debate_id] for i in indices)
        return f"{ds[0]} .. {ds[-1]}" if ds else "(empty)"

    train_debates = {bundle.pairs[i].debate_id for i in train}
    test_debates = {bundle.pairs[i].debate_id for i in test}
    print(f"\n{name}")
    print(f"  train: {len(train):2d} queries over {len(train_debates):2d} debates, {date_range(train)}")
    print(f"  test:  {len(test):2d} queries over {len(test_debates):2d} debates, {date_range(test)}")
    if train_debates & test_debates:
        print(f"  debates on both sides: {sorted(train_debates & test_debates)}")
    else:
        print("  no debate appears on both sides")


def main():
    with tempfile.TemporaryDirectory() as work:
        paths = build_corpus(work, n_claims=60, n_debates=15, n_queries=15)
        bundle = corpus.load_corpus(paths["claims"], paths["transcripts"], paths["pairs"])

        print(f"claims: {len(bundle.claims)}   debates: {len(bundle.transcripts)}   "
              f"queries: {len(bundle.pairs)}")
        print(f"categories: {bundle.category_counts()}")
        first = bundle.transcripts[0]
        print(f"debate {first.debate_id} on {first.event_date}, "
              f"{len(first.sentences)} lines; line 1: {first.sentences[0].text!r}")
        print(f"first query id: {bundle.pairs[0].query_id}  "
              f"gold: {bundle.pairs[0].ver_claim_ids}")

        specs = [
            ("chrono (10 oldest / 4 newest debates)",
             corpus.SplitSpec("chrono", chrono_train_debates=10, chrono_test_debates=4)),
            ("semi_chrono (80% of each year, chronological)",
             corpus.SplitSpec("semi_chrono", train_ratio=0.8, seed=11)),
            ("debate_random (shuffle debates, seed 11)",
             corpus.SplitSpec("debate_random", train_ratio=0.8, seed=11)),
            ("sentence_random (shuffle queries, seed 11)",
             corpus.SplitSpec("sentence_random", train_ratio=0.8, seed=11)),
        ]
        for name, spec in specs:
            train, test = corpus.split(bundle, spec)
            describe(name, bundle, train, test)

        spec = specs[2][1]
        rerun = corpus.split(bundle, spec)
        print(f"\nsame seed reproduces debate_random exactly: "
              f"{rerun == corpus.split(bundle, spec)}")


if __name__ == "__main__":
    main()
