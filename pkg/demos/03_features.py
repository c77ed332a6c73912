"""Walk through feature assembly for one query: similarity channels,
reciprocal ranks, scaling, neighbor concatenation, and the global triple.

Run with:  python3 demos/03_features.py
"""

import numpy as np

from claimrank import bm25, embed, features, textproc

CHANNELS = ["bm25 ver_claim", "bm25 title", "bm25 body", "bm25 combined",
            "cos ver_claim", "cos title", "cos body s1", "cos body s2", "cos body s3"]


class Claim:
    def __init__(self, id, ver_claim, title, body):
        self.id, self.ver_claim, self.title, self.body = id, ver_claim, title, body


def view(claim):
    return features.CandidateView(
        claim.id, claim.ver_claim, claim.title, claim.body,
        tuple(textproc.split_sentences(claim.body)),
    )


def main():
    claims = [
        Claim("c0", "unemployment fell below six percent",
              "Checking the unemployment number",
              "Official data show unemployment fell. The drop began in spring. "
              "Economists credited hiring in services."),
        Claim("c1", "crime rose in every major city",
              "The crime statistics claim",
              "Police reports show mixed results. Some cities saw declines."),
        Claim("c2", "the deficit doubled in four years",
              "A look at the deficit claim",
              "Budget documents tell a different story."),
    ]
    provider = embed.HashedEmbedder(dim=256)
    index = bm25.build_index(claims, textproc.TokenizerConfig())
    query = "he said unemployment fell below six percent last year"

    pool = [view(c) for c in claims]
    ids = [c.id for c in claims]
    sims = features.similarity_matrix(query, pool, index, provider)
    base = features.base_vectors(sims, ids)
    print(f"pool of {len(pool)} candidates -> base matrix {base.shape}")
    print(f"{'channel':16s} " + " ".join(f"{i:>8s}" for i in ids))
    for row, name in enumerate(CHANNELS):
        print(f"{name:16s} " + " ".join(f"{sims[c, row]:8.4f}" for c in range(len(pool))))
    print("reciprocal ranks (same channels, rank 1 -> 1.0):")
    for row, name in enumerate(CHANNELS):
        print(f"{name:16s} " + " ".join(f"{base[c, 9 + row]:8.4f}" for c in range(len(pool))))

    scaler = features.fit_scaler(base)
    scaled = np.vstack([features.apply_scaler(scaler, v) for v in base])
    print(f"\nafter min-max scaling: min {scaled.min():.3f}, max {scaled.max():.3f} "
          f"(each dimension mapped to [-1, 1] on the fit data)")

    # concatenate one previous and one next sentence's vectors for c0;
    # a missing neighbor would contribute a zero block instead
    cfg = features.FeatureConfig(fc_k=1, fc_l=1, use_global=True)
    prev_vec, next_vec = scaled[1], scaled[2]
    fc = features.fc_concat(scaled[0], [prev_vec], [next_vec])
    final = features.assemble(fc, cfg, (0.72, 0.20, 0.08))
    print(f"\nwindow (k=1, l=1): {cfg.n_base} dims per sentence x 3 sentences "
          f"+ 3 global probabilities = {cfg.dim} dims")
    print(f"assembled vector length: {final.shape[0]}")
    print(f"layout: prev={final[:18].round(3).tolist()[:4]}... "
          f"center={final[18:36].round(3).tolist()[:4]}... "
          f"global triple={final[-3:].tolist()}")

    no_neighbors = features.fc_concat(scaled[0], [None], [None])
    print(f"boundary sentence: prev/next blocks zeroed -> "
          f"first 18 dims all zero: {not no_neighbors[:18].any()}")


if __name__ == "__main__":
    main()
