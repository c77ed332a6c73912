from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from claimrank.bm25 import build_index
from claimrank.corpus import VerifiedClaim, rng_from_seed
from claimrank.embed import HashedEmbedder
from claimrank.features import (
    CandidateView,
    FeatureConfig,
    FeatureError,
    ScalerParams,
    apply_scaler,
    assemble,
    base_similarities,
    base_vectors,
    fc_concat,
    fit_scaler,
    reciprocal_ranks,
    similarity_matrix,
)
from claimrank.textproc import TokenizerConfig, split_sentences


def test_config_dims_default():
    cfg = FeatureConfig()
    assert cfg.n_sim_channels == 9
    assert cfg.n_base == 18
    assert cfg.dim == 18


def test_config_dims_local_context():
    cfg = FeatureConfig(fc_k=3, fc_l=1)
    assert cfg.dim == 18 * 5  # 90


def test_config_dims_global():
    assert FeatureConfig(use_global=True).dim == 21
    assert FeatureConfig(fc_k=3, fc_l=1, use_global=True).dim == 93


def test_config_dims_top_m():
    cfg = FeatureConfig(top_m_sentences=5)
    assert cfg.n_sim_channels == 11
    assert cfg.n_base == 22


def test_config_validation():
    with pytest.raises(FeatureError):
        FeatureConfig(top_m_sentences=0)
    with pytest.raises(FeatureError):
        FeatureConfig(fc_k=-1)


def test_config_round_trip():
    cfg = FeatureConfig(fc_k=2, fc_l=1, use_global=True, top_m_sentences=4)
    assert FeatureConfig.from_dict(cfg.to_dict()) == cfg


def _view(claim):
    return CandidateView(
        id=claim.id, ver_claim=claim.ver_claim, title=claim.title,
        body=claim.body, body_sentences=tuple(split_sentences(claim.body)),
    )


@pytest.fixture(scope="module")
def small_pool():
    claims = [
        VerifiedClaim(id="c0", ver_claim="taxes went up sharply",
                      title="taxes ruling", body="Taxes rose. It was sharp. Very sharp."),
        VerifiedClaim(id="c1", ver_claim="crime fell last year",
                      title="crime ruling", body="Crime fell."),
        VerifiedClaim(id="c2", ver_claim="jobs grew steadily",
                      title="jobs ruling", body=""),
    ]
    index = build_index(claims, TokenizerConfig())
    provider = HashedEmbedder(dim=128)
    return claims, index, provider


def test_base_similarities_layout(small_pool):
    claims, index, provider = small_pool
    v = base_similarities("taxes went up", _view(claims[0]), index, provider)
    assert v.shape == (9,)
    # BM25 channels: claim c0 shares terms in every field, so all positive
    assert all(v[i] > 0 for i in range(4))
    # ver_claim cosine should dominate the unrelated candidate's
    other = base_similarities("taxes went up", _view(claims[1]), index, provider)
    assert v[4] > other[4]
    # empty body → zero sentence channels
    empty_body = base_similarities("jobs grew", _view(claims[2]), index, provider)
    assert tuple(empty_body[6:9]) == (0.0, 0.0, 0.0)


def test_base_similarities_sentence_channels_descend(small_pool):
    claims, index, provider = small_pool
    v = base_similarities("taxes went up", _view(claims[0]), index, provider)
    assert v[6] >= v[7] >= v[8]


def test_similarity_matrix_stacks_rows(small_pool):
    claims, index, provider = small_pool
    views = [_view(c) for c in claims]
    m = similarity_matrix("taxes went up", views, index, provider)
    assert m.shape == (3, 9)
    for i, view in enumerate(views):
        row = base_similarities("taxes went up", view, index, provider)
        assert np.array_equal(m[i], row)
    assert similarity_matrix("q", [], index, provider).shape == (0, 9)


def test_reciprocal_ranks_brute_force_oracle():
    rng = rng_from_seed(4242)
    for _ in range(25):
        n = int(rng.integers(1, 12))
        ch = int(rng.integers(1, 5))
        sims = np.round(rng.normal(size=(n, ch)), 1)  # rounding forces ties
        ids = [f"c{int(i):02d}" for i in rng.permutation(n)]
        rr = reciprocal_ranks(sims, ids)
        for c in range(ch):
            pairs = sorted(zip(sims[:, c], ids, range(n)),
                           key=lambda t: (-t[0], t[1]))
            for rank, (_, _, i) in enumerate(pairs, start=1):
                assert rr[i, c] == 1.0 / rank


def test_reciprocal_ranks_tie_breaks_by_id():
    sims = np.array([[0.5], [0.5], [0.9]])
    rr = reciprocal_ranks(sims, ["cb", "ca", "cc"])
    assert rr[2, 0] == 1.0          # cc: highest sim
    assert rr[1, 0] == 1.0 / 2      # ca wins the tie by id
    assert rr[0, 0] == 1.0 / 3


def test_reciprocal_ranks_empty_pool_rejected():
    with pytest.raises(FeatureError):
        reciprocal_ranks(np.empty((0, 9)), [])


def test_reciprocal_ranks_channel_independence():
    rng = rng_from_seed(99)
    sims = rng.normal(size=(6, 3))
    ids = [f"c{i}" for i in range(6)]
    whole = reciprocal_ranks(sims, ids)
    for c in range(3):
        alone = reciprocal_ranks(sims[:, [c]], ids)
        assert np.array_equal(whole[:, c], alone[:, 0])


def test_base_vectors_layout(small_pool):
    claims, index, provider = small_pool
    views = [_view(c) for c in claims]
    sims = similarity_matrix("taxes went up", views, index, provider)
    vecs = base_vectors(sims, [v.id for v in views])
    assert vecs.shape == (3, 18)
    assert np.array_equal(vecs[:, :9], sims)
    rr = vecs[:, 9:]
    assert set(np.unique(rr)) <= {1.0, 0.5, 1.0 / 3}
    for c in range(9):
        assert sorted(rr[:, c], reverse=True) == [1.0, 0.5, 1.0 / 3]


# ---------------------------------------------------------------------------
# scaler


def test_scaler_maps_train_extremes_to_unit_interval():
    train = np.array([[0.0, 10.0], [4.0, 10.0], [2.0, 10.0]])
    params = fit_scaler(train)
    scaled = apply_scaler(params, train)
    assert scaled[:, 0].min() == -1.0 and scaled[:, 0].max() == 1.0
    assert np.all(scaled[:, 1] == 0.0)  # constant dim → 0
    mid = apply_scaler(params, np.array([2.0, 10.0]))
    assert mid[0] == 0.0


def test_scaler_clamps_out_of_range():
    params = fit_scaler(np.array([[0.0], [1.0]]))
    assert apply_scaler(params, np.array([5.0]))[0] == 1.0
    assert apply_scaler(params, np.array([-5.0]))[0] == -1.0


def test_scaler_monotone_within_span():
    rng = rng_from_seed(5)
    train = rng.normal(size=(30, 4))
    params = fit_scaler(train)
    lo, hi = train[:, 2].min(), train[:, 2].max()
    xs = np.linspace(lo, hi, 17)
    row = np.tile(train[0], (17, 1))
    row[:, 2] = xs
    out = apply_scaler(params, row)[:, 2]
    assert np.all(np.diff(out) >= 0)


def test_scaler_dim_mismatch_rejected():
    params = fit_scaler(np.ones((2, 3)))
    with pytest.raises(FeatureError, match="dims"):
        apply_scaler(params, np.ones(4))


def test_scaler_needs_data():
    with pytest.raises(FeatureError):
        fit_scaler(np.empty((0, 5)))


def test_scaler_round_trip():
    params = fit_scaler(np.array([[0.0, -2.0], [3.0, 7.0]]))
    back = ScalerParams.from_dict(params.to_dict())
    assert np.array_equal(back.mins, params.mins)
    assert np.array_equal(back.maxs, params.maxs)


@settings(max_examples=50)
@given(st.lists(st.lists(st.floats(-100, 100), min_size=3, max_size=3),
                min_size=2, max_size=20))
def test_scaler_output_always_in_unit_interval(rows):
    train = np.array(rows)
    params = fit_scaler(train)
    out = apply_scaler(params, train)
    assert np.all(out >= -1.0) and np.all(out <= 1.0)


# ---------------------------------------------------------------------------
# local-context concatenation


def test_fc_concat_shapes():
    center = np.arange(18.0)
    prev = [np.full(18, 2.0)] * 3
    nxt = [np.full(18, 3.0)]
    out = fc_concat(center, prev, nxt)
    assert out.shape == (90,)
    assert np.array_equal(out[:18], prev[0])
    assert np.array_equal(out[54:72], center)
    assert np.array_equal(out[72:], nxt[0])


def test_fc_concat_zero_padding_at_boundaries():
    center = np.ones(4)
    out = fc_concat(center, [None, np.full(4, 5.0)], [None])
    assert np.array_equal(out, np.concatenate(
        [np.zeros(4), np.full(4, 5.0), np.ones(4), np.zeros(4)]))


def test_fc_concat_identity_for_no_context():
    center = np.arange(5.0)
    assert np.array_equal(fc_concat(center, [], []), center)


def test_fc_concat_rejects_width_mismatch():
    with pytest.raises(FeatureError, match="dims"):
        fc_concat(np.ones(4), [np.ones(3)], [])


# ---------------------------------------------------------------------------
# final assembly


def test_assemble_without_global_is_identity():
    cfg = FeatureConfig(fc_k=1, fc_l=1)
    vec = np.arange(54.0)
    assert np.array_equal(assemble(vec, cfg), vec)


def test_assemble_appends_unscaled_triple():
    cfg = FeatureConfig(use_global=True)
    vec = np.zeros(18)
    out = assemble(vec, cfg, (0.8, 0.15, 0.05))
    assert out.shape == (21,)
    assert tuple(out[18:]) == (0.8, 0.15, 0.05)
    # the triple bypasses the scaler even though 0.8 > any scaled feature bound
    missing = assemble(vec, cfg, None)
    assert tuple(missing[18:]) == (0.0, 0.0, 0.0)


def test_assemble_checks_fc_width():
    cfg = FeatureConfig(fc_k=3, fc_l=1)
    with pytest.raises(FeatureError, match="90"):
        assemble(np.zeros(18), cfg)


def test_assemble_checks_triple_arity():
    cfg = FeatureConfig(use_global=True)
    with pytest.raises(FeatureError, match="3 values"):
        assemble(np.zeros(18), cfg, (0.5, 0.5))


def test_fc00_equals_base_all_the_way_through(small_pool):
    # FC(0,0) with no global must reproduce the scaled base vector exactly
    claims, index, provider = small_pool
    views = [_view(c) for c in claims]
    sims = similarity_matrix("taxes went up", views, index, provider)
    vecs = base_vectors(sims, [v.id for v in views])
    params = fit_scaler(vecs)
    scaled = apply_scaler(params, vecs)
    cfg = FeatureConfig(fc_k=0, fc_l=0)
    for row in scaled:
        assert np.array_equal(assemble(fc_concat(row, [], []), cfg), row)
