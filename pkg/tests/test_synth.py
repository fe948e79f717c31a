from __future__ import annotations

import csv

import numpy as np
import pytest

from rumorgraph.ingest import Label, corpus_stats
from rumorgraph.synth import SynthSpec, feature_only_dataset, generate, homophily_dataset, write_ground_truth
from rumorgraph.weaklabel import build_user_profiles, label_replies, sentiment_report


class TestSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [{"rumor_fraction": 1.5}, {"homophily": -0.1}, {"replies_per_tweet_range": (3, 1)}, {"tweet_length_range": (1, 4)}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SynthSpec(**kwargs)


class TestGenerate:
    def test_deterministic(self):
        a = generate(SynthSpec(n_initiators=50, seed=3))
        b = generate(SynthSpec(n_initiators=50, seed=3))
        assert a.corpus == b.corpus and a.planted_labels == b.planted_labels
        assert generate(SynthSpec(n_initiators=50, seed=4)).corpus != a.corpus

    def test_rumor_fraction(self):
        res = generate(SynthSpec(n_initiators=2000, rumor_fraction=0.22, replies_per_tweet_range=(0, 1)))
        s = corpus_stats(res.corpus)
        assert abs(s.rumor_tweets - 440) <= 40
        assert abs(s.rumor_tweets / s.tweets - 0.22) <= 0.02

    def test_full_homophily_scores_are_extreme(self):
        res = generate(SynthSpec(n_initiators=100, homophily=1.0))
        for labs in res.planted_labels.values():
            n_r = sum(lab is Label.RUMOR for lab in labs)
            assert n_r in (0, len(labs))

    def test_zero_homophily_flips_reply_labels(self):
        res = generate(SynthSpec(n_initiators=40, homophily=0.0, seed=2))
        labels = label_replies(res.corpus)
        for (i, _), lab in labels.items():
            assert lab is res.corpus.records[i].rumor_label.opposite

    def test_verbatim_recovery_with_boundary(self):
        res = generate(SynthSpec(n_initiators=80, homophily=1.0, copy_dropout=0.0, boundary_users=3))
        profiles = build_user_profiles(res.corpus, label_replies(res.corpus))
        got = {p.user_id: p.spreader_class for p in profiles}
        assert got == res.ground_truth
        for b in ("b000000", "b000001", "b000002"):
            assert got[b] == 1
            assert next(p for p in profiles if p.user_id == b).intensity_score == 0.5

    def test_sentiment_tallies(self):
        res = generate(SynthSpec(n_initiators=60, reply_sentiment=True, seed=11))
        rep = sentiment_report(res.corpus)
        t = res.tallies
        polar_rumor = t["rumor_positive_replies"] + t["rumor_negative_replies"]
        assert rep["rumor"]["polar_replies"] == polar_rumor
        assert rep["rumor"]["positive"] == pytest.approx(100 * t["rumor_positive_replies"] / polar_rumor)

    def test_ground_truth_file(self, tmp_path):
        res = generate(SynthSpec(n_initiators=20))
        with write_ground_truth(res, tmp_path / "gt.csv").open() as f:
            rows = list(csv.DictReader(f))
        assert {r["user_id"]: int(r["class"]) for r in rows} == res.ground_truth


class TestGraphDatasets:
    def test_homophily_labels_follow_neighbours(self):
        ds = homophily_dataset(200, seed=1)
        A = ds.graph.adjacency().toarray() > 0
        agree = []
        for i in range(200):
            nb = ds.y[A[i]]
            if nb.size:
                agree.append((nb == ds.y[i]).mean())
        assert np.mean(agree) > 0.8
        assert ds.X.shape == (200, 8)

    def test_feature_only_rule(self):
        ds = feature_only_dataset(150, seed=2)
        np.testing.assert_array_equal(ds.y, (ds.X[:, 0] + 0.5 * ds.X[:, 1] > 0).astype(int))
        assert ds.adjacency().n == 150

    def test_deterministic(self):
        a, b = homophily_dataset(100, seed=3), homophily_dataset(100, seed=3)
        assert a.graph == b.graph
        np.testing.assert_array_equal(a.X, b.X)
