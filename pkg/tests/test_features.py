from __future__ import annotations

import numpy as np
import pytest

from rumorgraph.features import (
    EMBEDDING_DIM,
    USER_COLUMNS,
    EmbeddingProvider,
    FeatureMatrix,
    assemble,
    build_features,
    embed_text,
    embed_user,
    read_features_csv,
    reply_counts,
    standardize,
    user_feature_block,
    user_importance,
    write_features_csv,
)
from rumorgraph.textprep import clean_and_tokenize
from rumorgraph.weaklabel import build_user_profiles, label_replies


class TestEmbeddings:
    def test_hash_random_deterministic(self):
        a = EmbeddingProvider.hash_random(16, seed=1).vector("police")
        b = EmbeddingProvider.hash_random(16, seed=1).vector("police")
        c = EmbeddingProvider.hash_random(16, seed=2).vector("police")
        np.testing.assert_array_equal(a, b)
        assert not np.allclose(a, c)
        assert a.shape == (16,)

    def test_from_file_with_header(self, tmp_path):
        p = tmp_path / "v.txt"
        p.write_text("2 3\ncat 1 0 0\ndog 0 1 0\n", encoding="utf-8")
        prov = EmbeddingProvider.from_file(p)
        assert prov.dimension == 3 and prov.mode == "file"
        assert "cat" in prov and "bird" not in prov
        np.testing.assert_array_equal(embed_text(["cat", "dog", "bird"], prov), [0.5, 0.5, 0.0])

    def test_from_file_ragged(self, tmp_path):
        p = tmp_path / "v.txt"
        p.write_text("cat 1 0 0\ndog 0 1\n", encoding="utf-8")
        with pytest.raises(ValueError, match=":2:"):
            EmbeddingProvider.from_file(p)

    def test_unknown_words_zero(self, tmp_path):
        prov = EmbeddingProvider(3, {"cat": np.ones(3)})
        np.testing.assert_array_equal(embed_text(["zebra"], prov), np.zeros(3))

    def test_user_is_mean_of_tweets(self):
        prov = EmbeddingProvider(2, {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])})
        np.testing.assert_allclose(embed_user([["a"], ["a", "b"]], prov), [0.75, 0.25])
        with pytest.raises(ValueError):
            embed_user([], prov)


class TestUserImportance:
    def test_counts_exclude_self_replies(self, small_corpus):
        counts = reply_counts(small_corpus)
        assert counts == {"u1": 2, "u2": 0, "u3": 0, "u4": 2}

    def test_normalised(self):
        imp = user_importance({"a": 3, "b": 1, "c": 0})
        assert imp == {"a": 0.75, "b": 0.25, "c": 0.0}
        assert user_importance({"a": 0}) == {"a": 0.0}


class TestAssemble:
    def test_shape_and_columns(self, small_corpus):
        profiles = build_user_profiles(small_corpus, label_replies(small_corpus))
        m = build_features(small_corpus, profiles, EmbeddingProvider.hash_random(), clean_and_tokenize)
        assert m.shape == (4, EMBEDDING_DIM + 4)
        assert m.column_names[-4:] == USER_COLUMNS
        assert m.user_ids == ("u1", "u2", "u3", "u4")
        np.testing.assert_array_equal(m.column("followers"), [10, 1, 1, 10])
        np.testing.assert_allclose(m.column("user_imp"), [0.5, 0, 0, 0.5])
        assert user_feature_block(m).shape == (4, 4)

    def test_missing_embedding(self, small_corpus):
        profiles = build_user_profiles(small_corpus, label_replies(small_corpus))
        with pytest.raises(KeyError, match="embeddings missing for u1"):
            assemble(profiles, {}, {p.user_id: 0.0 for p in profiles})


class TestStandardize:
    def test_zscores_on_fit_rows(self):
        X = np.array([[1.0, 5.0], [3.0, 5.0], [100.0, 7.0]])
        m = standardize(FeatureMatrix(X, ("a", "b", "c"), ("x", "y")), fit_rows=[0, 1])
        np.testing.assert_allclose(m.values[:, 0], [-1.0, 1.0, 98.0])
        np.testing.assert_array_equal(m.values[:, 1], [0.0, 0.0, 0.0])

    def test_all_rows_default(self):
        X = np.random.default_rng(0).normal(3, 2, size=(50, 3))
        v = standardize(FeatureMatrix(X, tuple(map(str, range(50))), ("a", "b", "c"))).values
        np.testing.assert_allclose(v.mean(axis=0), 0, atol=1e-12)
        np.testing.assert_allclose(v.std(axis=0), 1, atol=1e-12)

    def test_no_fit_rows(self):
        with pytest.raises(ValueError):
            standardize(FeatureMatrix(np.ones((2, 2)), ("a", "b"), ("x", "y")), fit_rows=[])


class TestCsv:
    def test_roundtrip_exact(self, tmp_path):
        X = np.random.default_rng(1).normal(size=(3, 2))
        m = FeatureMatrix(X, ("a", "b", "c"), ("x", "y"))
        back = read_features_csv(write_features_csv(m, tmp_path / "f.csv"))
        np.testing.assert_array_equal(back.values, X)
        assert back.user_ids == m.user_ids and back.column_names == m.column_names
