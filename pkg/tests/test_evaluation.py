from __future__ import annotations

import numpy as np
import pytest

from rumorgraph.evaluation import (
    ExperimentConfig,
    MetricsRow,
    auc_roc,
    chi2_sf,
    chi_square,
    chi_square_p,
    classification_metrics,
    confusion,
    discretize,
    entropy,
    feature_stats,
    feature_stats_table,
    fold_seed,
    gain_ratio,
    info_gain,
    kfold,
    macro_average,
    permutation_p,
    read_metrics_csv,
    run_experiment,
    write_artifacts,
    write_feature_stats,
)
from rumorgraph.gcn import GcnConfig
from rumorgraph.synth import homophily_dataset

from oracles import fuzz_case, metrics_by_loops, pairwise_auc


class TestFolds:
    def test_partition(self):
        y = np.array([0] * 80 + [1] * 20)
        folds = kfold(y, 5, seed=1)
        tests = np.concatenate([f.test_idx for f in folds])
        np.testing.assert_array_equal(np.sort(tests), np.arange(100))
        for f in folds:
            assert np.intersect1d(f.train_idx, f.test_idx).size == 0
            assert f.train_idx.size + f.test_idx.size == 100

    @pytest.mark.parametrize("n0, n1, k", [(80, 20, 5), (37, 11, 5), (101, 9, 3)])
    def test_stratified_proportions(self, n0, n1, k):
        y = np.array([0] * n0 + [1] * n1)
        for f in kfold(y, k, seed=4):
            expected = n1 * f.test_idx.size / y.size
            assert abs(y[f.test_idx].sum() - expected) <= 1

    def test_deterministic(self):
        y = np.arange(30) % 2
        a = kfold(y, 5, seed=9)
        b = kfold(y, 5, seed=9)
        for fa, fb in zip(a, b):
            np.testing.assert_array_equal(fa.test_idx, fb.test_idx)

    def test_unstratified(self):
        folds = kfold(np.zeros(10, dtype=int), 5, stratified=False)
        assert all(f.test_idx.size == 2 for f in folds)

    @pytest.mark.parametrize("y, k", [([0, 1, 0, 1], 1), ([0, 1], 3), ([0] * 10 + [1] * 2, 5)])
    def test_errors(self, y, k):
        with pytest.raises(ValueError):
            kfold(y, k)

    def test_fold_seed(self):
        assert fold_seed(1, 0) == fold_seed(1, 0)
        assert len({fold_seed(1, i) for i in range(5)}) == 5


class TestMetrics:
    def test_confusion(self):
        assert confusion([1, 1, 0, 0], [1, 0, 1, 0]) == (1, 1, 1, 1)

    def test_known_values(self):
        m = classification_metrics([1, 1, 1, 0], [1, 1, 0, 0])
        assert m.accuracy == 0.75
        assert m.precision == pytest.approx((2 / 3 + 1) / 2)
        assert m.recall == pytest.approx((1 + 0.5) / 2)
        assert m.micro_f1 == 0.75

    def test_fuzz_against_loops(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            pred, truth, _ = fuzz_case(rng)
            m = classification_metrics(pred, truth)
            np.testing.assert_allclose((m.accuracy, m.precision, m.recall, m.f1), metrics_by_loops(pred, truth), atol=1e-12, rtol=0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            classification_metrics([1], [1, 0])

    def test_macro_average_f1_consistent(self):
        rows = [classification_metrics([1, 0, 0], [1, 1, 0]), classification_metrics([1, 1, 0], [1, 0, 0])]
        m = macro_average(rows)
        assert m.f1 == pytest.approx(2 * m.precision * m.recall / (m.precision + m.recall))
        assert m.accuracy == pytest.approx(np.mean([r.accuracy for r in rows]))


class TestAuc:
    def test_fuzz_against_pairs(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            _, truth, scores = fuzz_case(rng)
            assert abs(auc_roc(scores, truth)[0] - pairwise_auc(scores, truth)) <= 1e-12

    def test_perfect_and_inverted(self):
        assert auc_roc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])[0] == 1.0
        assert auc_roc([0.9, 0.8, 0.2, 0.1], [0, 0, 1, 1])[0] == 0.0
        assert auc_roc([0.5] * 4, [0, 1, 0, 1])[0] == 0.5

    def test_curve_monotone_and_bounded(self):
        rng = np.random.default_rng(2)
        _, curve = auc_roc(rng.random(200).round(2), rng.integers(0, 2, 200))
        assert curve.fpr[0] == 0 and curve.tpr[0] == 0
        assert curve.fpr[-1] == 1 and curve.tpr[-1] == 1
        assert np.all(np.diff(curve.fpr) >= 0) and np.all(np.diff(curve.tpr) >= 0)

    def test_curve_area_equals_auc(self):
        rng = np.random.default_rng(3)
        s, y = rng.random(100).round(1), rng.integers(0, 2, 100)
        auc, curve = auc_roc(s, y)
        assert np.trapezoid(curve.tpr, curve.fpr) == pytest.approx(auc, abs=1e-12)

    def test_single_class(self):
        with pytest.raises(ValueError):
            auc_roc([0.1, 0.2], [1, 1])


class TestFeatureSelection:
    def test_discretize_small_cardinality(self):
        np.testing.assert_array_equal(discretize([5, 1, 5, 3]), [2, 0, 2, 1])

    def test_discretize_quantiles(self):
        codes = discretize(np.arange(100.0), bins=10)
        np.testing.assert_array_equal(np.bincount(codes), [10] * 10)

    def test_chi_square_reference(self):
        assert chi2_sf(3.84, 1) == pytest.approx(0.05, abs=1e-3)

    def test_perfect_dependence(self):
        y = np.array([0, 1] * 50)
        assert chi_square_p(y, y) < 1e-10

    def test_independent_table(self):
        f = np.array([0, 0, 1, 1] * 10)
        y = np.array([0, 1, 0, 1] * 10)
        stat, dof = chi_square(f, y)
        assert stat == 0.0 and dof == 1
        assert chi_square_p(f, y) == 1.0

    def test_degenerate_warns(self):
        with pytest.warns(RuntimeWarning, match="degenerate"):
            assert chi_square_p([1, 1, 1], [0, 1, 0]) == 1.0

    def test_info_gain_identities(self):
        y = np.array([0, 1, 1, 0, 1])
        assert info_gain(y, y) == pytest.approx(entropy(y))
        assert gain_ratio(y, y) == pytest.approx(1.0)
        assert info_gain(np.zeros(5), y) == 0.0
        assert gain_ratio(np.zeros(5), y) == 0.0

    def test_entropy_bits(self):
        assert entropy([0, 1]) == pytest.approx(1.0)

    def test_permutation_p_bounds(self):
        y = np.array([0, 1] * 20)
        obs, p = permutation_p(info_gain, y, y, permutations=99, seed=0)
        assert p == pytest.approx(1 / 100)

    def test_permutation_null_roughly_uniform(self):
        rng = np.random.default_rng(0)
        ps = []
        for t in range(50):
            f = rng.integers(0, 4, 60)
            y = rng.integers(0, 2, 60)
            ps.append(permutation_p(info_gain, f, y, permutations=200, seed=t)[1])
        assert 0.35 <= np.mean(ps) <= 0.65

    def test_table_pooled_rows(self, tmp_path):
        rng = np.random.default_rng(0)
        groups = {
            g: ({"a": rng.random(40), "b": rng.integers(0, 2, 40).astype(float)}, rng.integers(0, 2, 40))
            for g in ("x", "y")
        }
        rows = feature_stats_table(groups, permutations=20)
        assert [(r.scope, r.feature_name) for r in rows] == [
            ("x", "a"), ("x", "b"), ("y", "a"), ("y", "b"), ("pooled", "a"), ("pooled", "b"),
        ]
        single = feature_stats({"a": rng.random(40)}, rng.integers(0, 2, 40), permutations=20)
        assert len(single) == 1
        text = write_feature_stats(rows, tmp_path / "fs.csv").read_text()
        assert text.splitlines()[0] == "scope,feature,chi_square,chi_square_p,info_gain,info_gain_p,gain_ratio,gain_ratio_p"


@pytest.fixture(scope="module")
def result():
    ds = homophily_dataset(120, seed=0)
    cfg = ExperimentConfig(GcnConfig(epochs=60), k=3, seed=5)
    return ds, cfg, run_experiment(ds.adjacency(), ds.X, ds.y, cfg)


class TestExperiment:
    def test_rows(self, result):
        _, _, res = result
        assert set(res.results) == {"gcn", "mlp"}
        for r in res.results.values():
            assert len(r.folds) == 3 and isinstance(r.macro, MetricsRow)
            assert not np.isnan(r.oof_scores).any()

    def test_artifacts_deterministic(self, result, tmp_path):
        ds, cfg, res = result
        write_artifacts(res, tmp_path / "a")
        again = run_experiment(ds.adjacency(), ds.X, ds.y, cfg)
        write_artifacts(again, tmp_path / "b")
        for name in ("metrics.csv", "roc_gcn.csv", "roc_mlp.csv", "roc.svg", "cv_metrics.svg", "checkpoints/gcn_fold1.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        rows = read_metrics_csv(tmp_path / "a" / "metrics.csv")
        assert [r["fold"] for r in rows if r["model"] == "gcn"] == ["1", "2", "3", "macro"]

    def test_unknown_model(self, result):
        ds, _, _ = result
        with pytest.raises(ValueError):
            run_experiment(ds.adjacency(), ds.X, ds.y, ExperimentConfig(models=("svm",)))

    def test_size_mismatch(self, result):
        ds, _, _ = result
        with pytest.raises(ValueError):
            run_experiment(ds.adjacency(), ds.X[:-1], ds.y)
