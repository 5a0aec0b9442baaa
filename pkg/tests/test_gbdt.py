"""Boosted-tree trainer: splits, leaves, determinism, model file round-trip."""

import math

import numpy as np
import pytest

from commbench import (
    DataError,
    GBDTParams,
    LabeledDataset,
    TreeEnsemble,
    load_model,
    predict,
    save_model,
    train_gbdt,
)
from commbench.gbdt import (
    LEAF_CLIP,
    RegressionTree,
    fit_regression_tree,
    log_loss,
    seed_entropy,
)

FAST = GBDTParams(
    learning_rate=0.5, n_trees=30, min_samples_split=2, subsample=1.0, max_depth=2
)


def dataset_from(X, raw_labels):
    classes = sorted(set(raw_labels))
    index = {c: k for k, c in enumerate(classes)}
    return LabeledDataset(
        features=np.asarray(X, dtype=np.float64),
        labels=np.array([index[c] for c in raw_labels], dtype=np.int64),
        classes=classes,
        rows=list(range(len(raw_labels))),
    )


def binary_feature_data(rows_per_class=20):
    X = [[0.0]] * rows_per_class + [[1.0]] * rows_per_class
    y = ["no"] * rows_per_class + ["yes"] * rows_per_class
    return dataset_from(X, y)


class TestParams:
    def test_defaults(self):
        p = GBDTParams()
        assert (p.learning_rate, p.n_trees, p.min_samples_split) == (0.005, 1000, 5)
        assert (p.subsample, p.max_depth, p.seed) == (0.4, 3, 0)
        p.validate()

    @pytest.mark.parametrize(
        "kwargs, message",
        [
            (dict(learning_rate=0.0), "learning_rate"),
            (dict(learning_rate=-0.1), "learning_rate"),
            (dict(n_trees=0), "n_trees"),
            (dict(min_samples_split=1), "min_samples_split"),
            (dict(subsample=0.0), "subsample"),
            (dict(subsample=1.1), "subsample"),
            (dict(max_depth=0), "max_depth"),
        ],
    )
    def test_validation_errors(self, kwargs, message):
        with pytest.raises(ValueError, match=message):
            GBDTParams(**kwargs).validate()

    def test_subsample_one_is_allowed(self):
        GBDTParams(subsample=1.0).validate()


class TestTraining:
    def test_single_observed_class_needs_no_trees(self):
        data = dataset_from([[0.0], [1.0], [0.5]], ["only"] * 3)
        model = train_gbdt(data, FAST)
        assert model.trees == [[]]
        assert model.predict(np.array([[9.0], [-3.0]])) == ["only", "only"]

    def test_empty_dataset_rejected(self):
        data = LabeledDataset(
            features=np.zeros((0, 2)),
            labels=np.zeros(0, dtype=np.int64),
            classes=["a", "b"],
            rows=[],
        )
        with pytest.raises(DataError, match="empty dataset"):
            train_gbdt(data, FAST)

    def test_priors_are_log_class_frequencies(self):
        data = dataset_from([[0.0]] * 3 + [[1.0]], ["a", "a", "a", "b"])
        model = train_gbdt(data, GBDTParams(n_trees=1, subsample=1.0))
        assert model.priors == pytest.approx([math.log(0.75), math.log(0.25)])

    def test_learns_binary_separable_data(self):
        data = binary_feature_data()
        model = train_gbdt(data, FAST)
        assert model.predict(data.features) == ["no"] * 20 + ["yes"] * 20
        assert model.predict(np.array([[0.0], [1.0]])) == ["no", "yes"]

    def test_learns_three_one_hot_classes(self):
        X, y = [], []
        for k, name in enumerate(["left", "mid", "right"]):
            row = [0.0, 0.0, 0.0]
            row[k] = 1.0
            X += [row] * 10
            y += [name] * 10
        model = train_gbdt(dataset_from(X, y), FAST)
        assert model.predict(np.eye(3)) == ["left", "mid", "right"]

    def test_continuous_split_uses_midpoint(self):
        data = dataset_from([[0.1], [0.2], [0.9], [1.1]], ["lo", "lo", "hi", "hi"])
        model = train_gbdt(data, FAST)
        first = model.trees[0][0]
        assert first.feature[0] == 0
        assert first.threshold[0] == pytest.approx((0.2 + 0.9) / 2)
        assert model.predict(np.array([[0.0], [2.0]])) == ["lo", "hi"]

    def test_training_reduces_log_loss(self):
        data = binary_feature_data()
        model = train_gbdt(data, FAST)
        prior_scores = np.tile(model.priors, (len(data.labels), 1))
        assert log_loss(model.decision_scores(data.features), data.labels) < log_loss(
            prior_scores, data.labels
        )

    def test_max_depth_bounds_split_count(self):
        data = binary_feature_data()
        model = train_gbdt(
            data, GBDTParams(n_trees=8, subsample=1.0, max_depth=1, min_samples_split=2)
        )
        for sequence in model.trees:
            for tree in sequence:
                splits = sum(1 for f in tree.feature if f >= 0)
                assert splits <= 1

    def test_min_samples_split_blocks_all_splits(self):
        data = binary_feature_data(rows_per_class=5)
        model = train_gbdt(
            data, GBDTParams(n_trees=4, subsample=1.0, min_samples_split=11)
        )
        for sequence in model.trees:
            for tree in sequence:
                assert tree.feature == [-1]

    def test_same_seed_same_model_bytes(self, tmp_path):
        data = binary_feature_data()
        params = GBDTParams(n_trees=12, subsample=0.5, seed=42)
        a, b = tmp_path / "a.model", tmp_path / "b.model"
        save_model(train_gbdt(data, params), a)
        save_model(train_gbdt(data, params), b)
        assert a.read_bytes() == b.read_bytes()

    def test_tie_split_prefers_lowest_feature(self):
        # two identical perfectly separating columns: gains tie exactly
        X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
        g = np.array([-0.5, -0.5, 0.5, 0.5])
        h = np.full(4, 0.25)
        tree = fit_regression_tree(
            X, g, h, np.arange(4), FAST, np.array([0, 1]), np.array([], dtype=int)
        )
        assert tree.feature[0] == 0


class TestLeavesAndTrees:
    def test_leaf_values_clipped(self):
        X = np.zeros((1, 1))
        params = GBDTParams(min_samples_split=2)
        for gradient, expected in [(100.0, LEAF_CLIP), (-100.0, -LEAF_CLIP)]:
            tree = fit_regression_tree(
                X,
                np.array([gradient]),
                np.array([0.0]),
                np.array([0]),
                params,
                np.array([], dtype=int),
                np.array([0]),
            )
            assert tree.value[0] == expected

    def test_newton_leaf_value(self):
        tree = fit_regression_tree(
            np.zeros((2, 1)),
            np.array([0.3, 0.1]),
            np.array([0.2, 0.2]),
            np.arange(2),
            GBDTParams(min_samples_split=5),
            np.array([], dtype=int),
            np.array([0]),
        )
        assert tree.value[0] == pytest.approx(0.4 / 0.4, rel=1e-9)

    def test_constant_column_cannot_split(self):
        # all rows share one feature value, so no cut exists on either kind
        tree = fit_regression_tree(
            np.full((6, 1), 3.5),
            np.array([1.0, -1.0] * 3),
            np.full(6, 0.25),
            np.arange(6),
            GBDTParams(min_samples_split=2),
            np.array([], dtype=int),
            np.array([0]),
        )
        assert tree.feature == [-1]

    def test_empty_tree_predicts_zero(self):
        tree = RegressionTree()
        assert tree.predict(np.zeros((3, 2))).tolist() == [0.0, 0.0, 0.0]


class TestPrediction:
    def test_argmax_tie_takes_first_class(self):
        model = TreeEnsemble(
            classes=["alpha", "beta"],
            priors=np.zeros(2),
            learning_rate=0.1,
            n_features=1,
            trees=[[], []],
        )
        assert predict(model, np.array([[0.0]])) == ["alpha"]

    def test_feature_width_mismatch(self):
        data = binary_feature_data(rows_per_class=5)
        model = train_gbdt(data, GBDTParams(n_trees=1, subsample=1.0))
        with pytest.raises(DataError, match="feature width mismatch"):
            model.predict(np.zeros((2, 3)))
        with pytest.raises(DataError, match="feature width mismatch"):
            model.predict(np.zeros(4))


class TestModelFile:
    def test_round_trip_preserves_scores_exactly(self, tmp_path):
        data = binary_feature_data()
        model = train_gbdt(data, GBDTParams(n_trees=10, subsample=0.5, seed=3))
        path = tmp_path / "model.txt"
        save_model(model, path)
        back = load_model(path)
        assert back.classes == model.classes
        assert back.n_features == model.n_features
        assert back.learning_rate == model.learning_rate
        assert np.array_equal(back.priors, model.priors)
        grid = np.array([[0.0], [1.0], [0.5]])
        assert np.array_equal(back.decision_scores(grid), model.decision_scores(grid))
        assert back.predict(data.features) == model.predict(data.features)

    def test_unsupported_version_rejected(self, tmp_path):
        path = tmp_path / "bad.model"
        path.write_text("commbench-gbdt 99\n")
        with pytest.raises(DataError, match="unsupported model version"):
            load_model(path)

    def test_wrong_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.model"
        path.write_text("something else\n")
        with pytest.raises(DataError, match="expected"):
            load_model(path)

    def test_truncated_file_rejected(self, tmp_path):
        data = binary_feature_data(rows_per_class=5)
        model = train_gbdt(data, GBDTParams(n_trees=2, subsample=1.0))
        path = tmp_path / "model.txt"
        save_model(model, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-3]) + "\n")
        with pytest.raises(DataError, match="expected"):
            load_model(path)

    def test_bad_node_line_rejected(self, tmp_path):
        path = tmp_path / "bad.model"
        path.write_text(
            "commbench-gbdt 1\n"
            "learning_rate 0.1\n"
            "n_features 1\n"
            "n_classes 2\n"
            "class a\nclass b\n"
            "prior -0.5\nprior -0.5\n"
            "ensemble 0 trees 1\n"
            "tree nodes 1\n"
            "branch 0 0.5 1 2\n"
        )
        with pytest.raises(DataError, match="bad node line"):
            load_model(path)


class TestHelpers:
    def test_log_loss_uniform_binary(self):
        assert log_loss(np.zeros((4, 2)), np.zeros(4, dtype=int)) == pytest.approx(
            math.log(2)
        )

    def test_log_loss_confident_correct_is_small(self):
        scores = np.array([[10.0, -10.0], [10.0, -10.0]])
        assert log_loss(scores, np.zeros(2, dtype=int)) < 1e-6

    def test_seed_entropy_is_non_negative(self):
        values = seed_entropy(-1, 0, 2**70, 123)
        assert all(0 <= v < 2**63 for v in values)
        assert values[1] == 0 and values[3] == 123
