import numpy as np
import pytest

from stancebench.corpus import Post, StanceLabel
from stancebench.errors import ShapeError, ValidationError
from stancebench.features import FeatureVector
from stancebench.svm import (
    CascadeModel,
    LinearModel,
    SenSvm,
    SvmTrainConfig,
    TwoStepSvm,
    cascade_predict,
    cascade_train,
    decision_scores,
    feature_config_hash,
    hinge_objective,
    load_model,
    predict,
    predict_label,
    save_model,
    train_binary_pegasos,
    train_one_vs_rest,
)

STANCE = ("FAVOR", "AGAINST", "NONE")


def unit(i, dim=2):
    return FeatureVector((i,), (1.0,), dim)


@pytest.fixture
def separable():
    X, y = [], []
    for _ in range(20):
        X.append(unit(0))
        y.append("FAVOR")
        X.append(unit(1))
        y.append("AGAINST")
    return X, y


class TestPegasos:
    def test_separable_reaches_full_accuracy(self, separable):
        X, y = separable
        cfg = SvmTrainConfig(lambda_=0.01, epochs=200, seed=3)
        model = train_one_vs_rest(X, y, cfg)
        acc = np.mean([predict(model, x) == lab for x, lab in zip(X, y)])
        assert acc == 1.0

    def test_single_class_predicts_it_everywhere(self):
        X = [unit(0), unit(1), unit(0)]
        y = ["NONE", "NONE", "NONE"]
        model = train_one_vs_rest(X, y, SvmTrainConfig(epochs=20, seed=0))
        assert all(predict(model, x) == "NONE" for x in X)

    def test_zero_dimension_rejected(self):
        with pytest.raises(ShapeError):
            train_binary_pegasos(
                [FeatureVector((), (), 0)], np.array([1.0]), SvmTrainConfig()
            )

    def test_objective_decreases_from_zero_weights(self, separable):
        X, y = separable
        targets = np.array([1.0 if lab == "FAVOR" else -1.0 for lab in y])
        cfg = SvmTrainConfig(lambda_=0.01, epochs=50, seed=1)
        trace = []
        w, b = train_binary_pegasos(X, targets, cfg, objective_trace=trace)
        initial = hinge_objective(np.zeros(2), 0.0, X, targets, cfg.lambda_)
        final = hinge_objective(w, b, X, targets, cfg.lambda_)
        assert np.isfinite(final) and final <= initial == 1.0
        # per-epoch objective stays finite throughout training
        assert len(trace) == cfg.epochs
        assert all(np.isfinite(v) for v in trace)
        assert trace[-1] == final

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            train_binary_pegasos(
                [unit(0, 2), unit(1, 3)], np.array([1.0, -1.0]), SvmTrainConfig()
            )

    def test_duplicated_rows_give_same_predictions(self, separable):
        X, y = separable
        cfg_single = SvmTrainConfig(lambda_=0.01, epochs=100, seed=5)
        cfg_doubled = SvmTrainConfig(lambda_=0.01, epochs=50, seed=5)
        m1 = train_one_vs_rest(X, y, cfg_single)
        m2 = train_one_vs_rest(X + X, y + y, cfg_doubled)
        assert [predict(m1, x) for x in X] == [predict(m2, x) for x in X]


class TestPredict:
    def test_zero_weights_tie_breaks_to_first_class(self):
        model = LinearModel(STANCE, np.zeros((3, 2)), np.zeros(3))
        assert predict(model, unit(0)) == "FAVOR"
        assert predict_label(model, unit(0)) is StanceLabel.FAVOR

    def test_hand_set_weights(self):
        weights = np.array([[0.1, 0.0], [0.9, 0.0], [0.2, 0.0]])
        model = LinearModel(STANCE, weights, np.zeros(3))
        assert predict(model, unit(0)) == "AGAINST"

    def test_zero_vector_uses_biases(self):
        model = LinearModel(STANCE, np.zeros((3, 2)), np.array([0.0, 0.0, 0.7]))
        zero = FeatureVector((), (), 2)
        assert predict(model, zero) == "NONE"

    def test_dimension_mismatch_rejected(self):
        model = LinearModel(STANCE, np.zeros((3, 2)), np.zeros(3))
        with pytest.raises(ShapeError):
            predict(model, unit(0, dim=5))

    def test_argmax_invariant_under_positive_scaling(self, rng, separable):
        X, y = separable
        model = train_one_vs_rest(X, y, SvmTrainConfig(epochs=30, seed=2))
        for factor in (0.5, 3.0, 100.0):
            scaled = LinearModel(
                model.classes, model.weights * factor, model.bias * factor
            )
            assert [predict(model, x) for x in X] == [
                predict(scaled, x) for x in X
            ]


class TestOneVsRest:
    def test_three_separable_clusters(self):
        X, y = [], []
        for i, lab in enumerate(STANCE):
            for _ in range(10):
                X.append(unit(i, dim=3))
                y.append(lab)
        model = train_one_vs_rest(X, y, SvmTrainConfig(epochs=100, seed=0))
        assert all(predict(model, x) == lab for x, lab in zip(X, y))

    def test_absent_class_never_wins_on_train(self, separable):
        X, y = separable  # only FAVOR and AGAINST present
        model = train_one_vs_rest(X, y, SvmTrainConfig(epochs=100, seed=0))
        assert all(predict(model, x) != "NONE" for x in X)

    def test_unknown_label_rejected(self):
        with pytest.raises(ValidationError):
            train_one_vs_rest([unit(0)], ["WHAT"], SvmTrainConfig())


class TestCascade:
    def _fixture(self):
        # stage1 feature: column 0 high for relevant; stage2: column 1 high for FAVOR
        X1, X2, gold = [], [], []
        for _ in range(8):
            X1.append(FeatureVector((0,), (1.0,), 2))
            X2.append(FeatureVector((1,), (1.0,), 2))
            gold.append(StanceLabel.FAVOR)
            X1.append(FeatureVector((0,), (1.0,), 2))
            X2.append(FeatureVector((0,), (1.0,), 2))
            gold.append(StanceLabel.AGAINST)
            X1.append(FeatureVector((1,), (1.0,), 2))
            X2.append(FeatureVector((0, 1), (0.5, 0.5), 2))
            gold.append(StanceLabel.NONE)
        return X1, X2, gold

    def test_all_none_rejected(self):
        X = [unit(0), unit(1)]
        gold = [StanceLabel.NONE, StanceLabel.NONE]
        with pytest.raises(ValidationError, match="stage"):
            cascade_train(X, X, gold, SvmTrainConfig(epochs=5))

    def test_balanced_fixture_trains_both_stages(self):
        X1, X2, gold = self._fixture()
        model = cascade_train(X1, X2, gold, SvmTrainConfig(epochs=100, seed=1))
        assert model.stage1.classes == ("RELEVANT", "NONE")
        assert model.stage2.classes == ("FAVOR", "AGAINST")
        preds = [
            cascade_predict(model, x1, x2) for x1, x2 in zip(X1, X2)
        ]
        assert preds == gold

    def test_stage2_size_excludes_none(self):
        # HC-shaped training counts: stage 2 sees favor+against only
        X1, X2, gold = [], [], []
        for label, n in ((StanceLabel.FAVOR, 112), (StanceLabel.AGAINST, 361),
                         (StanceLabel.NONE, 166)):
            for _ in range(n):
                X1.append(unit(0))
                X2.append(unit(1))
                gold.append(label)
        relevant = [g for g in gold if g is not StanceLabel.NONE]
        assert len(relevant) == 473

    def test_stage1_none_is_terminal(self):
        stage1 = LinearModel(("RELEVANT", "NONE"), np.array([[0.0, 0.0], [5.0, 5.0]]),
                             np.zeros(2))
        stage2 = LinearModel(("FAVOR", "AGAINST"), np.array([[9.0, 9.0], [0.0, 0.0]]),
                             np.zeros(2))
        model = CascadeModel(stage1, stage2)
        assert cascade_predict(model, unit(0), unit(0)) is StanceLabel.NONE

    def test_stage2_margin_decides(self):
        stage1 = LinearModel(("RELEVANT", "NONE"), np.array([[5.0, 5.0], [0.0, 0.0]]),
                             np.zeros(2))
        stage2 = LinearModel(("FAVOR", "AGAINST"), np.array([[0.0, 0.0], [3.0, 3.0]]),
                             np.zeros(2))
        model = CascadeModel(stage1, stage2)
        assert cascade_predict(model, unit(0), unit(1)) is StanceLabel.AGAINST

    def test_zero_margins_tie_break(self):
        zeros1 = LinearModel(("RELEVANT", "NONE"), np.zeros((2, 2)), np.zeros(2))
        zeros2 = LinearModel(("FAVOR", "AGAINST"), np.zeros((2, 2)), np.zeros(2))
        model = CascadeModel(zeros1, zeros2)
        assert cascade_predict(model, unit(0), unit(0)) is StanceLabel.FAVOR

    def test_never_polar_after_stage1_none(self, rng):
        X1, X2, gold = self._fixture()
        model = cascade_train(X1, X2, gold, SvmTrainConfig(epochs=50, seed=2))
        for _ in range(200):
            idx = tuple(sorted(set(int(i) for i in rng.integers(0, 2, 2))))
            vals = tuple(float(v) for v in rng.uniform(0.1, 2.0, len(idx)))
            x1 = FeatureVector(idx, vals, 2)
            x2 = FeatureVector(idx, vals, 2)
            if predict(model.stage1, x1) == "NONE":
                assert cascade_predict(model, x1, x2) is StanceLabel.NONE


class TestSerialization:
    def test_roundtrip_and_hash_check(self, tmp_path, separable):
        X, y = separable
        model = train_one_vs_rest(
            X, y, SvmTrainConfig(epochs=20, seed=0),
            feature_hash=feature_config_hash(("bow",)),
        )
        path = tmp_path / "m.json"
        save_model(model, path)
        loaded = load_model(path, expected_feature_hash=feature_config_hash(("bow",)))
        assert np.array_equal(loaded.weights, model.weights)
        with pytest.raises(ValidationError):
            load_model(path, expected_feature_hash="different")

    def test_byte_identical_for_same_seed(self, tmp_path, separable):
        X, y = separable
        cfg = SvmTrainConfig(epochs=30, seed=9)
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_model(train_one_vs_rest(X, y, cfg), p1)
        save_model(train_one_vs_rest(X, y, cfg), p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestHighLevelModels:
    def _posts(self, topic="MMR"):
        posts = []
        texts = {
            StanceLabel.FAVOR: [
                "vaccines clearly cause autism in children",
                "studies prove the vaccine autism link is real",
                "my child changed after the mmr vaccine",
                "autism rates rose with vaccination rates",
            ],
            StanceLabel.AGAINST: [
                "no credible study links vaccines and autism",
                "the vaccine autism myth was debunked long ago",
                "science shows vaccines are safe for children",
                "large trials found no autism association at all",
            ],
            StanceLabel.NONE: [
                "the clinic opens at nine tomorrow",
                "many parents ask their doctor questions",
                "the article reviews recent health news",
                "a new hospital wing opened downtown",
            ],
        }
        i = 0
        for label, rows in texts.items():
            for text in rows:
                posts.append(Post(f"m{i:03d}", topic, text, label))
                i += 1
        return posts

    def test_sen_svm_fits_and_predicts(self):
        posts = self._posts()
        model = SenSvm("MMR", SvmTrainConfig(epochs=150, seed=4)).fit(posts)
        preds = [model.predict(p) for p in posts]
        acc = np.mean([p is q.gold for p, q in zip(preds, posts)])
        assert acc >= 0.9  # training accuracy on a tiny separable fixture

    def test_twostep_svm_fits_and_predicts(self):
        posts = self._posts()
        model = TwoStepSvm("MMR", SvmTrainConfig(epochs=150, seed=4)).fit(posts)
        preds = [model.predict(p) for p in posts]
        assert all(isinstance(p, StanceLabel) for p in preds)
