"""Linear SVM training by stochastic subgradient descent (Pegasos).

Covers binary training, one-vs-rest multiclass over the fixed stance
class order, and the two-step relevance-then-polarity cascade.  Feature
vectors are L2-normalized per instance before training and prediction,
which keeps hinge-loss steps well scaled across feature sets.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import CLASS_ORDER, Post, StanceLabel
from .errors import ShapeError, ValidationError
from .features import FeatureVector, FeaturePipeline, PostView, make_view
from .preprocess import (
    NormalizationLexicon,
    PreprocessConfig,
    load_default_normalization,
    load_default_frequency_table,
    load_default_stopwords,
)

STANCE_CLASSES = tuple(label.value for label in CLASS_ORDER)
RELEVANCE_CLASSES = ("RELEVANT", "NONE")
POLARITY_CLASSES = ("FAVOR", "AGAINST")

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class SvmTrainConfig:
    """Pegasos hyperparameters.

    `gamma` mirrors the published configuration for kernel width; the
    linear path ignores it but keeps it for config parity.
    """

    lambda_: float = 0.01
    epochs: int = 100
    seed: int = 0
    gamma: float = 0.001
    class_weighting: bool = False

    def __post_init__(self):
        if self.lambda_ <= 0:
            raise ValidationError(f"lambda must be positive, got {self.lambda_}")
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")


@dataclass
class LinearModel:
    """Per-class weight vectors plus biases; argmax ties go to the first class."""

    classes: tuple[str, ...]
    weights: np.ndarray  # (n_classes, dim)
    bias: np.ndarray  # (n_classes,)
    feature_hash: str = ""

    def __post_init__(self):
        if self.weights.shape[0] != len(self.classes):
            raise ShapeError("one weight row per class required")
        if self.bias.shape != (len(self.classes),):
            raise ShapeError("one bias per class required")
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ValidationError("model weights must be finite")

    @property
    def dimension(self) -> int:
        return self.weights.shape[1]


def _normalized_arrays(x: FeatureVector) -> tuple[np.ndarray, np.ndarray]:
    idx = np.asarray(x.indices, dtype=np.int64)
    vals = np.asarray(x.values, dtype=np.float64)
    norm = np.sqrt((vals * vals).sum())
    if norm > 0:
        vals = vals / norm
    return idx, vals


def _check_dim(x: FeatureVector, dim: int) -> None:
    if x.dimension != dim:
        raise ShapeError(f"feature dimension {x.dimension} != model dimension {dim}")


def hinge_objective(
    w: np.ndarray, b: float, X: list[FeatureVector], y: np.ndarray, lambda_: float
) -> float:
    """(lambda/2)||w||^2 + mean hinge loss, on normalized features."""
    total = 0.0
    for x, target in zip(X, y):
        idx, vals = _normalized_arrays(x)
        margin = target * (w[idx] @ vals + b)
        total += max(0.0, 1.0 - margin)
    return 0.5 * lambda_ * float(w @ w) + total / len(X)


def train_binary_pegasos(
    X: list[FeatureVector],
    y: np.ndarray,
    cfg: SvmTrainConfig,
    sample_weights: np.ndarray | None = None,
    objective_trace: list[float] | None = None,
) -> tuple[np.ndarray, float]:
    """Train one binary hinge classifier; y entries must be +1/-1.

    When `objective_trace` is supplied, the regularized objective is
    evaluated and appended after every epoch.
    """
    if len(X) == 0:
        raise ValidationError("training set is empty")
    if len(X) != len(y):
        raise ShapeError(f"{len(X)} feature rows vs {len(y)} labels")
    dim = X[0].dimension
    if dim < 1:
        raise ShapeError("zero-dimension features")
    for x in X:
        _check_dim(x, dim)
    prepared = [_normalized_arrays(x) for x in X]
    if sample_weights is None:
        sample_weights = np.ones(len(X))
    rng = np.random.default_rng(cfg.seed)
    w = np.zeros(dim)
    b = 0.0
    t = 0
    for _ in range(cfg.epochs):
        for i in rng.permutation(len(X)):
            t += 1
            eta = 1.0 / (cfg.lambda_ * t)
            idx, vals = prepared[i]
            margin = y[i] * (float(w[idx] @ vals) + b)
            w *= 1.0 - eta * cfg.lambda_
            if margin < 1.0:
                step = eta * y[i] * sample_weights[i]
                w[idx] += step * vals
                b += step
        if objective_trace is not None:
            objective_trace.append(hinge_objective(w, b, X, y, cfg.lambda_))
    return w, b


def train_one_vs_rest(
    X: list[FeatureVector],
    y: list[str],
    cfg: SvmTrainConfig,
    classes: tuple[str, ...] = STANCE_CLASSES,
    feature_hash: str = "",
) -> LinearModel:
    """One binary Pegasos per class; scores are raw margins."""
    unknown = set(y) - set(classes)
    if unknown:
        raise ValidationError(f"labels outside class set: {sorted(unknown)}")
    if len(X) != len(y):
        raise ShapeError(f"{len(X)} feature rows vs {len(y)} labels")
    weights = []
    biases = []
    sample_weights = None
    if cfg.class_weighting:
        counts = {c: max(1, sum(1 for lab in y if lab == c)) for c in classes}
        total = len(y)
        per_label = {c: total / (len(classes) * counts[c]) for c in classes}
        sample_weights = np.array([per_label[lab] for lab in y])
    for k, cls in enumerate(classes):
        targets = np.array([1.0 if lab == cls else -1.0 for lab in y])
        col_cfg = SvmTrainConfig(
            lambda_=cfg.lambda_,
            epochs=cfg.epochs,
            seed=int(np.random.SeedSequence([cfg.seed, k]).generate_state(1)[0]),
            gamma=cfg.gamma,
            class_weighting=cfg.class_weighting,
        )
        w, b = train_binary_pegasos(X, targets, col_cfg, sample_weights)
        weights.append(w)
        biases.append(b)
    return LinearModel(
        classes=classes,
        weights=np.vstack(weights),
        bias=np.array(biases),
        feature_hash=feature_hash,
    )


def decision_scores(model: LinearModel, x: FeatureVector) -> np.ndarray:
    _check_dim(x, model.dimension)
    idx, vals = _normalized_arrays(x)
    return model.weights[:, idx] @ vals + model.bias


def predict(model: LinearModel, x: FeatureVector) -> str:
    """Argmax class name; ties break toward the earliest class."""
    scores = decision_scores(model, x)
    return model.classes[int(np.argmax(scores))]


def predict_label(model: LinearModel, x: FeatureVector) -> StanceLabel:
    return StanceLabel(predict(model, x))


@dataclass
class CascadeModel:
    """Stage 1 separates NONE from relevant posts; stage 2 splits FAVOR/AGAINST."""

    stage1: LinearModel
    stage2: LinearModel


def cascade_train(
    stage1_X: list[FeatureVector],
    stage2_X: list[FeatureVector],
    gold: list[StanceLabel],
    cfg: SvmTrainConfig,
) -> CascadeModel:
    """Train both stages; stage 2 sees only the non-NONE subset."""
    if not (len(stage1_X) == len(stage2_X) == len(gold)):
        raise ShapeError("stage features and labels must align")
    y1 = ["NONE" if lab is StanceLabel.NONE else "RELEVANT" for lab in gold]
    if "NONE" not in y1 or "RELEVANT" not in y1:
        raise ValidationError(
            "stage1 needs both NONE and relevant training instances"
        )
    relevant = [i for i, lab in enumerate(gold) if lab is not StanceLabel.NONE]
    if not relevant:
        raise ValidationError("stage2 has no FAVOR/AGAINST training instances")
    stage1 = train_one_vs_rest(stage1_X, y1, cfg, classes=RELEVANCE_CLASSES)
    stage2 = train_one_vs_rest(
        [stage2_X[i] for i in relevant],
        [gold[i].value for i in relevant],
        cfg,
        classes=POLARITY_CLASSES,
    )
    return CascadeModel(stage1=stage1, stage2=stage2)


def cascade_predict(
    model: CascadeModel, x1: FeatureVector, x2: FeatureVector
) -> StanceLabel:
    """Stage-1 NONE is terminal; otherwise stage 2 decides the polarity."""
    if predict(model.stage1, x1) == "NONE":
        return StanceLabel.NONE
    return StanceLabel(predict(model.stage2, x2))


def feature_config_hash(feature_names, extra: dict | None = None) -> str:
    payload = {"features": list(feature_names), "extra": extra or {}}
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def save_model(model: LinearModel, path: str | Path) -> None:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "classes": list(model.classes),
        "dimension": model.dimension,
        "weights": model.weights.tolist(),
        "bias": model.bias.tolist(),
        "feature_hash": model.feature_hash,
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path, expected_feature_hash: str | None = None) -> LinearModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported model format version {doc.get('format_version')!r}"
        )
    model = LinearModel(
        classes=tuple(doc["classes"]),
        weights=np.array(doc["weights"], dtype=np.float64),
        bias=np.array(doc["bias"], dtype=np.float64),
        feature_hash=doc.get("feature_hash", ""),
    )
    if expected_feature_hash is not None and model.feature_hash != expected_feature_hash:
        raise ValidationError(
            f"model was trained with feature config {model.feature_hash!r}, "
            f"expected {expected_feature_hash!r}"
        )
    return model


class SenSvm:
    """Stance classifier with stance-vector, sentiment, and BoW features."""

    def __init__(self, topic: str, cfg: SvmTrainConfig, preprocess: PreprocessConfig | None = None):
        self.topic = topic
        self.cfg = cfg
        self.preprocess = preprocess or PreprocessConfig(
            stopword_list=load_default_stopwords()
        )
        self._lex = load_default_normalization()
        self._freq = load_default_frequency_table()
        self.pipeline = FeaturePipeline(
            ("stance_vector", "sentiment", "bow"), topic=topic
        )
        self.model: LinearModel | None = None

    def _view(self, post: Post) -> PostView:
        return make_view(post, self.preprocess, lex=self._lex, freq=self._freq)

    def fit(self, posts: list[Post]) -> "SenSvm":
        views = [self._view(p) for p in posts]
        self.pipeline.fit(views)
        X = [self.pipeline.transform(v) for v in views]
        y = [p.gold.value for p in posts]
        self.model = train_one_vs_rest(
            X, y, self.cfg, feature_hash=feature_config_hash(self.pipeline.feature_names)
        )
        return self

    def predict(self, post: Post) -> StanceLabel:
        if self.model is None:
            raise ValidationError("model not trained")
        return predict_label(self.model, self.pipeline.transform(self._view(post)))


class TwoStepSvm:
    """Relevance-then-polarity cascade with its published per-stage features."""

    def __init__(self, topic: str, cfg: SvmTrainConfig, preprocess: PreprocessConfig | None = None):
        self.topic = topic
        self.cfg = cfg
        stopwords = load_default_stopwords()
        self.preprocess = preprocess or PreprocessConfig(stopword_list=stopwords)
        self._lex = load_default_normalization()
        self._freq = load_default_frequency_table()
        self.stage1_pipeline = FeaturePipeline(("subjectivity", "surface"), topic=topic)
        self.stage2_pipeline = FeaturePipeline(
            ("subjectivity", "word_ngrams", "char_ngrams", "target_presence"),
            topic=topic,
            stopwords=stopwords,
        )
        self.model: CascadeModel | None = None

    def _view(self, post: Post) -> PostView:
        return make_view(post, self.preprocess, lex=self._lex, freq=self._freq)

    def fit(self, posts: list[Post]) -> "TwoStepSvm":
        views = [self._view(p) for p in posts]
        self.stage1_pipeline.fit(views)
        self.stage2_pipeline.fit(views)
        X1 = [self.stage1_pipeline.transform(v) for v in views]
        X2 = [self.stage2_pipeline.transform(v) for v in views]
        self.model = cascade_train(X1, X2, [p.gold for p in posts], self.cfg)
        return self

    def predict(self, post: Post) -> StanceLabel:
        if self.model is None:
            raise ValidationError("model not trained")
        view = self._view(post)
        return cascade_predict(
            self.model,
            self.stage1_pipeline.transform(view),
            self.stage2_pipeline.transform(view),
        )
