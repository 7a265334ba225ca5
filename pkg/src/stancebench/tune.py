"""Hyperparameter grid search by 5-fold cross-validation on the
training split only.

A `SplitAccessRecorder` wraps the dataset and records which splits a
procedure touched, so runs can assert that tuning never saw test data.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .corpus import CLASS_ORDER, Post, TopicDataset
from .errors import ConfigError, ValidationError
from .evaluation import official_metric
from .svm import SenSvm, SvmTrainConfig, TwoStepSvm


class SplitAccessRecorder:
    """Proxy over a TopicDataset that logs train/test accesses."""

    def __init__(self, dataset: TopicDataset):
        self._dataset = dataset
        self.accessed: set[str] = set()

    @property
    def topic(self) -> str:
        return self._dataset.topic

    @property
    def train(self) -> list[Post]:
        self.accessed.add("train")
        return self._dataset.train

    @property
    def test(self) -> list[Post]:
        self.accessed.add("test")
        return self._dataset.test


def stratified_folds(posts: list[Post], k: int, seed: int = 0) -> list[list[Post]]:
    """Deterministic k folds with per-class round-robin assignment."""
    if k < 2:
        raise ConfigError(f"need at least 2 folds, got {k}")
    if len(posts) < k:
        raise ValidationError(f"{len(posts)} posts cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    folds: list[list[Post]] = [[] for _ in range(k)]
    slot = 0
    for label in CLASS_ORDER:
        group = sorted((p for p in posts if p.gold is label), key=lambda p: p.id)
        order = rng.permutation(len(group))
        for i in order:
            folds[slot % k].append(group[i])
            slot += 1
    return folds


@dataclass
class TuneResult:
    model_name: str
    topic: str
    best_params: dict
    best_score: float
    results: list[tuple[dict, float | None]] = field(default_factory=list)
    splits_accessed: set[str] = field(default_factory=set)


def grid_search_svm(
    recorder: SplitAccessRecorder,
    model_name: str,
    grid: dict[str, list],
    folds: int = 5,
    seed: int = 0,
) -> TuneResult:
    """Exhaustive grid search scored by mean official metric across folds.

    Parameter combinations that fail on some fold (e.g. a cascade fold
    missing a class) are recorded with a null score and skipped.
    """
    if model_name not in ("sen_svm", "twostep_svm"):
        raise ConfigError(f"tune supports SVM models, got {model_name!r}")
    if not grid:
        raise ConfigError("tune grid is empty")
    train_posts = recorder.train
    fold_lists = stratified_folds(train_posts, folds, seed=seed)
    cls = SenSvm if model_name == "sen_svm" else TwoStepSvm
    names = sorted(grid)
    results: list[tuple[dict, float | None]] = []
    best_params: dict | None = None
    best_score = -1.0
    for combo in itertools.product(*(grid[name] for name in names)):
        params = dict(zip(names, combo))
        scores = []
        failed = False
        for i, held_out in enumerate(fold_lists):
            rest = [p for j, f in enumerate(fold_lists) if j != i for p in f]
            try:
                cfg = SvmTrainConfig(seed=seed, **params)
                model = cls(recorder.topic, cfg).fit(rest)
                preds = [model.predict(p) for p in held_out]
                scores.append(official_metric(preds, [p.gold for p in held_out]))
            except ValidationError:
                failed = True
                break
        score = None if failed else float(np.mean(scores))
        results.append((params, score))
        if score is not None and score > best_score:
            best_score = score
            best_params = params
    if best_params is None:
        raise ValidationError("no grid combination completed successfully")
    return TuneResult(
        model_name=model_name,
        topic=recorder.topic,
        best_params=best_params,
        best_score=best_score,
        results=results,
        splits_accessed=set(recorder.accessed),
    )
