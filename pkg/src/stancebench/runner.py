"""End-to-end model runs over a topic dataset.

Neural models predict through the double-voting scheme; the SVM models
predict once.  All runs are deterministic under their seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .corpus import StanceLabel, TopicDataset
from .embeddings import EmbeddingTable
from .errors import ValidationError
from .hyperparams import checkpoint_epochs, neural_schedule, svm_config
from .models import MODEL_NAMES, TokenIndexer, build_model
from .preprocess import (
    load_default_frequency_table,
    load_default_normalization,
    load_default_stopwords,
)
from .svm import SenSvm, TwoStepSvm
from .training import TrainSchedule, encode_posts, train
from .vote import PredictionMatrix, VoteConfig, run_vote_scheme

SVM_MODEL_NAMES = ("sen_svm", "twostep_svm")
ALL_MODEL_NAMES = MODEL_NAMES + SVM_MODEL_NAMES


@dataclass
class RunOutput:
    model_name: str
    topic: str
    predictions: list[StanceLabel]
    matrix: PredictionMatrix | None = None
    val_traces: list[list[float]] = field(default_factory=list)


def make_neural_trainer(
    model_name: str,
    dataset: TopicDataset,
    table: EmbeddingTable,
    base_schedule: TrainSchedule,
):
    """Build the vote-scheme trainer closure for one neural model.

    The token indexer is populated over the whole dataset up front so
    every run shares one embedding matrix.
    """
    lex = load_default_normalization()
    freq = load_default_frequency_table()
    indexer = TokenIndexer(table)
    all_posts = dataset.train + dataset.test
    encoded = encode_posts(all_posts, indexer, dataset.topic, lex=lex, freq=freq)
    by_id = {p.id: ex for p, ex in zip(all_posts, encoded)}
    test_examples = [by_id[p.id] for p in dataset.test]
    matrix = indexer.matrix()
    traces: list[list[float]] = []

    def trainer(train_posts, val_posts, epochs, seed):
        schedule = replace(base_schedule, seed=seed, epochs=max(epochs))
        model = build_model(
            model_name,
            matrix,
            hidden=schedule.hidden,
            seed=seed,
            fine_tune=schedule.fine_tune_embeddings,
        )
        result = train(
            model,
            [by_id[p.id] for p in train_posts],
            schedule,
            val_examples=[by_id[p.id] for p in val_posts],
            test_examples=test_examples,
            checkpoint_epochs=tuple(epochs),
        )
        traces.append(result.val_trace)
        return result.checkpoint_predictions

    return trainer, traces


def run_neural_model(
    dataset: TopicDataset,
    model_name: str,
    table: EmbeddingTable,
    schedule: TrainSchedule | None = None,
    vote_cfg: VoteConfig | None = None,
    seed: int = 0,
) -> RunOutput:
    if model_name not in MODEL_NAMES:
        raise ValidationError(f"unknown neural model {model_name!r}")
    schedule = schedule or neural_schedule(model_name, dataset.topic, seed=seed)
    vote_cfg = vote_cfg or VoteConfig(
        checkpoint_epochs=checkpoint_epochs(model_name, dataset.topic),
        master_seed=seed,
    )
    trainer, traces = make_neural_trainer(model_name, dataset, table, schedule)
    labels, matrix = run_vote_scheme(trainer, dataset, vote_cfg)
    return RunOutput(
        model_name=model_name,
        topic=dataset.topic,
        predictions=labels,
        matrix=matrix,
        val_traces=traces,
    )


def run_svm_model(
    dataset: TopicDataset,
    model_name: str,
    seed: int = 0,
    cfg=None,
) -> RunOutput:
    if model_name not in SVM_MODEL_NAMES:
        raise ValidationError(f"unknown svm model {model_name!r}")
    cfg = cfg or svm_config(dataset.topic, seed=seed)
    cls = SenSvm if model_name == "sen_svm" else TwoStepSvm
    model = cls(dataset.topic, cfg).fit(dataset.train)
    preds = [model.predict(p) for p in dataset.test]
    return RunOutput(model_name=model_name, topic=dataset.topic, predictions=preds)


def majority_class_baseline(dataset: TopicDataset) -> RunOutput:
    """Predict the most frequent training label everywhere."""
    counts: dict[StanceLabel, int] = {}
    for p in dataset.train:
        counts[p.gold] = counts.get(p.gold, 0) + 1
    top = max(counts.items(), key=lambda kv: kv[1])[0]
    return RunOutput(
        model_name="majority_baseline",
        topic=dataset.topic,
        predictions=[top] * len(dataset.test),
    )


def random_embedding_table(dim: int = 50, seed: int = 0) -> EmbeddingTable:
    """Empty-vocabulary table: every word resolves via the seeded OOV policy."""
    return EmbeddingTable({}, np.zeros((0, dim)), oov_seed=seed)
