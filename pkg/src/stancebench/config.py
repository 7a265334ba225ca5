"""Run configuration: one JSON file drives every command.

Per-topic hyperparameter defaults are baked in; the config can override
them globally per model or per topic.  A short hash of the canonical
config serialization is stamped into run outputs so artifacts are
traceable to the exact configuration that produced them.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import (
    MPCHI_TOPICS,
    SEMEVAL_TOPICS,
    SplitSpec,
    TopicDataset,
    load_mpchi,
    load_semeval,
    merge_splits,
    read_split_manifest,
)
from .embeddings import EmbeddingTable, load_embeddings
from .errors import ConfigError
from .hyperparams import neural_schedule, svm_config
from .preprocess import PreprocessConfig, PreprocessMode, load_default_stopwords
from .runner import random_embedding_table
from .vote import VoteConfig

_TOP_KEYS = {
    "out_dir",
    "seed",
    "datasets",
    "topics",
    "embeddings",
    "preprocess",
    "models",
    "vote",
    "tune",
}

_PREPROCESS_KEYS = {
    "mode",
    "apply_normalization",
    "apply_hashtag_split",
    "drop_marker",
    "microblog",
}


@dataclass
class RunConfig:
    raw: dict
    path: Path | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls(raw=raw, path=path).validated()

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        return cls(raw=raw).validated()

    def validated(self) -> "RunConfig":
        unknown = set(self.raw) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")
        pp = self.raw.get("preprocess", {})
        unknown = set(pp) - _PREPROCESS_KEYS
        if unknown:
            raise ConfigError(f"unknown preprocess key {sorted(unknown)[0]!r}")
        return self

    def hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    @property
    def seed(self) -> int:
        return int(self.raw.get("seed", 0))

    @property
    def out_dir(self) -> Path:
        return Path(self.raw.get("out_dir", "runs"))

    @property
    def topics(self) -> list[str]:
        return list(self.raw.get("topics", []))

    def preprocess_config(self) -> PreprocessConfig:
        pp = self.raw.get("preprocess", {})
        return PreprocessConfig(
            mode=PreprocessMode(pp.get("mode", "classical")),
            apply_normalization=pp.get("apply_normalization", True),
            apply_hashtag_split=pp.get("apply_hashtag_split", True),
            stopword_list=load_default_stopwords(),
            microblog=pp.get("microblog", True),
            drop_marker=pp.get("drop_marker", True),
        )

    def _dataset_section(self) -> dict:
        return self.raw.get("datasets", {})

    def load_topic_dataset(self, topic: str) -> TopicDataset:
        datasets = self._dataset_section()
        if topic in SEMEVAL_TOPICS:
            section = datasets.get("semeval")
            if not section or "train" not in section or "test" not in section:
                raise ConfigError(
                    "datasets.semeval needs 'train' and 'test' file paths"
                )
            base = self.path.parent if self.path else Path(".")
            train_ds = load_semeval(base / section["train"], split="train", topic=topic)
            test_ds = load_semeval(base / section["test"], split="test", topic=topic)
            return merge_splits(train_ds, test_ds)
        if topic in MPCHI_TOPICS:
            section = datasets.get("mpchi", {}).get(topic)
            if not section or "path" not in section:
                raise ConfigError(f"datasets.mpchi.{topic} needs a 'path'")
            base = self.path.parent if self.path else Path(".")
            manifest = None
            if section.get("manifest"):
                manifest = read_split_manifest(base / section["manifest"])
            return load_mpchi(
                base / section["path"],
                topic=topic,
                split=SplitSpec(
                    train_fraction=section.get("train_fraction", 0.7),
                    seed=self.seed,
                ),
                manifest=manifest,
                delimiter=section.get("delimiter", ","),
                text_col=section.get("text_col", "Sentence"),
                label_col=section.get("label_col", "Stance"),
            )
        raise ConfigError(f"topic {topic!r} is not a known SemEval or MPCHI code")

    def embedding_table(self) -> EmbeddingTable:
        section = self.raw.get("embeddings", {})
        if section.get("path"):
            base = self.path.parent if self.path else Path(".")
            return load_embeddings(base / section["path"], oov_seed=self.seed)
        # no file: seeded random vectors at the standard pre-trained width
        return random_embedding_table(dim=section.get("dim", 300), seed=self.seed)

    def model_overrides(self, model: str, topic: str) -> dict:
        section = self.raw.get("models", {}).get(model, {})
        overrides = {k: v for k, v in section.items() if k != "per_topic"}
        overrides.update(section.get("per_topic", {}).get(topic, {}))
        return overrides

    def schedule(self, model: str, topic: str):
        return neural_schedule(
            model, topic, seed=self.seed, **self.model_overrides(model, topic)
        )

    def svm_train_config(self, model: str, topic: str):
        return svm_config(topic, seed=self.seed, **self.model_overrides(model, topic))

    def vote_config(self, model: str, topic: str, default_checkpoints) -> VoteConfig:
        section = self.raw.get("vote", {})
        return VoteConfig(
            num_runs=section.get("num_runs", 10),
            validation_fraction=section.get("validation_fraction", 0.1),
            checkpoint_epochs=tuple(
                section.get("checkpoint_epochs", default_checkpoints)
            ),
            master_seed=self.seed,
        )

    def tune_section(self) -> dict:
        section = self.raw.get("tune")
        if not section:
            raise ConfigError("config has no 'tune' section")
        for key in ("model", "topic", "grid"):
            if key not in section:
                raise ConfigError(f"tune section misses {key!r}")
        return section
