"""Shared fixtures: synthetic dataset files and toy lexicons."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from stancebench.corpus import PUBLISHED_COUNTS, Post, StanceLabel, target_text
from stancebench.segment import UnigramFrequencyTable

LABELS = ("FAVOR", "AGAINST", "NONE")

# Deterministic filler words so synthetic posts look text-like.
_FILLER = (
    "the debate continues about this topic today",
    "people keep arguing either way online",
    "a new article discusses the question again",
    "responses to the news vary a lot",
)


def semeval_rows(topic: str, split: str, counts: tuple[int, int, int],
                 start_id: int = 10000) -> list[tuple[str, str, str, str]]:
    """Synthetic rows in the official tab-separated layout with exact counts."""
    rows = []
    i = start_id
    target = target_text(topic)
    for label, n in zip(LABELS, counts):
        for k in range(n):
            text = f"{_FILLER[k % len(_FILLER)]} #{topic.lower()}{k} #SemST"
            rows.append((str(i), target, text, label))
            i += 1
    return rows


def write_semeval_file(path: Path, rows) -> Path:
    lines = ["ID\tTarget\tTweet\tStance"]
    lines += ["\t".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_official_shaped_files(tmp_path: Path, topics=None) -> tuple[Path, Path]:
    """Train/test files whose per-topic class counts equal the published ones."""
    topics = topics or [t for t in PUBLISHED_COUNTS if t in ("AT", "CC", "FM", "HC", "LA")]
    train_rows = []
    test_rows = []
    base = 10000
    for topic in topics:
        train_rows += semeval_rows(topic, "train", PUBLISHED_COUNTS[topic]["train"], base)
        base += 5000
        test_rows += semeval_rows(topic, "test", PUBLISHED_COUNTS[topic]["test"], base)
        base += 5000
    train = write_semeval_file(tmp_path / "semeval_train.tsv", train_rows)
    test = write_semeval_file(tmp_path / "semeval_test.tsv", test_rows)
    return train, test


def make_posts(topic: str, counts: tuple[int, int, int], prefix: str = "p") -> list[Post]:
    posts = []
    i = 0
    for label, n in zip(LABELS, counts):
        for _ in range(n):
            posts.append(
                Post(
                    id=f"{prefix}{i:04d}",
                    topic=topic,
                    text=f"synthetic text number {i} for {label.lower()}",
                    gold=StanceLabel(label),
                )
            )
            i += 1
    return posts


@pytest.fixture
def toy_freq() -> UnigramFrequencyTable:
    return UnigramFrequencyTable(
        ["cat", "dog", "catd", "a", "at", "ats", "power", "to", "women", "sem", "st"]
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
