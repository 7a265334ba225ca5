"""Dataset loading, validation, and splitting.

Two corpus families are supported: the SemEval 2016 Task 6A microblog
collection (tab-separated, official train/test split) and MPCHI-style
consumer-health sentence collections (delimited text, split locally or
via an explicit split manifest).
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError, ValidationError


class StanceLabel(enum.Enum):
    """Three-way stance of a post toward its target."""

    FAVOR = "FAVOR"
    AGAINST = "AGAINST"
    NONE = "NONE"

    @classmethod
    def parse(cls, raw: str) -> "StanceLabel":
        """Parse a serialized label; trims and case-folds before matching."""
        key = raw.strip().upper()
        try:
            return cls(key)
        except ValueError:
            raise ValidationError(f"unknown stance label {raw!r}") from None


# Canonical class order used everywhere (confusion matrices, tie-breaks).
CLASS_ORDER = (StanceLabel.FAVOR, StanceLabel.AGAINST, StanceLabel.NONE)


# Short topic codes for the SemEval targets, as the Target column spells them.
SEMEVAL_TARGETS = {
    "Atheism": "AT",
    "Climate Change is a Real Concern": "CC",
    "Feminist Movement": "FM",
    "Hillary Clinton": "HC",
    "Legalization of Abortion": "LA",
}

# MPCHI claims, keyed by topic code.
MPCHI_TARGETS = {
    "MMR": "MMR vaccination can cause autism",
    "EC": "E-cigarettes are safer than normal cigarettes",
    "HRT": "Women should take HRT post menopause",
    "VC": "Vitamin C prevents common cold",
    "SC": "Sun exposure leads to skin cancer",
}

SEMEVAL_TOPICS = tuple(SEMEVAL_TARGETS.values())
MPCHI_TOPICS = tuple(MPCHI_TARGETS)


def target_text(topic: str) -> str:
    """Full target/claim string for a topic code (identity for unknown codes)."""
    for text, code in SEMEVAL_TARGETS.items():
        if code == topic:
            return text
    return MPCHI_TARGETS.get(topic, topic)


# Per-class (FAVOR, AGAINST, NONE) counts of the official corpus splits.
# Used to validate loaded data and by the `stats` command.
PUBLISHED_COUNTS = {
    "AT": {"train": (92, 304, 117), "test": (32, 160, 28)},
    "CC": {"train": (212, 15, 168), "test": (123, 11, 35)},
    "FM": {"train": (210, 328, 126), "test": (58, 183, 44)},
    "HC": {"train": (112, 361, 166), "test": (45, 172, 78)},
    "LA": {"train": (105, 334, 164), "test": (46, 189, 45)},
    "MMR": {"train": (48, 61, 72), "test": (24, 33, 21)},
    "SC": {"train": (68, 51, 117), "test": (35, 26, 42)},
    "EC": {"train": (60, 118, 111), "test": (33, 47, 44)},
    "VC": {"train": (74, 52, 68), "test": (37, 16, 31)},
    "HRT": {"train": (33, 95, 44), "test": (9, 41, 24)},
}


@dataclass(frozen=True)
class Post:
    """One labeled text instance."""

    id: str
    topic: str
    text: str
    gold: StanceLabel

    def __post_init__(self):
        if not self.id:
            raise ValidationError("post id must be nonempty")
        if not self.text.strip():
            raise ValidationError(f"post {self.id!r} has empty text")


@dataclass
class TopicDataset:
    """Train/test posts for one target."""

    topic: str
    train: list[Post] = field(default_factory=list)
    test: list[Post] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for split_name, posts in (("train", self.train), ("test", self.test)):
            seen = set()
            for p in posts:
                if p.id in seen:
                    raise ValidationError(
                        f"duplicate id {p.id!r} in {self.topic}/{split_name}"
                    )
                seen.add(p.id)
        overlap = {p.id for p in self.train} & {p.id for p in self.test}
        if overlap:
            raise ValidationError(
                f"train/test share ids in {self.topic}: {sorted(overlap)[:5]}"
            )

    def counts(self, split: str) -> tuple[int, int, int]:
        posts = {"train": self.train, "test": self.test}[split]
        return tuple(
            sum(1 for p in posts if p.gold is label) for label in CLASS_ORDER
        )


@dataclass(frozen=True)
class SplitSpec:
    """Deterministic train/test split parameters."""

    train_fraction: float = 0.7
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValidationError(
                f"train_fraction must lie in (0,1), got {self.train_fraction}"
            )


def dataset_stats(ds: TopicDataset) -> dict[str, dict[str, int]]:
    """Per-split per-class counts, keyed by split then serialized label."""
    out: dict[str, dict[str, int]] = {}
    for split in ("train", "test"):
        counts = ds.counts(split)
        out[split] = {label.value: n for label, n in zip(CLASS_ORDER, counts)}
        out[split]["TOTAL"] = sum(counts)
    return out


def _read_semeval_rows(path: str | Path) -> list[Post]:
    path = Path(path)
    posts = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header:
            raise ParseError("empty file, expected header row", str(path), 1)
        cols = header.rstrip("\r\n").split("\t")
        expected = ["ID", "Target", "Tweet", "Stance"]
        if [c.strip() for c in cols] != expected:
            raise ParseError(
                f"bad header {cols!r}, expected {expected}", str(path), 1
            )
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\r\n").split("\t")
            if len(parts) != 4:
                raise ParseError(
                    f"expected 4 tab-separated columns, got {len(parts)}",
                    str(path),
                    lineno,
                )
            pid, target, tweet, stance = parts
            target = target.strip()
            topic = SEMEVAL_TARGETS.get(target, target)
            try:
                label = StanceLabel.parse(stance)
            except ValidationError as exc:
                raise ParseError(str(exc), str(path), lineno) from None
            posts.append(Post(id=pid.strip(), topic=topic, text=tweet, gold=label))
    return posts


def load_semeval_all(path: str | Path, split: str = "train") -> dict[str, TopicDataset]:
    """Load a SemEval file that may mix several targets; group per topic."""
    if split not in ("train", "test"):
        raise ValidationError(f"split must be 'train' or 'test', got {split!r}")
    grouped: dict[str, list[Post]] = {}
    for post in _read_semeval_rows(path):
        grouped.setdefault(post.topic, []).append(post)
    return {
        topic: TopicDataset(topic, **{split: posts})
        for topic, posts in grouped.items()
    }


def load_semeval(
    path: str | Path, split: str = "train", topic: str | None = None
) -> TopicDataset:
    """Load one topic from a SemEval-format file.

    If the file holds several targets, `topic` selects which one; a
    single-target file needs no selector.  An empty file (header only)
    yields an empty dataset.
    """
    per_topic = load_semeval_all(path, split=split)
    if not per_topic:
        return TopicDataset(topic or "")
    if topic is not None:
        if topic not in per_topic:
            raise ValidationError(
                f"topic {topic!r} not present in {path} (has {sorted(per_topic)})"
            )
        return per_topic[topic]
    if len(per_topic) > 1:
        raise ValidationError(
            f"{path} holds several topics {sorted(per_topic)}; pass topic="
        )
    return next(iter(per_topic.values()))


def merge_splits(train_ds: TopicDataset, test_ds: TopicDataset) -> TopicDataset:
    """Combine two single-split datasets for one topic."""
    if train_ds.topic != test_ds.topic:
        raise ValidationError(
            f"topic mismatch: {train_ds.topic!r} vs {test_ds.topic!r}"
        )
    return TopicDataset(train_ds.topic, train=train_ds.train, test=test_ds.test)


def write_semeval(posts: list[Post], path: str | Path) -> None:
    """Serialize posts back to the tab-separated layout (round-trips)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("ID\tTarget\tTweet\tStance\n")
        for p in posts:
            target = target_text(p.topic)
            fh.write(f"{p.id}\t{target}\t{p.text}\t{p.gold.value}\n")


def read_split_manifest(path: str | Path) -> dict[str, str]:
    """Read an explicit id -> {train,test} assignment file."""
    manifest = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\r\n").split("\t")
            if len(parts) != 2 or parts[1] not in ("train", "test"):
                raise ParseError(
                    "expected 'id<TAB>train|test'", str(path), lineno
                )
            if parts[0] in manifest:
                raise ParseError(f"duplicate id {parts[0]!r}", str(path), lineno)
            manifest[parts[0]] = parts[1]
    return manifest


def load_mpchi(
    path: str | Path,
    topic: str,
    split: SplitSpec | None = None,
    manifest: dict[str, str] | None = None,
    delimiter: str = ",",
    text_col: str = "Sentence",
    label_col: str = "Stance",
) -> TopicDataset:
    """Load an MPCHI-style delimited file and split it into train/test.

    Rows get stable synthetic ids `{topic}-{row:04d}` so that a split
    manifest can reference them.  When `manifest` is given it overrides
    the random split; otherwise `split` (default SplitSpec) is applied.
    """
    path = Path(path)
    posts = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh, delimiter=delimiter)
        if reader.fieldnames is None:
            raise ParseError("empty file, expected header row", str(path), 1)
        for col in (text_col, label_col):
            if col not in reader.fieldnames:
                raise ParseError(
                    f"missing column {col!r} (has {reader.fieldnames})",
                    str(path),
                    1,
                )
        for row_index, row in enumerate(reader):
            lineno = row_index + 2
            text = (row[text_col] or "").strip()
            raw_label = row[label_col]
            if raw_label is None:
                raise ParseError("row has too few columns", str(path), lineno)
            if not text:
                raise ParseError("empty text field", str(path), lineno)
            try:
                label = StanceLabel.parse(raw_label)
            except ValidationError as exc:
                raise ParseError(str(exc), str(path), lineno) from None
            posts.append(
                Post(id=f"{topic}-{row_index:04d}", topic=topic, text=text, gold=label)
            )
    if manifest is not None:
        missing = [p.id for p in posts if p.id not in manifest]
        if missing:
            raise ValidationError(
                f"split manifest misses ids: {missing[:5]} (+{max(0, len(missing) - 5)} more)"
            )
        train = [p for p in posts if manifest[p.id] == "train"]
        test = [p for p in posts if manifest[p.id] == "test"]
    elif len(posts) == 1:
        # Degenerate single-row input goes to train.
        train, test = posts, []
    else:
        train, test = stratified_split(posts, split or SplitSpec())
    return TopicDataset(topic, train=train, test=test)


def stratified_split(
    posts: list[Post], spec: SplitSpec
) -> tuple[list[Post], list[Post]]:
    """Deterministic split preserving class ratios within one instance.

    Posts are grouped by class, sorted by id (so input order is
    irrelevant), shuffled with the seeded generator, and cut at
    round(train_fraction * class size), half-up.
    """
    if not posts:
        raise ValidationError("cannot split an empty post list")
    rng = np.random.default_rng(spec.seed)
    train: list[Post] = []
    test: list[Post] = []
    if spec.stratified:
        groups = [
            sorted((p for p in posts if p.gold is label), key=lambda p: p.id)
            for label in CLASS_ORDER
        ]
    else:
        groups = [sorted(posts, key=lambda p: p.id)]
    for group in groups:
        if not group:
            continue
        order = rng.permutation(len(group))
        n_train = int(len(group) * spec.train_fraction + 0.5)
        chosen = {group[i].id for i in order[:n_train]}
        train.extend(p for p in group if p.id in chosen)
        test.extend(p for p in group if p.id not in chosen)
    train.sort(key=lambda p: p.id)
    test.sort(key=lambda p: p.id)
    return train, test
