"""Double-voting prediction over independent training runs.

Ten runs train on the same data with pairwise-disjoint validation folds
carved from the training set.  Within each run, several checkpoint
epochs predict the test set and a per-post majority is taken; a second
per-post majority across the ten run-level results gives the final
labels.  Ties resolve by the configured ordered label list, which
defaults to descending training-set label frequency with AGAINST >
FAVOR > NONE as the final tie-break.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import StanceLabel, TopicDataset
from .errors import ConfigError, ValidationError


@dataclass(frozen=True)
class VoteConfig:
    num_runs: int = 10
    validation_fraction: float = 0.1
    checkpoint_epochs: tuple[int, ...] = ()
    tie_break: tuple[StanceLabel, ...] | None = None
    master_seed: int = 0

    def __post_init__(self):
        if self.num_runs < 1:
            raise ConfigError(f"num_runs must be >= 1, got {self.num_runs}")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ConfigError(
                f"validation_fraction must lie in (0,1), got {self.validation_fraction}"
            )
        if not self.checkpoint_epochs:
            raise ConfigError("checkpoint epoch set must not be empty")


def majority(labels, tie_break) -> StanceLabel:
    """Most frequent label; ties resolve by position in `tie_break`."""
    labels = list(labels)
    if not labels:
        raise ValidationError("cannot take a majority of zero labels")
    counts: dict[StanceLabel, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    top = max(counts.values())
    tied = [lab for lab, c in counts.items() if c == top]
    if len(tied) == 1:
        return tied[0]
    for candidate in tie_break:
        if candidate in tied:
            return candidate
    raise ValidationError("tie-break order does not cover the tied labels")


def default_tie_break(train_labels) -> tuple[StanceLabel, ...]:
    """Descending training-set frequency, then AGAINST > FAVOR > NONE."""
    fallback = (StanceLabel.AGAINST, StanceLabel.FAVOR, StanceLabel.NONE)
    counts = {lab: 0 for lab in fallback}
    for lab in train_labels:
        counts[lab] += 1
    return tuple(
        sorted(fallback, key=lambda lab: (-counts[lab], fallback.index(lab)))
    )


@dataclass
class PredictionMatrix:
    """Per-run, per-checkpoint, per-test-post predicted labels."""

    runs: int
    epochs: tuple[int, ...]
    post_ids: tuple[str, ...]
    labels: dict[tuple[int, int, str], StanceLabel] = field(default_factory=dict)

    def record(self, run: int, epoch: int, post_id: str, label: StanceLabel) -> None:
        self.labels[(run, epoch, post_id)] = label

    def validate_complete(self) -> None:
        missing = [
            (r, e, pid)
            for r in range(self.runs)
            for e in self.epochs
            for pid in self.post_ids
            if (r, e, pid) not in self.labels
        ]
        if missing:
            raise ValidationError(
                f"prediction matrix incomplete: {len(missing)} missing cells, "
                f"first {missing[0]}"
            )

    def vote(self, tie_break) -> list[StanceLabel]:
        """Majority per post within each run, then majority across runs."""
        self.validate_complete()
        final = []
        for pid in self.post_ids:
            run_level = [
                majority(
                    [self.labels[(r, e, pid)] for e in self.epochs], tie_break
                )
                for r in range(self.runs)
            ]
            final.append(majority(run_level, tie_break))
        return final

    def save(self, path: str | Path) -> None:
        lines = ["run\tepoch\tpost_id\tlabel"]
        for r in range(self.runs):
            for e in self.epochs:
                for pid in self.post_ids:
                    lines.append(f"{r}\t{e}\t{pid}\t{self.labels[(r, e, pid)].value}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "PredictionMatrix":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        if not lines or lines[0] != "run\tepoch\tpost_id\tlabel":
            raise ValidationError(f"{path}: bad prediction matrix header")
        labels: dict[tuple[int, int, str], StanceLabel] = {}
        runs = 0
        epochs: list[int] = []
        post_ids: list[str] = []
        for line in lines[1:]:
            r_str, e_str, pid, lab = line.split("\t")
            r, e = int(r_str), int(e_str)
            runs = max(runs, r + 1)
            if e not in epochs:
                epochs.append(e)
            if pid not in post_ids:
                post_ids.append(pid)
            labels[(r, e, pid)] = StanceLabel.parse(lab)
        matrix = cls(runs=runs, epochs=tuple(epochs), post_ids=tuple(post_ids), labels=labels)
        matrix.validate_complete()
        return matrix


def validation_folds(
    train_size: int, cfg: VoteConfig
) -> list[np.ndarray]:
    """Pairwise-disjoint validation index folds over the training set."""
    fold_size = max(1, int(round(train_size * cfg.validation_fraction)))
    if cfg.num_runs * fold_size > train_size:
        raise ConfigError(
            f"{cfg.num_runs} folds of {fold_size} exceed {train_size} training posts"
        )
    rng = np.random.default_rng(cfg.master_seed)
    order = rng.permutation(train_size)
    return [
        order[i * fold_size : (i + 1) * fold_size] for i in range(cfg.num_runs)
    ]


def run_vote_scheme(
    trainer,
    dataset: TopicDataset,
    cfg: VoteConfig,
) -> tuple[list[StanceLabel], PredictionMatrix]:
    """Run the full two-level voting scheme.

    `trainer(train_posts, val_posts, checkpoint_epochs, seed)` must
    return `{epoch: [label per test post]}` and be deterministic in its
    seed.  Returns final labels aligned with `dataset.test` plus the
    full prediction matrix for audit or re-voting.
    """
    if not dataset.train:
        raise ValidationError("vote scheme needs a training split")
    if not dataset.test:
        raise ValidationError("vote scheme needs a test split")
    folds = validation_folds(len(dataset.train), cfg)
    tie_break = cfg.tie_break or default_tie_break(p.gold for p in dataset.train)
    matrix = PredictionMatrix(
        runs=cfg.num_runs,
        epochs=tuple(cfg.checkpoint_epochs),
        post_ids=tuple(p.id for p in dataset.test),
    )
    for run_index, fold in enumerate(folds):
        fold_set = set(int(i) for i in fold)
        val_posts = [dataset.train[i] for i in sorted(fold_set)]
        train_posts = [
            p for i, p in enumerate(dataset.train) if i not in fold_set
        ]
        seed = int(np.random.SeedSequence([cfg.master_seed, run_index]).generate_state(1)[0])
        per_epoch = trainer(train_posts, val_posts, cfg.checkpoint_epochs, seed)
        missing = set(cfg.checkpoint_epochs) - set(per_epoch)
        if missing:
            raise ValidationError(f"trainer omitted checkpoint epochs {sorted(missing)}")
        for epoch in cfg.checkpoint_epochs:
            preds = per_epoch[epoch]
            if len(preds) != len(dataset.test):
                raise ValidationError(
                    f"run {run_index} epoch {epoch}: {len(preds)} predictions "
                    f"for {len(dataset.test)} test posts"
                )
            for post, label in zip(dataset.test, preds):
                matrix.record(run_index, epoch, post.id, label)
    return matrix.vote(tie_break), matrix
