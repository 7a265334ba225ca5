"""Import of externally produced predictions (e.g. a transformer
fine-tuned elsewhere) so they join comparisons and error analysis.

The file format is identical to the evaluation output format (one
`post_id<TAB>label` row per test post), so external and native results
interchange.  Imports are strict: the ids must cover the topic's test
set exactly, with no gaps, extras, or duplicates.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .corpus import StanceLabel, TopicDataset
from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class ExternalPredictionSet:
    model_name: str
    topic: str
    predictions: dict[str, StanceLabel]
    provenance: str = ""

    def labels_for(self, dataset: TopicDataset) -> list[StanceLabel]:
        """Predictions aligned with the dataset's test post order."""
        return [self.predictions[p.id] for p in dataset.test]


def read_predictions_file(path: str | Path) -> dict[str, StanceLabel]:
    """Parse `post_id<TAB>label` rows; duplicate ids are rejected."""
    out: dict[str, StanceLabel] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\r\n").split("\t")
            if len(parts) != 2:
                raise ParseError("expected 'post_id<TAB>label'", str(path), lineno)
            pid, raw = parts
            if pid in out:
                raise ParseError(f"duplicate id {pid!r}", str(path), lineno)
            try:
                out[pid] = StanceLabel.parse(raw)
            except ValidationError as exc:
                raise ParseError(str(exc), str(path), lineno) from None
    return out


def write_predictions_file(path: str | Path, ids, labels) -> None:
    ids = list(ids)
    labels = list(labels)
    if len(ids) != len(labels):
        raise ValidationError(f"{len(ids)} ids vs {len(labels)} labels")
    lines = [f"{pid}\t{lab.value}" for pid, lab in zip(ids, labels)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def import_predictions(
    path: str | Path,
    dataset: TopicDataset,
    model_name: str = "external",
    provenance: str = "",
) -> ExternalPredictionSet:
    """Validate a predictions file as a bijection over the test split."""
    predictions = read_predictions_file(path)
    test_ids = {p.id for p in dataset.test}
    missing = sorted(test_ids - set(predictions))
    if missing:
        raise ValidationError(
            f"predictions miss {len(missing)} test ids, first: {missing[:5]}"
        )
    extra = sorted(set(predictions) - test_ids)
    if extra:
        raise ValidationError(
            f"predictions cover {len(extra)} unknown ids, first: {extra[:5]}"
        )
    return ExternalPredictionSet(
        model_name=model_name,
        topic=dataset.topic,
        predictions=predictions,
        provenance=provenance,
    )
