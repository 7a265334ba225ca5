"""Official metric computation, comparison tables, and error analysis.

The headline metric is the arithmetic mean of the FAVOR-class F1 and
the AGAINST-class F1 (the NONE class is excluded), with the standard
zero-denominator convention F1 = 0.  The TOTAL column of a comparison
pools all topics' predictions before computing the metric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .corpus import CLASS_ORDER, Post, StanceLabel
from .errors import ValidationError

_CLASS_INDEX = {label: i for i, label in enumerate(CLASS_ORDER)}


@dataclass(frozen=True)
class ConfusionMatrix:
    """Gold x predicted counts in class order (FAVOR, AGAINST, NONE)."""

    counts: tuple[tuple[int, int, int], ...]

    @classmethod
    def from_labels(cls, preds, gold) -> "ConfusionMatrix":
        if len(preds) != len(gold):
            raise ValidationError(
                f"{len(preds)} predictions vs {len(gold)} gold labels"
            )
        m = np.zeros((3, 3), dtype=int)
        for p, g in zip(preds, gold):
            m[_CLASS_INDEX[g], _CLASS_INDEX[p]] += 1
        return cls(tuple(tuple(int(v) for v in row) for row in m))

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def merged(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        merged = tuple(
            tuple(a + b for a, b in zip(ra, rb))
            for ra, rb in zip(self.counts, other.counts)
        )
        return ConfusionMatrix(merged)


@dataclass(frozen=True)
class MetricReport:
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    official: float
    confusion: ConfusionMatrix

    def to_text(self) -> str:
        """Stable, diffable serialization."""
        doc = {
            "official_macro_f1_favor_against": round(self.official, 6),
            "per_class": {
                label.value: {
                    "precision": round(self.precision[label.value], 6),
                    "recall": round(self.recall[label.value], 6),
                    "f1": round(self.f1[label.value], 6),
                }
                for label in CLASS_ORDER
            },
            "confusion_gold_x_pred": [list(row) for row in self.confusion.counts],
            "n": self.confusion.total(),
        }
        return json.dumps(doc, sort_keys=True, indent=2)


def report_from_confusion(cm: ConfusionMatrix) -> MetricReport:
    precision: dict[str, float] = {}
    recall: dict[str, float] = {}
    f1: dict[str, float] = {}
    m = np.array(cm.counts)
    for i, label in enumerate(CLASS_ORDER):
        tp = m[i, i]
        fp = m[:, i].sum() - tp
        fn = m[i, :].sum() - tp
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        r = tp / (tp + fn) if tp + fn > 0 else 0.0
        f = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
        precision[label.value] = float(p)
        recall[label.value] = float(r)
        f1[label.value] = float(f)
    official = 0.5 * (f1[StanceLabel.FAVOR.value] + f1[StanceLabel.AGAINST.value])
    return MetricReport(precision, recall, f1, official, cm)


def macro_f1_favor_against(preds, gold) -> MetricReport:
    """Per-class precision/recall/F1 plus the official two-class macro F1."""
    preds = list(preds)
    gold = list(gold)
    if not gold:
        raise ValidationError("cannot evaluate an empty label list")
    return report_from_confusion(ConfusionMatrix.from_labels(preds, gold))


def official_metric(preds, gold) -> float:
    return macro_f1_favor_against(preds, gold).official


def pooled_overall(per_topic: dict[str, tuple[list, list]]) -> MetricReport:
    """Concatenate all topics' (preds, gold) pairs and score the pool."""
    if not per_topic:
        raise ValidationError("no topics to pool")
    cm: ConfusionMatrix | None = None
    for preds, gold in per_topic.values():
        part = ConfusionMatrix.from_labels(preds, gold)
        cm = part if cm is None else cm.merged(part)
    return report_from_confusion(cm)


@dataclass(frozen=True)
class MissedPost:
    post_id: str
    topic: str
    text: str
    gold: StanceLabel
    predictions: dict[str, StanceLabel]


@dataclass(frozen=True)
class ErrorAnalysisReport:
    """Posts no model classified correctly, grouped by topic."""

    by_topic: dict[str, list[MissedPost]]

    def all_posts(self) -> list[MissedPost]:
        return [p for posts in self.by_topic.values() for p in posts]

    def to_text(self) -> str:
        lines = []
        for topic in sorted(self.by_topic):
            for p in self.by_topic[topic]:
                preds = ", ".join(
                    f"{m}={p.predictions[m].value}" for m in sorted(p.predictions)
                )
                lines.append(
                    f"{topic}\t{p.post_id}\tgold={p.gold.value}\t{preds}\t{p.text}"
                )
        return "\n".join(lines) + ("\n" if lines else "")


def all_models_missed(
    model_predictions: dict[str, list[StanceLabel]],
    gold: list[StanceLabel],
    posts: list[Post] | None = None,
) -> ErrorAnalysisReport:
    """Collect posts where every model's prediction differs from gold."""
    if not model_predictions:
        raise ValidationError("need at least one model's predictions")
    n = len(gold)
    for name, preds in model_predictions.items():
        if len(preds) != n:
            raise ValidationError(
                f"model {name!r} has {len(preds)} predictions for {n} posts"
            )
    if posts is not None and len(posts) != n:
        raise ValidationError(f"{len(posts)} posts vs {n} gold labels")
    by_topic: dict[str, list[MissedPost]] = {}
    for i in range(n):
        if any(preds[i] == gold[i] for preds in model_predictions.values()):
            continue
        post = posts[i] if posts is not None else None
        missed = MissedPost(
            post_id=post.id if post else str(i),
            topic=post.topic if post else "",
            text=post.text if post else "",
            gold=gold[i],
            predictions={m: preds[i] for m, preds in model_predictions.items()},
        )
        by_topic.setdefault(missed.topic, []).append(missed)
    return ErrorAnalysisReport(by_topic)


# Published reference results for these model families on the two
# benchmark collections (official metric per topic and pooled TOTAL).
# Rendered only when reference mode is requested; never asserted.
REFERENCE_RESULTS = {
    "semeval": {
        "tan": {"AT": 0.628, "CC": 0.430, "LA": 0.567, "FM": 0.590, "HC": 0.728, "TOTAL": 0.690},
        "tan_minus": {"AT": 0.638, "CC": 0.440, "LA": 0.572, "FM": 0.542, "HC": 0.724, "TOTAL": 0.692},
        "lstm": {"AT": 0.629, "CC": 0.429, "LA": 0.628, "FM": 0.571, "HC": 0.611, "TOTAL": 0.687},
        "sen_svm": {"AT": 0.590, "CC": 0.39, "LA": 0.575, "FM": 0.510, "HC": 0.565, "TOTAL": 0.630},
        "cnn": {"AT": 0.641, "CC": 0.445, "LA": 0.684, "FM": 0.552, "HC": 0.675, "TOTAL": 0.706},
        "bert": {"AT": 0.743, "CC": 0.446, "LA": 0.657, "FM": 0.650, "HC": 0.713, "TOTAL": 0.751},
        "twostep_svm": {"AT": 0.410, "CC": 0.419, "LA": 0.436, "FM": 0.496, "HC": 0.488, "TOTAL": 0.631},
    },
    "mpchi": {
        "tan": {"HRT": 0.347, "EC": 0.580, "VC": 0.421, "SC": 0.507, "MMR": 0.671, "TOTAL": 0.586},
        "tan_minus": {"HRT": 0.569, "EC": 0.583, "VC": 0.578, "SC": 0.468, "MMR": 0.608, "TOTAL": 0.589},
        "lstm": {"HRT": 0.464, "EC": 0.609, "VC": 0.592, "SC": 0.575, "MMR": 0.665, "TOTAL": 0.631},
        "sen_svm": {"HRT": 0.480, "EC": 0.605, "VC": 0.405, "SC": 0.445, "MMR": 0.615, "TOTAL": 0.540},
        "cnn": {"HRT": 0.359, "EC": 0.539, "VC": 0.524, "SC": 0.252, "MMR": 0.524, "TOTAL": 0.551},
        "bert": {"HRT": 0.669, "EC": 0.780, "VC": 0.647, "SC": 0.769, "MMR": 0.782, "TOTAL": 0.756},
        "twostep_svm": {"HRT": 0.470, "EC": 0.297, "VC": 0.409, "SC": 0.293, "MMR": 0.455, "TOTAL": 0.519},
    },
}


@dataclass
class ComparisonTable:
    """Models x (topics + TOTAL) grid of official-metric values."""

    topics: list[str]
    rows: dict[str, dict[str, float | None]] = field(default_factory=dict)

    def add_row(self, model: str, cells: dict[str, float | None]) -> None:
        self.rows[model] = {t: cells.get(t) for t in self.topics}

    def best_per_topic(self) -> dict[str, str | None]:
        best: dict[str, str | None] = {}
        for topic in self.topics:
            values = [
                (model, cells[topic])
                for model, cells in self.rows.items()
                if cells[topic] is not None
            ]
            best[topic] = max(values, key=lambda mv: mv[1])[0] if values else None
        return best

    def to_text(self) -> str:
        best = self.best_per_topic()
        width = max([len(m) for m in self.rows] + [5])
        header = "model".ljust(width) + "".join(f"{t:>10}" for t in self.topics)
        lines = [header]
        for model, cells in self.rows.items():
            row = model.ljust(width)
            for topic in self.topics:
                value = cells[topic]
                if value is None:
                    row += f"{'—':>10}"
                else:
                    mark = "*" if best[topic] == model else " "
                    row += f"{value:>9.3f}{mark}"
            lines.append(row)
        return "\n".join(lines) + "\n"

    def to_tsv(self) -> str:
        lines = ["model\t" + "\t".join(self.topics)]
        for model, cells in self.rows.items():
            vals = [
                "" if cells[t] is None else f"{cells[t]:.6f}" for t in self.topics
            ]
            lines.append(model + "\t" + "\t".join(vals))
        return "\n".join(lines) + "\n"


def render_comparison(
    per_model_reports: dict[str, dict[str, MetricReport]],
    topics: list[str] | None = None,
    reference_family: str | None = None,
) -> ComparisonTable:
    """Build the comparison grid; TOTAL pools each model's per-topic counts."""
    if topics is None:
        seen: list[str] = []
        for reports in per_model_reports.values():
            for t in reports:
                if t not in seen:
                    seen.append(t)
        topics = seen
    table = ComparisonTable(topics=list(topics) + ["TOTAL"])
    for model, reports in per_model_reports.items():
        cells: dict[str, float | None] = {
            t: (reports[t].official if t in reports else None) for t in topics
        }
        pooled_cm: ConfusionMatrix | None = None
        for t in topics:
            if t in reports:
                cm = reports[t].confusion
                pooled_cm = cm if pooled_cm is None else pooled_cm.merged(cm)
        cells["TOTAL"] = (
            report_from_confusion(pooled_cm).official if pooled_cm else None
        )
        table.add_row(model, cells)
    if reference_family is not None:
        for model, cells in REFERENCE_RESULTS.get(reference_family, {}).items():
            table.add_row(f"{model} (reported)", dict(cells))
    return table


@dataclass(frozen=True)
class EffectReport:
    """Metric movement between two runs of the same model and data."""

    official_before: float
    official_after: float
    official_delta: float
    f1_delta: dict[str, float]

    def to_text(self) -> str:
        doc = {
            "official_before": round(self.official_before, 6),
            "official_after": round(self.official_after, 6),
            "official_delta": round(self.official_delta, 6),
            "f1_delta": {k: round(v, 6) for k, v in sorted(self.f1_delta.items())},
        }
        return json.dumps(doc, sort_keys=True, indent=2)


def preprocessing_effect(before: MetricReport, after: MetricReport) -> EffectReport:
    return EffectReport(
        official_before=before.official,
        official_after=after.official,
        official_delta=after.official - before.official,
        f1_delta={
            label.value: after.f1[label.value] - before.f1[label.value]
            for label in CLASS_ORDER
        },
    )
