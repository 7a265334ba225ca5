"""Sparse feature extraction for the SVM models.

Feature blocks: bag-of-words unigrams, word/character n-grams,
POS-filtered stance vectors, lexicon sentiment, subjectivity-polarity
counts, microblog surface statistics, and target-term presence.
Vocabularies are built on the training split only and frozen before
transforming test data (unseen keys are skipped, never added).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .corpus import Post, target_text
from .errors import ConfigError, ValidationError
from .preprocess import (
    NormalizationLexicon,
    PreprocessConfig,
    PreprocessMode,
    TokenSequence,
    preprocess_text,
)
from .segment import UnigramFrequencyTable


class CoarsePosTag(enum.Enum):
    NOUN = "Noun"
    VERB = "Verb"
    ADJECTIVE = "Adjective"
    ADVERB = "Adverb"
    OTHER = "Other"


CONTENT_TAGS = frozenset(
    {CoarsePosTag.NOUN, CoarsePosTag.VERB, CoarsePosTag.ADJECTIVE, CoarsePosTag.ADVERB}
)


class SentimentPolarity(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"


@dataclass(frozen=True)
class FeatureVector:
    """Sparse vector: strictly increasing indices, no explicit zeros."""

    indices: tuple[int, ...]
    values: tuple[float, ...]
    dimension: int

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValidationError("indices/values length mismatch")
        prev = -1
        for idx, val in zip(self.indices, self.values):
            if idx <= prev or idx >= self.dimension:
                raise ValidationError(
                    f"index {idx} out of order or out of range (dim {self.dimension})"
                )
            if val == 0.0 or not np.isfinite(val):
                raise ValidationError(f"value at index {idx} must be finite nonzero")
            prev = idx

    @classmethod
    def from_counts(cls, counts: dict[int, float], dimension: int) -> "FeatureVector":
        items = sorted((i, v) for i, v in counts.items() if v != 0.0)
        return cls(
            tuple(i for i, _ in items), tuple(float(v) for _, v in items), dimension
        )

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dimension)
        if self.indices:
            dense[list(self.indices)] = self.values
        return dense

    def l2_norm(self) -> float:
        return float(np.sqrt(sum(v * v for v in self.values)))


def concat_features(blocks: list[FeatureVector]) -> FeatureVector:
    indices: list[int] = []
    values: list[float] = []
    offset = 0
    for block in blocks:
        indices.extend(i + offset for i in block.indices)
        values.extend(block.values)
        offset += block.dimension
    return FeatureVector(tuple(indices), tuple(values), offset)


class Vocabulary:
    """Feature-key to column-index map with a fit/frozen life cycle."""

    def __init__(self):
        self._index: dict[str, int] = {}
        self.frozen = False

    def __len__(self) -> int:
        return len(self._index)

    def __contains__(self, key: str) -> bool:
        return key in self._index

    def add(self, key: str) -> int:
        if self.frozen:
            raise ValidationError("cannot add keys to a frozen vocabulary")
        if key not in self._index:
            self._index[key] = len(self._index)
        return self._index[key]

    def freeze(self) -> None:
        self.frozen = True

    def get(self, key: str) -> int | None:
        return self._index.get(key)


def _count_vector(keys, vocab: Vocabulary) -> FeatureVector:
    counts: dict[int, float] = {}
    for key in keys:
        idx = vocab.get(key)
        if idx is None:
            if vocab.frozen:
                continue
            idx = vocab.add(key)
        counts[idx] = counts.get(idx, 0.0) + 1.0
    return FeatureVector.from_counts(counts, max(len(vocab), 1))


def bow_unigrams(tokens, vocab: Vocabulary) -> FeatureVector:
    """Term-frequency unigram counts against a (possibly frozen) vocabulary."""
    return _count_vector(tokens, vocab)


def ngram_keys(tokens, n: int, level: str) -> list[str]:
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if level == "word":
        toks = list(tokens)
        return [" ".join(toks[i : i + n]) for i in range(len(toks) - n + 1)]
    if level == "char":
        joined = " ".join(tokens)
        return [joined[i : i + n] for i in range(len(joined) - n + 1)]
    raise ConfigError(f"unknown n-gram level {level!r}")


def ngrams(tokens, n: int, level: str, vocab: Vocabulary) -> FeatureVector:
    """Contiguous n-gram counts; sequences shorter than n give an empty vector."""
    return _count_vector(ngram_keys(tokens, n, level), vocab)


class CoarsePosTagger:
    """Dictionary-first tagger with deterministic suffix fallback rules."""

    def __init__(self, tag_dict: dict[str, CoarsePosTag]):
        self._dict = tag_dict

    @classmethod
    def from_file(cls, path) -> "CoarsePosTagger":
        tag_dict = {}
        text = (
            path.read_text(encoding="utf-8")
            if hasattr(path, "read_text")
            else Path(path).read_text(encoding="utf-8")
        )
        for line in text.splitlines():
            if not line.strip():
                continue
            word, _, tag = line.partition("\t")
            tag_dict[word] = CoarsePosTag(tag.strip())
        return cls(tag_dict)

    def tag(self, token: str) -> CoarsePosTag:
        hit = self._dict.get(token)
        if hit is not None:
            return hit
        if not token.isalpha():
            return CoarsePosTag.OTHER
        if token.endswith("ly"):
            return CoarsePosTag.ADVERB
        if token.endswith(("ous", "ful", "ive")):
            return CoarsePosTag.ADJECTIVE
        if token.endswith(("ing", "ed")):
            return CoarsePosTag.VERB
        return CoarsePosTag.NOUN


_DEFAULT_TAGGER: CoarsePosTagger | None = None


def default_tagger() -> CoarsePosTagger:
    global _DEFAULT_TAGGER
    if _DEFAULT_TAGGER is None:
        _DEFAULT_TAGGER = CoarsePosTagger.from_file(
            resources.files("stancebench.data").joinpath("tagdict.tsv")
        )
    return _DEFAULT_TAGGER


def coarse_pos_tag(tokens, tagger: CoarsePosTagger | None = None) -> list[CoarsePosTag]:
    tagger = tagger or default_tagger()
    return [tagger.tag(tok) for tok in tokens]


def stance_vector(tokens, pos_tags, vocab: Vocabulary) -> FeatureVector:
    """Bag-of-words restricted to noun/verb/adjective/adverb tokens."""
    toks = list(tokens)
    if len(toks) != len(pos_tags):
        raise ValidationError(
            f"tokens ({len(toks)}) and tags ({len(pos_tags)}) misaligned"
        )
    filtered = [t for t, tag in zip(toks, pos_tags) if tag in CONTENT_TAGS]
    return bow_unigrams(filtered, vocab)


class SubjectivityLexicon:
    """Word to (strength, polarity) map in the MPQA style."""

    STRENGTHS = ("strong", "weak")
    POLARITIES = ("pos", "neg", "neutral")

    def __init__(self, entries: dict[str, tuple[str, str]]):
        for word, (strength, polarity) in entries.items():
            if strength not in self.STRENGTHS or polarity not in self.POLARITIES:
                raise ValidationError(
                    f"bad lexicon entry {word!r}: ({strength}, {polarity})"
                )
        self._map = {w.lower(): sp for w, sp in entries.items()}

    @classmethod
    def from_file(cls, path) -> "SubjectivityLexicon":
        text = (
            path.read_text(encoding="utf-8")
            if hasattr(path, "read_text")
            else Path(path).read_text(encoding="utf-8")
        )
        entries = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            word, strength, polarity = line.split("\t")
            entries[word] = (strength, polarity)
        return cls(entries)

    def lookup(self, word: str) -> tuple[str, str] | None:
        return self._map.get(word)


_DEFAULT_SUBJECTIVITY: SubjectivityLexicon | None = None


def default_subjectivity() -> SubjectivityLexicon:
    global _DEFAULT_SUBJECTIVITY
    if _DEFAULT_SUBJECTIVITY is None:
        _DEFAULT_SUBJECTIVITY = SubjectivityLexicon.from_file(
            resources.files("stancebench.data").joinpath("subjectivity.tsv")
        )
    return _DEFAULT_SUBJECTIVITY


def sentiment_polarity(tokens, lex: SubjectivityLexicon) -> SentimentPolarity:
    """Majority of positive vs negative lexicon hits; ties are neutral."""
    pos = neg = 0
    for tok in tokens:
        hit = lex.lookup(tok)
        if hit is None:
            continue
        if hit[1] == "pos":
            pos += 1
        elif hit[1] == "neg":
            neg += 1
    if pos > neg:
        return SentimentPolarity.POSITIVE
    if neg > pos:
        return SentimentPolarity.NEGATIVE
    return SentimentPolarity.NEUTRAL


def sentiment_feature(tokens, lex: SubjectivityLexicon) -> FeatureVector:
    """One-hot over (Positive, Negative, Neutral)."""
    polarity = sentiment_polarity(tokens, lex)
    slot = {
        SentimentPolarity.POSITIVE: 0,
        SentimentPolarity.NEGATIVE: 1,
        SentimentPolarity.NEUTRAL: 2,
    }[polarity]
    return FeatureVector((slot,), (1.0,), 3)


def subjectivity_features(tokens, lex: SubjectivityLexicon) -> FeatureVector:
    """Counts per (strength, polarity) bucket: strong-pos, strong-neg, weak-pos, weak-neg."""
    counts = {0: 0.0, 1: 0.0, 2: 0.0, 3: 0.0}
    slots = {
        ("strong", "pos"): 0,
        ("strong", "neg"): 1,
        ("weak", "pos"): 2,
        ("weak", "neg"): 3,
    }
    for tok in tokens:
        hit = lex.lookup(tok)
        if hit is not None and hit in slots:
            counts[slots[hit]] += 1.0
    return FeatureVector.from_counts(counts, 4)


_EMOTICON_RE = re.compile(
    r"(?:[:;=]'?-?[)(DPpoO/\\|])|(?:<3)|(?:[xX]D)"
)
_SURFACE_URL_RE = re.compile(r"(?:https?://|www\.)\S+")

SURFACE_FEATURE_NAMES = (
    "hashtag_count",
    "mention_count",
    "url_presence",
    "emoticon_count",
    "question_presence",
    "exclamation_count",
)


def surface_features(raw_text: str) -> FeatureVector:
    """Microblog surface statistics computed on the raw, untokenized text."""
    counts = {
        0: float(len(re.findall(r"#\w", raw_text))),
        1: float(len(re.findall(r"@\w", raw_text))),
        2: 1.0 if _SURFACE_URL_RE.search(raw_text) else 0.0,
        3: float(len(_EMOTICON_RE.findall(raw_text))),
        4: 1.0 if "?" in raw_text else 0.0,
        5: float(raw_text.count("!")),
    }
    return FeatureVector.from_counts(counts, 6)


@dataclass(frozen=True)
class PostView:
    """Token views a feature pipeline needs for one post.

    `tokens` comes from the classical pipeline (stemmed, stopworded);
    `surface_tokens` keeps original word forms for lexicon and POS use.
    """

    raw: str
    tokens: tuple[str, ...]
    surface_tokens: tuple[str, ...]


def make_view(
    post: Post,
    cfg: PreprocessConfig,
    lex: NormalizationLexicon | None = None,
    freq: UnigramFrequencyTable | None = None,
) -> PostView:
    classical = preprocess_text(post.text, cfg, lex=lex, freq=freq)
    surface_cfg = replace(cfg, mode=PreprocessMode.EMBEDDING)
    surface = preprocess_text(post.text, surface_cfg, lex=lex, freq=freq)
    return PostView(post.text, tuple(classical.tokens), tuple(surface.tokens))


# Feature-set selections used by the SVM models.
SEN_FEATURES = ("stance_vector", "sentiment", "bow")
TWOSTEP_STAGE1_FEATURES = ("subjectivity", "surface")
TWOSTEP_STAGE2_FEATURES = ("subjectivity", "word_ngrams", "char_ngrams", "target_presence")

_KNOWN_FEATURES = (
    "bow",
    "stance_vector",
    "sentiment",
    "subjectivity",
    "surface",
    "word_ngrams",
    "char_ngrams",
    "target_presence",
)


class FeaturePipeline:
    """Concatenation of named feature blocks with stable column offsets."""

    def __init__(
        self,
        feature_names,
        topic: str | None = None,
        subjectivity: SubjectivityLexicon | None = None,
        tagger: CoarsePosTagger | None = None,
        word_ngram_orders: tuple[int, ...] = (1, 2, 3),
        char_ngram_orders: tuple[int, ...] = (2, 3, 4),
        stopwords: frozenset[str] = frozenset(),
    ):
        names = tuple(feature_names)
        if not names:
            raise ConfigError("feature selection is empty")
        for name in names:
            if name not in _KNOWN_FEATURES:
                raise ConfigError(f"unknown feature name {name!r}")
        self.feature_names = names
        self.topic = topic
        self.subjectivity = subjectivity or default_subjectivity()
        self.tagger = tagger or default_tagger()
        self.word_ngram_orders = word_ngram_orders
        self.char_ngram_orders = char_ngram_orders
        self._vocabs: dict[str, Vocabulary] = {}
        for name in ("bow", "stance_vector", "word_ngrams", "char_ngrams"):
            if name in names:
                self._vocabs[name] = Vocabulary()
        if "target_presence" in names:
            if topic is None:
                raise ConfigError("target_presence requires a topic")
            vocab = Vocabulary()
            for word in target_text(topic).lower().split():
                if word not in stopwords and word.isalpha():
                    vocab.add(word)
            vocab.freeze()
            self._vocabs["target_presence"] = vocab
        self.fitted = False

    def fit(self, views: list[PostView]) -> "FeaturePipeline":
        for view in views:
            self._extract(view, fitting=True)
        for vocab in self._vocabs.values():
            vocab.freeze()
        self.fitted = True
        return self

    def transform(self, view: PostView) -> FeatureVector:
        if not self.fitted:
            raise ValidationError("pipeline must be fitted before transform")
        return self._extract(view, fitting=False)

    def dimension(self) -> int:
        if not self.fitted:
            raise ValidationError("pipeline must be fitted first")
        return sum(self._block_dim(name) for name in self.feature_names)

    def _block_dim(self, name: str) -> int:
        if name == "sentiment":
            return 3
        if name == "subjectivity":
            return 4
        if name == "surface":
            return 6
        return max(len(self._vocabs[name]), 1)

    def _extract(self, view: PostView, fitting: bool) -> FeatureVector:
        blocks = []
        for name in self.feature_names:
            if name == "bow":
                blocks.append(bow_unigrams(view.tokens, self._vocabs["bow"]))
            elif name == "stance_vector":
                tags = coarse_pos_tag(view.surface_tokens, self.tagger)
                blocks.append(
                    stance_vector(view.surface_tokens, tags, self._vocabs["stance_vector"])
                )
            elif name == "sentiment":
                blocks.append(sentiment_feature(view.surface_tokens, self.subjectivity))
            elif name == "subjectivity":
                blocks.append(
                    subjectivity_features(view.surface_tokens, self.subjectivity)
                )
            elif name == "surface":
                blocks.append(surface_features(view.raw))
            elif name == "word_ngrams":
                keys: list[str] = []
                for n in self.word_ngram_orders:
                    keys.extend(ngram_keys(view.tokens, n, "word"))
                blocks.append(_count_vector(keys, self._vocabs["word_ngrams"]))
            elif name == "char_ngrams":
                keys = []
                for n in self.char_ngram_orders:
                    keys.extend(ngram_keys(view.tokens, n, "char"))
                blocks.append(_count_vector(keys, self._vocabs["char_ngrams"]))
            elif name == "target_presence":
                vocab = self._vocabs["target_presence"]
                present = {
                    vocab.get(w): 1.0
                    for w in set(view.surface_tokens)
                    if vocab.get(w) is not None
                }
                blocks.append(FeatureVector.from_counts(present, max(len(vocab), 1)))
        if fitting:
            # During fit only the vocabularies matter; sizes still move.
            return FeatureVector((), (), 1)
        return concat_features(blocks)
