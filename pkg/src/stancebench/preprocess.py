"""Shared text preprocessing pipeline.

Order of stages: case-fold, tokenize, then (microblog only) lexicon
normalization and hashtag segmentation, then (classical mode only)
stopword removal and Porter stemming.  Models that consume pre-trained
embeddings use EMBEDDING mode, which never stems and never removes
stopwords since altered surface forms would miss the embedding
vocabulary.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .corpus import Post
from .porter import porter_stem
from .segment import UnigramFrequencyTable, segment_hashtag

URL_TOKEN = "<url>"
USER_TOKEN = "<user>"

# The per-tweet campaign marker appended to every SemEval post.
SEMEVAL_MARKER = "semst"

_URL_RE = re.compile(r"^(?:https?://|www\.)\S+$")
_SIGIL_RE = re.compile(r"^([#@][\w']+)(.*)$")
_WORDISH_RE = re.compile(r"[\w']+|[^\w\s]+")


class PreprocessMode(enum.Enum):
    CLASSICAL = "classical"
    EMBEDDING = "embedding"


@dataclass(frozen=True)
class PreprocessConfig:
    mode: PreprocessMode = PreprocessMode.CLASSICAL
    apply_normalization: bool = True
    apply_hashtag_split: bool = True
    stopword_list: frozenset[str] = frozenset()
    microblog: bool = True
    drop_marker: bool = True


@dataclass(frozen=True)
class TokenSequence:
    """Tokens plus per-token provenance flags."""

    tokens: tuple[str, ...]
    from_hashtag: tuple[bool, ...] = ()
    normalized: tuple[bool, ...] = ()
    stemmed: tuple[bool, ...] = ()

    def __post_init__(self):
        n = len(self.tokens)
        if any(not t for t in self.tokens):
            raise ValueError("token sequence contains an empty token")
        for name in ("from_hashtag", "normalized", "stemmed"):
            flags = getattr(self, name)
            if not flags:
                object.__setattr__(self, name, (False,) * n)
            elif len(flags) != n:
                raise ValueError(f"{name} flags misaligned with tokens")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


class NormalizationLexicon:
    """Exact-match map from out-of-vocabulary token to replacement words."""

    def __init__(self, entries: dict[str, str]):
        self._map = {
            key.strip().lower(): tuple(value.split())
            for key, value in entries.items()
        }

    @classmethod
    def from_file(cls, path: str | Path) -> "NormalizationLexicon":
        entries = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line.strip():
                    continue
                key, _, phrase = line.partition("\t")
                entries[key] = phrase
        return cls(entries)

    def __contains__(self, token: str) -> bool:
        return token in self._map

    def lookup(self, token: str) -> tuple[str, ...] | None:
        return self._map.get(token)


def normalize_token(token: str, lex: NormalizationLexicon) -> list[str]:
    """Expand a case-folded token through the lexicon; identity when absent."""
    replacement = lex.lookup(token)
    return list(replacement) if replacement is not None else [token]


def tokenize(text: str, microblog: bool = True) -> TokenSequence:
    """Whitespace-and-punctuation tokenizer.

    In microblog mode, URLs stay single tokens and '#'/'@'-led tokens
    keep their sigil so later stages can treat them specially.
    """
    tokens: list[str] = []
    for chunk in text.split():
        if microblog and _URL_RE.match(chunk):
            tokens.append(chunk)
            continue
        if microblog and chunk[0] in "#@":
            m = _SIGIL_RE.match(chunk)
            if m:
                tokens.append(m.group(1))
                tokens.extend(_WORDISH_RE.findall(m.group(2)))
                continue
        tokens.extend(_WORDISH_RE.findall(chunk))
    return TokenSequence(tuple(tokens))


def preprocess_post(
    post: Post,
    cfg: PreprocessConfig,
    lex: NormalizationLexicon | None = None,
    freq: UnigramFrequencyTable | None = None,
) -> TokenSequence:
    """Run the full pipeline over one post."""
    return preprocess_text(post.text, cfg, lex=lex, freq=freq)


def preprocess_text(
    text: str,
    cfg: PreprocessConfig,
    lex: NormalizationLexicon | None = None,
    freq: UnigramFrequencyTable | None = None,
) -> TokenSequence:
    base = tokenize(text.lower(), cfg.microblog)

    tokens: list[str] = []
    from_hashtag: list[bool] = []
    normalized: list[bool] = []
    for tok in base.tokens:
        if cfg.microblog and _URL_RE.match(tok):
            tokens.append(URL_TOKEN)
            from_hashtag.append(False)
            normalized.append(False)
            continue
        if cfg.microblog and tok.startswith("@") and len(tok) > 1:
            tokens.append(USER_TOKEN)
            from_hashtag.append(False)
            normalized.append(False)
            continue
        if cfg.microblog and tok.startswith("#") and len(tok) > 1:
            body = tok[1:]
            if cfg.drop_marker and body == SEMEVAL_MARKER:
                continue
            if cfg.apply_hashtag_split and freq is not None:
                for piece in segment_hashtag(body, freq):
                    tokens.append(piece)
                    from_hashtag.append(True)
                    normalized.append(False)
            else:
                tokens.append(tok)
                from_hashtag.append(False)
                normalized.append(False)
            continue
        if cfg.microblog and cfg.apply_normalization and lex is not None:
            replacement = lex.lookup(tok)
            if replacement is not None:
                for piece in replacement:
                    tokens.append(piece)
                    from_hashtag.append(False)
                    normalized.append(True)
                continue
        tokens.append(tok)
        from_hashtag.append(False)
        normalized.append(False)

    stemmed = [False] * len(tokens)
    if cfg.mode is PreprocessMode.CLASSICAL:
        if cfg.stopword_list:
            kept = [
                i for i, tok in enumerate(tokens) if tok not in cfg.stopword_list
            ]
            tokens = [tokens[i] for i in kept]
            from_hashtag = [from_hashtag[i] for i in kept]
            normalized = [normalized[i] for i in kept]
            stemmed = [False] * len(tokens)
        for i, tok in enumerate(tokens):
            if tok.isalpha():
                out = porter_stem(tok)
                if out != tok:
                    tokens[i] = out
                    stemmed[i] = True

    return TokenSequence(
        tuple(tokens), tuple(from_hashtag), tuple(normalized), tuple(stemmed)
    )


def _data_path(name: str):
    return resources.files("stancebench.data").joinpath(name)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a one-word-per-line stopword file."""
    text = Path(path).read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def load_default_stopwords() -> frozenset[str]:
    text = _data_path("stopwords.txt").read_text(encoding="utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


def load_default_normalization() -> NormalizationLexicon:
    entries = {}
    for line in _data_path("normalization.tsv").read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        key, _, phrase = line.partition("\t")
        entries[key] = phrase
    return NormalizationLexicon(entries)


def load_default_frequency_table() -> UnigramFrequencyTable:
    text = _data_path("wordfreq.txt").read_text(encoding="utf-8")
    return UnigramFrequencyTable([w.strip() for w in text.splitlines() if w.strip()])
