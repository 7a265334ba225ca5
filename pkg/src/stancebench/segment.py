"""Hashtag segmentation by dynamic programming over a unigram cost model.

A concatenated tag like "powertowomen" is split into the word sequence
with minimum total cost, where a known word costs
log((rank + 1) * log(vocabulary_size)) and unknown material is only
admitted as single characters carrying a large penalty.  Ties are broken
toward fewer words, then the lexicographically smallest word tuple.

Costs are quantized to integer units of 2^-20 so that cost sums are
exact; the DP and an exhaustive enumeration therefore order candidate
segmentations identically.
"""

from __future__ import annotations

import math
from pathlib import Path

_COST_UNIT = 1 << 20


class UnigramFrequencyTable:
    """Word list ordered by descending corpus frequency, with derived costs."""

    def __init__(self, words: list[str]):
        if len(words) != len(set(words)):
            raise ValueError("frequency list contains duplicate words")
        self._rank = {w: i for i, w in enumerate(words)}
        self._log_vocab = math.log(max(len(words), 2))
        self._max_word_len = max((len(w) for w in words), default=1)
        # OOV single characters cost far more than any in-vocabulary word.
        worst = math.log((len(words) + 1) * self._log_vocab)
        self._char_penalty_units = int(round((worst + 10.0) * _COST_UNIT))

    @classmethod
    def from_file(cls, path: str | Path) -> "UnigramFrequencyTable":
        with open(path, encoding="utf-8") as fh:
            words = [line.strip() for line in fh if line.strip()]
        return cls(words)

    def __contains__(self, word: str) -> bool:
        return word in self._rank

    def __len__(self) -> int:
        return len(self._rank)

    def rank(self, word: str) -> int:
        return self._rank[word]

    def cost(self, word: str) -> float:
        """Quantized segmentation cost of a candidate word."""
        return self.cost_units(word) / _COST_UNIT

    def cost_units(self, word: str) -> int | None:
        """Integer cost, or None when the word cannot be a segment."""
        rank = self._rank.get(word)
        if rank is not None:
            raw = math.log((rank + 1) * self._log_vocab)
            return int(round(raw * _COST_UNIT))
        if len(word) == 1:
            return self._char_penalty_units
        return None

    def max_candidate_len(self) -> int:
        return self._max_word_len


def segment_hashtag(tag: str, freq: UnigramFrequencyTable) -> list[str]:
    """Split a lowercase tag (no '#') into its minimum-cost word sequence."""
    if not tag:
        raise ValueError("cannot segment an empty tag")
    n = len(tag)
    limit = freq.max_candidate_len()
    # best[i]: (cost units, word count, word tuple) for the suffix tag[i:]
    best: list[tuple[int, int, tuple[str, ...]] | None] = [None] * (n + 1)
    best[n] = (0, 0, ())
    for i in range(n - 1, -1, -1):
        candidate = None
        for j in range(i + 1, min(i + limit, n) + 1):
            word = tag[i:j]
            units = freq.cost_units(word)
            if units is None or best[j] is None:
                continue
            tail_cost, tail_len, tail_words = best[j]
            key = (units + tail_cost, 1 + tail_len, (word,) + tail_words)
            if candidate is None or key < candidate:
                candidate = key
        best[i] = candidate
    assert best[0] is not None  # single-character fallback always applies
    return list(best[0][2])


def brute_force_segment(tag: str, freq: UnigramFrequencyTable) -> list[str]:
    """Reference oracle: enumerate all 2^(n-1) split-point subsets."""
    if not tag:
        raise ValueError("cannot segment an empty tag")
    n = len(tag)
    best_key = None
    for mask in range(1 << (n - 1)):
        cuts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1] + [n]
        words = tuple(tag[a:b] for a, b in zip(cuts, cuts[1:]))
        total = 0
        ok = True
        for w in words:
            units = freq.cost_units(w)
            if units is None:
                ok = False
                break
            total += units
        if not ok:
            continue
        key = (total, len(words), words)
        if best_key is None or key < best_key:
            best_key = key
    assert best_key is not None
    return list(best_key[2])
