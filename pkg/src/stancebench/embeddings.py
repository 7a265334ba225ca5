"""Word-embedding table with a deterministic out-of-vocabulary policy.

The file format is plain text, one `word v1 ... vd` entry per line
(GloVe-style).  Unknown words get a seeded uniform vector in
[-0.25, 0.25], derived from a stable hash of the word so repeated
lookups agree within and across processes.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .errors import ParseError

OOV_RANGE = 0.25


def _word_seed(word: str, seed: int) -> int:
    digest = hashlib.blake2b(
        word.encode("utf-8"), digest_size=8, salt=str(seed).encode()[:16]
    ).digest()
    return int.from_bytes(digest, "little")


class EmbeddingTable:
    def __init__(self, vocab: dict[str, int], matrix: np.ndarray, oov_seed: int = 0):
        if matrix.ndim != 2 or len(vocab) != matrix.shape[0]:
            raise ValueError("vocabulary size must match matrix rows")
        self.vocab = vocab
        self.matrix = matrix.astype(np.float64)
        self.dim = matrix.shape[1]
        self.oov_seed = oov_seed
        self._oov_cache: dict[str, np.ndarray] = {}

    def __contains__(self, word: str) -> bool:
        return word in self.vocab

    def __len__(self) -> int:
        return len(self.vocab)

    def lookup(self, word: str) -> np.ndarray:
        """Vector for a word; unknown words resolve via the cached OOV policy."""
        row = self.vocab.get(word)
        if row is not None:
            return self.matrix[row]
        cached = self._oov_cache.get(word)
        if cached is None:
            rng = np.random.default_rng(_word_seed(word, self.oov_seed))
            cached = rng.uniform(-OOV_RANGE, OOV_RANGE, self.dim)
            self._oov_cache[word] = cached
        return cached

    def encode(self, tokens) -> np.ndarray:
        """Stack token vectors into a (T, dim) matrix."""
        toks = list(tokens)
        if not toks:
            raise ValueError("cannot encode an empty token sequence")
        return np.vstack([self.lookup(t) for t in toks])


def load_embeddings(path: str | Path, oov_seed: int = 0) -> EmbeddingTable:
    """Parse a text embedding file; all rows must share one dimension."""
    vocab: dict[str, int] = {}
    rows: list[np.ndarray] = []
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2 or not parts[0]:
                if not line.strip():
                    continue
                raise ParseError("expected 'word v1 ... vd'", str(path), lineno)
            word = parts[0]
            try:
                vec = np.array([float(v) for v in parts[1:]], dtype=np.float64)
            except ValueError:
                raise ParseError(
                    f"non-numeric vector component for {word!r}", str(path), lineno
                ) from None
            if dim is None:
                dim = vec.size
            elif vec.size != dim:
                raise ParseError(
                    f"dimension {vec.size} != {dim} of earlier rows", str(path), lineno
                )
            if word in vocab:
                raise ParseError(f"duplicate word {word!r}", str(path), lineno)
            vocab[word] = len(rows)
            rows.append(vec)
    if not rows:
        raise ParseError("embedding file holds no vectors", str(path), 1)
    return EmbeddingTable(vocab, np.vstack(rows), oov_seed=oov_seed)
