"""Neural stance classifiers: LSTM baseline, bypass-attention BiLSTM
(with and without target-augmented attention input), and the 1-D
convolutional sentence model.

All models emit class probabilities over the fixed order
(FAVOR, AGAINST, NONE) and share one embedding matrix, frozen by
default.  The attention models compute per-token scores through an
affine bypass: score_t = W_a . e_t + b_a, where e_t is the word
embedding concatenated with the pooled target vector (full variant) or
the word embedding alone (minus variant), followed by a softmax over
the sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Parameter, Tensor
from .embeddings import EmbeddingTable
from .errors import ValidationError

N_CLASSES = 3

DEFAULT_HIDDEN = 128
CNN_FILTER_WIDTHS = (3, 4, 5)
CNN_FILTERS_PER_WIDTH = 100


@dataclass(frozen=True)
class EncodedExample:
    """Token and target rows resolved against a model-local vocabulary."""

    token_ids: tuple[int, ...]
    target_ids: tuple[int, ...]
    label: int | None = None

    def __post_init__(self):
        if not self.token_ids:
            raise ValidationError("example has no tokens")
        if not self.target_ids:
            raise ValidationError("example has no target words")


@dataclass(frozen=True)
class TargetEncoding:
    """Target word vectors plus their mean pooling."""

    words: tuple[str, ...]
    vectors: np.ndarray  # (N, d)
    pooled: np.ndarray  # (d,)

    @classmethod
    def from_table(cls, words, table: EmbeddingTable) -> "TargetEncoding":
        toks = tuple(words)
        if not toks:
            raise ValidationError("target must have at least one word")
        vectors = table.encode(toks)
        return cls(toks, vectors, vectors.mean(axis=0))


class TokenIndexer:
    """Model-local vocabulary whose rows are drawn from an embedding table."""

    def __init__(self, table: EmbeddingTable):
        self._table = table
        self.vocab: dict[str, int] = {}
        self._rows: list[np.ndarray] = []

    def index(self, word: str) -> int:
        idx = self.vocab.get(word)
        if idx is None:
            idx = len(self._rows)
            self.vocab[word] = idx
            self._rows.append(self._table.lookup(word))
        return idx

    def encode(self, tokens) -> tuple[int, ...]:
        toks = list(tokens)
        if not toks:
            raise ValidationError("cannot encode an empty token sequence")
        return tuple(self.index(t) for t in toks)

    def matrix(self) -> np.ndarray:
        return np.vstack(self._rows)


def _glorot(rng: np.random.Generator, shape: tuple[int, int]) -> np.ndarray:
    limit = np.sqrt(6.0 / (shape[0] + shape[1]))
    return rng.uniform(-limit, limit, shape)


class LstmCell:
    """Single-direction LSTM cell with separate gate weights."""

    GATES = ("i", "f", "o", "g")

    def __init__(self, rng: np.random.Generator, input_dim: int, hidden: int):
        self.input_dim = input_dim
        self.hidden = hidden
        self.weights = {}
        self.biases = {}
        for gate in self.GATES:
            self.weights[gate] = Parameter(_glorot(rng, (input_dim + hidden, hidden)))
            bias = np.zeros(hidden)
            if gate == "f":
                bias += 1.0  # standard forget-gate bias
            self.biases[gate] = Parameter(bias)

    def init_state(self) -> tuple[Tensor, Tensor]:
        zeros = np.zeros((1, self.hidden))
        return ad.constant(zeros), ad.constant(zeros)

    def step(self, x: Tensor, h: Tensor, c: Tensor) -> tuple[Tensor, Tensor]:
        z = ad.concat([x, h], axis=1)
        i = ad.sigmoid(ad.add(ad.matmul(z, self.weights["i"]), self.biases["i"]))
        f = ad.sigmoid(ad.add(ad.matmul(z, self.weights["f"]), self.biases["f"]))
        o = ad.sigmoid(ad.add(ad.matmul(z, self.weights["o"]), self.biases["o"]))
        g = ad.tanh(ad.add(ad.matmul(z, self.weights["g"]), self.biases["g"]))
        c_next = ad.add(ad.multiply(f, c), ad.multiply(i, g))
        h_next = ad.multiply(o, ad.tanh(c_next))
        return h_next, c_next

    def run(self, xs: list[Tensor]) -> list[Tensor]:
        h, c = self.init_state()
        states = []
        for x in xs:
            h, c = self.step(x, h, c)
            states.append(h)
        return states

    def params(self, prefix: str) -> dict[str, Parameter]:
        out = {}
        for gate in self.GATES:
            out[f"{prefix}.W_{gate}"] = self.weights[gate]
            out[f"{prefix}.b_{gate}"] = self.biases[gate]
        return out


class NeuralModel:
    """Shared plumbing: embedding matrix, classifier head, loss, predict."""

    name = "neural"

    def __init__(self, embedding_matrix: np.ndarray, fine_tune: bool = False):
        self.emb = Parameter(embedding_matrix.astype(np.float64), trainable=fine_tune)
        self.dim = embedding_matrix.shape[1]
        self.dropout_rate = 0.5

    # Subclasses fill these in.
    def forward(self, example: EncodedExample, train: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
        raise NotImplementedError

    def parameters(self) -> dict[str, Parameter]:
        raise NotImplementedError

    def classifier_parameters(self) -> dict[str, Parameter]:
        """Parameters the L2 penalty and norm constraint apply to."""
        return {"classifier.W": self.cls_w, "classifier.b": self.cls_b}

    def _make_head(self, rng: np.random.Generator, in_dim: int) -> None:
        self.cls_w = Parameter(_glorot(rng, (in_dim, N_CLASSES)))
        self.cls_b = Parameter(np.zeros(N_CLASSES))

    def _head(self, features: Tensor, train: bool,
              rng: np.random.Generator | None) -> Tensor:
        if train and self.dropout_rate > 0.0:
            if rng is None:
                raise ValidationError("training forward needs a random generator")
            features = ad.dropout(features, self.dropout_rate, rng, train=True)
        logits = ad.add(ad.matmul(features, self.cls_w), self.cls_b)
        return ad.softmax(logits)

    def _token_rows(self, example: EncodedExample) -> list[Tensor]:
        return [
            ad.embed_rows(self.emb, [tid]) for tid in example.token_ids
        ]

    def loss_batch(self, examples: list[EncodedExample], train: bool = True,
                   rng: np.random.Generator | None = None,
                   l2: float = 0.0) -> Tensor:
        """Mean cross entropy plus an L2 penalty on the classifier head."""
        if not examples:
            raise ValidationError("empty batch")
        total: Tensor | None = None
        for ex in examples:
            if ex.label is None:
                raise ValidationError("training example lacks a label")
            probs = self.forward(ex, train=train, rng=rng)
            onehot = np.zeros((1, N_CLASSES))
            onehot[0, ex.label] = 1.0
            nll = ad.cross_entropy(probs, ad.constant(onehot))
            total = nll if total is None else ad.add(total, nll)
        loss = ad.scale(total, 1.0 / len(examples))
        if l2 > 0.0:
            penalty: Tensor | None = None
            for p in self.classifier_parameters().values():
                term = ad.sum_all(ad.multiply(p, p))
                penalty = term if penalty is None else ad.add(penalty, term)
            loss = ad.add(loss, ad.scale(penalty, l2))
        return loss

    def predict(self, example: EncodedExample) -> int:
        probs = self.forward(example, train=False)
        return int(np.argmax(probs.values[0]))


class LstmClassifier(NeuralModel):
    """Unidirectional LSTM over word embeddings; classifies the final state."""

    name = "lstm"

    def __init__(self, embedding_matrix: np.ndarray, hidden: int = DEFAULT_HIDDEN,
                 seed: int = 0, fine_tune: bool = False):
        super().__init__(embedding_matrix, fine_tune)
        rng = np.random.default_rng(seed)
        self.hidden = hidden
        self.cell = LstmCell(rng, self.dim, hidden)
        self._make_head(rng, hidden)

    def forward(self, example, train=False, rng=None):
        states = self.cell.run(self._token_rows(example))
        return self._head(states[-1], train, rng)

    def parameters(self):
        out = {"embedding": self.emb}
        out.update(self.cell.params("lstm"))
        out.update(self.classifier_parameters())
        return out


class TanClassifier(NeuralModel):
    """BiLSTM encoder with a bypass attention network.

    With `target_augmented=True` the bypass consumes the concatenation
    of the word embedding and the pooled target vector; with False it
    consumes the word embedding alone (the minus variant).
    """

    def __init__(self, embedding_matrix: np.ndarray, hidden: int = DEFAULT_HIDDEN,
                 seed: int = 0, fine_tune: bool = False,
                 target_augmented: bool = True):
        super().__init__(embedding_matrix, fine_tune)
        rng = np.random.default_rng(seed)
        self.hidden = hidden
        self.target_augmented = target_augmented
        self.fw = LstmCell(rng, self.dim, hidden)
        self.bw = LstmCell(rng, self.dim, hidden)
        att_in = 2 * self.dim if target_augmented else self.dim
        self.att_w = Parameter(_glorot(rng, (att_in, 1)))
        self.att_b = Parameter(np.zeros(1))
        self._make_head(rng, 2 * hidden)

    @property
    def name(self):
        return "tan" if self.target_augmented else "tan_minus"

    def _attention(self, example: EncodedExample) -> Tensor:
        """Softmax-normalized bypass scores, shape (1, T)."""
        X = ad.embed_rows(self.emb, list(example.token_ids))
        if self.target_augmented:
            Z = ad.embed_rows(self.emb, list(example.target_ids))
            n = len(example.target_ids)
            pool = ad.matmul(ad.constant(np.full((1, n), 1.0 / n)), Z)
            tiled = ad.matmul(ad.constant(np.ones((len(example.token_ids), 1))), pool)
            E = ad.concat([X, tiled], axis=1)
        else:
            E = X
        scores = ad.add(ad.matmul(E, self.att_w), self.att_b)
        return ad.softmax(ad.transpose(scores))

    def attention_weights(self, example: EncodedExample) -> np.ndarray:
        return self._attention(example).values[0].copy()

    def forward(self, example, train=False, rng=None):
        rows = self._token_rows(example)
        fw_states = self.fw.run(rows)
        bw_states = self.bw.run(rows[::-1])[::-1]
        H = ad.concat(
            [ad.concat([f, b], axis=1) for f, b in zip(fw_states, bw_states)],
            axis=0,
        )
        attended = ad.matmul(self._attention(example), H)
        return self._head(attended, train, rng)

    def parameters(self):
        out = {"embedding": self.emb}
        out.update(self.fw.params("fw"))
        out.update(self.bw.params("bw"))
        out["attention.W"] = self.att_w
        out["attention.b"] = self.att_b
        out.update(self.classifier_parameters())
        return out


def tan_minus_twin(tan: TanClassifier) -> TanClassifier:
    """Minus-variant sharing the word-part of the bypass and all other weights.

    The full model's target-block weights are simply dropped; by the
    softmax shift cancellation both models compute identical attention
    and therefore identical outputs.
    """
    if not tan.target_augmented:
        raise ValidationError("twin construction expects the target-augmented model")
    twin = TanClassifier(
        tan.emb.values.copy(),
        hidden=tan.hidden,
        fine_tune=False,
        target_augmented=False,
    )
    twin.dropout_rate = tan.dropout_rate
    for cell_src, cell_dst in ((tan.fw, twin.fw), (tan.bw, twin.bw)):
        for gate in LstmCell.GATES:
            cell_dst.weights[gate].values[...] = cell_src.weights[gate].values
            cell_dst.biases[gate].values[...] = cell_src.biases[gate].values
    twin.att_w.values[...] = tan.att_w.values[: tan.dim]
    twin.att_b.values[...] = tan.att_b.values
    twin.cls_w.values[...] = tan.cls_w.values
    twin.cls_b.values[...] = tan.cls_b.values
    return twin


def check_attention_target_invariance(
    model: TanClassifier,
    token_ids,
    target_ids_a,
    target_ids_b,
) -> float:
    """Max absolute attention difference across two target encodings."""
    ex_a = EncodedExample(tuple(token_ids), tuple(target_ids_a))
    ex_b = EncodedExample(tuple(token_ids), tuple(target_ids_b))
    wa = model.attention_weights(ex_a)
    wb = model.attention_weights(ex_b)
    return float(np.max(np.abs(wa - wb)))


class CnnClassifier(NeuralModel):
    """1-D convolutional sentence classifier with max-over-time pooling.

    Filter banks over widths (3, 4, 5), 100 filters each, ReLU
    activation; inputs shorter than the largest width are padded with
    zero vectors.  The squared L2 norm of each classifier weight column
    is clamped to `norm_limit` after every update (see training loop).
    """

    name = "cnn"

    def __init__(self, embedding_matrix: np.ndarray, seed: int = 0,
                 fine_tune: bool = False,
                 filter_widths: tuple[int, ...] = CNN_FILTER_WIDTHS,
                 n_filters: int = CNN_FILTERS_PER_WIDTH):
        super().__init__(embedding_matrix, fine_tune)
        rng = np.random.default_rng(seed)
        self.filter_widths = filter_widths
        self.n_filters = n_filters
        self.filters = {}
        self.filter_biases = {}
        for w in filter_widths:
            self.filters[w] = Parameter(_glorot(rng, (w * self.dim, n_filters)))
            self.filter_biases[w] = Parameter(np.zeros(n_filters))
        self._make_head(rng, n_filters * len(filter_widths))

    def forward(self, example, train=False, rng=None):
        X = ad.embed_rows(self.emb, list(example.token_ids))
        T = X.shape[0]
        widest = max(self.filter_widths)
        if T < widest:
            pad = ad.constant(np.zeros((widest - T, self.dim)))
            X = ad.concat([X, pad], axis=0)
        pools = []
        for w in self.filter_widths:
            windows = ad.im2col_rows(X, w)
            act = ad.relu(
                ad.add(ad.matmul(windows, self.filters[w]), self.filter_biases[w])
            )
            pools.append(ad.max_over_time(act))
        features = ad.concat(pools, axis=1)
        return self._head(features, train, rng)

    def parameters(self):
        out = {"embedding": self.emb}
        for w in self.filter_widths:
            out[f"conv{w}.W"] = self.filters[w]
            out[f"conv{w}.b"] = self.filter_biases[w]
        out.update(self.classifier_parameters())
        return out


MODEL_NAMES = ("lstm", "tan", "tan_minus", "cnn")


def build_model(name: str, embedding_matrix: np.ndarray, hidden: int = DEFAULT_HIDDEN,
                seed: int = 0, fine_tune: bool = False) -> NeuralModel:
    if name == "lstm":
        return LstmClassifier(embedding_matrix, hidden=hidden, seed=seed,
                              fine_tune=fine_tune)
    if name == "tan":
        return TanClassifier(embedding_matrix, hidden=hidden, seed=seed,
                             fine_tune=fine_tune, target_augmented=True)
    if name == "tan_minus":
        return TanClassifier(embedding_matrix, hidden=hidden, seed=seed,
                             fine_tune=fine_tune, target_augmented=False)
    if name == "cnn":
        return CnnClassifier(embedding_matrix, seed=seed, fine_tune=fine_tune)
    raise ValidationError(f"unknown model {name!r} (expected one of {MODEL_NAMES})")
