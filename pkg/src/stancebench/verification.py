"""Self-contained verification suites.

Two families: (1) the attention target-invariance suite, which checks
numerically that the bypass attention weights ignore the target
encoding (the affine target contribution is constant across positions,
so the softmax cancels it), and (2) finite-difference gradient checks
for every primitive op and for the full model graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import GradCheckReport, Parameter, grad_check
from .models import (
    CnnClassifier,
    EncodedExample,
    LstmClassifier,
    TanClassifier,
    tan_minus_twin,
)

ATTENTION_INVARIANCE_TOL = 1e-10
PAIRED_FORWARD_TOL = 1e-12


@dataclass
class InvarianceReport:
    trials: int
    posts_per_trial: int
    max_attention_deviation: float
    paired_pairs: int
    max_paired_forward_diff: float

    @property
    def passed(self) -> bool:
        return (
            self.max_attention_deviation <= ATTENTION_INVARIANCE_TOL
            and self.max_paired_forward_diff <= PAIRED_FORWARD_TOL
        )


def _random_example(rng: np.random.Generator, vocab: int,
                    max_len: int = 12, max_target: int = 4) -> EncodedExample:
    t = int(rng.integers(1, max_len + 1))
    n = int(rng.integers(1, max_target + 1))
    return EncodedExample(
        token_ids=tuple(int(i) for i in rng.integers(0, vocab, t)),
        target_ids=tuple(int(i) for i in rng.integers(0, vocab, n)),
    )


def attention_invariance_suite(
    trials: int = 100,
    posts_per_trial: int = 10,
    paired_pairs: int = 20,
    seed: int = 0,
    dim: int = 8,
    hidden: int = 6,
    vocab: int = 40,
) -> InvarianceReport:
    """Random models x random posts x random target pairs."""
    rng = np.random.default_rng(seed)
    max_dev = 0.0
    for trial in range(trials):
        emb = rng.normal(0.0, 0.5, (vocab, dim))
        model = TanClassifier(emb, hidden=hidden, seed=trial, target_augmented=True)
        for _ in range(posts_per_trial):
            ex = _random_example(rng, vocab)
            target_b = tuple(
                int(i) for i in rng.integers(0, vocab, int(rng.integers(1, 5)))
            )
            ex_b = EncodedExample(ex.token_ids, target_b)
            dev = float(
                np.max(
                    np.abs(
                        model.attention_weights(ex) - model.attention_weights(ex_b)
                    )
                )
            )
            max_dev = max(max_dev, dev)

    max_pair = 0.0
    for pair in range(paired_pairs):
        emb = rng.normal(0.0, 0.5, (vocab, dim))
        model = TanClassifier(emb, hidden=hidden, seed=1000 + pair, target_augmented=True)
        # Make the target block of the bypass weights arbitrary and large.
        model.att_w.values[dim:] = rng.normal(0.0, 2.0, (dim, 1))
        twin = tan_minus_twin(model)
        ex = _random_example(rng, vocab)
        p_full = model.forward(ex).values
        p_minus = twin.forward(ex).values
        max_pair = max(max_pair, float(np.max(np.abs(p_full - p_minus))))

    return InvarianceReport(
        trials=trials,
        posts_per_trial=posts_per_trial,
        max_attention_deviation=max_dev,
        paired_pairs=paired_pairs,
        max_paired_forward_diff=max_pair,
    )


def op_gradcheck_suite(seed: int = 0, max_coords: int = 200) -> dict[str, GradCheckReport]:
    """Finite-difference checks for each primitive operation."""
    rng = np.random.default_rng(seed)
    reports: dict[str, GradCheckReport] = {}

    def check(name, params, builder):
        reports[name] = grad_check(builder, params, max_coords=max_coords)

    a = Parameter(rng.normal(0, 1, (3, 4)))
    b = Parameter(rng.normal(0, 1, (3, 4)))
    check("add", {"a": a, "b": b}, lambda: ad.sum_all(ad.tanh(ad.add(a, b))))

    bias = Parameter(rng.normal(0, 1, 4))
    check(
        "add_bias_row",
        {"a": a, "bias": bias},
        lambda: ad.sum_all(ad.tanh(ad.add(a, bias))),
    )

    check("multiply", {"a": a, "b": b}, lambda: ad.sum_all(ad.tanh(ad.multiply(a, b))))
    check("scale", {"a": a}, lambda: ad.sum_all(ad.tanh(ad.scale(a, -1.7))))

    m1 = Parameter(rng.normal(0, 1, (3, 5)))
    m2 = Parameter(rng.normal(0, 1, (5, 2)))
    check("matmul", {"m1": m1, "m2": m2}, lambda: ad.sum_all(ad.tanh(ad.matmul(m1, m2))))

    c1 = Parameter(rng.normal(0, 1, (2, 3)))
    c2 = Parameter(rng.normal(0, 1, (2, 2)))
    check(
        "concat",
        {"c1": c1, "c2": c2},
        lambda: ad.sum_all(ad.tanh(ad.concat([c1, c2], axis=1))),
    )

    check("transpose", {"m1": m1}, lambda: ad.sum_all(ad.tanh(ad.transpose(m1))))
    check("tanh", {"a": a}, lambda: ad.sum_all(ad.tanh(a)))
    check("sigmoid", {"a": a}, lambda: ad.sum_all(ad.sigmoid(a)))
    # Shift away from zero so finite differences never straddle the kink.
    r = Parameter(rng.normal(0, 1, (3, 4)) + np.sign(rng.normal(0, 1, (3, 4))) * 0.1)
    check("relu", {"r": r}, lambda: ad.sum_all(ad.relu(r)))

    s = Parameter(rng.normal(0, 1, (2, 5)))
    check("softmax", {"s": s}, lambda: ad.sum_all(ad.tanh(ad.softmax(s))))

    logits = Parameter(rng.normal(0, 1, (3, 4)))
    onehot = np.zeros((3, 4))
    onehot[np.arange(3), [0, 2, 1]] = 1.0
    check(
        "cross_entropy",
        {"logits": logits},
        lambda: ad.cross_entropy(ad.softmax(logits), ad.constant(onehot)),
    )

    d = Parameter(rng.normal(0, 1, (4, 6)))
    check(
        "dropout",
        {"d": d},
        lambda: ad.sum_all(
            ad.tanh(ad.dropout(d, 0.5, np.random.default_rng(7), train=True))
        ),
    )

    # Distinct values keep the argmax stable under the probe step.
    mt = Parameter(np.arange(12).reshape(4, 3) * 0.37 + rng.normal(0, 0.01, (4, 3)))
    check("max_over_time", {"mt": mt}, lambda: ad.sum_all(ad.tanh(ad.max_over_time(mt))))

    check("sum_all", {"a": a}, lambda: ad.sum_all(a))

    table = Parameter(rng.normal(0, 1, (6, 3)))
    idx = [0, 2, 2, 5]
    check(
        "embed_rows",
        {"table": table},
        lambda: ad.sum_all(ad.tanh(ad.embed_rows(table, idx))),
    )

    x = Parameter(rng.normal(0, 1, (5, 3)))
    check(
        "im2col_rows",
        {"x": x},
        lambda: ad.sum_all(ad.tanh(ad.im2col_rows(x, 3))),
    )
    return reports


def model_gradcheck_suite(seed: int = 0, max_coords: int = 200) -> dict[str, GradCheckReport]:
    """Finite-difference checks through the complete model graphs."""
    rng = np.random.default_rng(seed)
    vocab, dim, hidden = 9, 5, 4
    emb = rng.normal(0.0, 0.5, (vocab, dim))
    ex = EncodedExample(
        token_ids=(1, 4, 7, 2), target_ids=(0, 3), label=1
    )
    reports: dict[str, GradCheckReport] = {}

    lstm = LstmClassifier(emb, hidden=hidden, seed=seed, fine_tune=True)
    reports["lstm"] = grad_check(
        lambda: lstm.loss_batch([ex], train=False),
        lstm.parameters(),
        max_coords=max_coords,
    )

    tan = TanClassifier(emb, hidden=hidden, seed=seed, fine_tune=True)
    reports["bilstm_attention"] = grad_check(
        lambda: tan.loss_batch([ex], train=False),
        tan.parameters(),
        max_coords=max_coords,
    )

    cnn = CnnClassifier(emb, seed=seed, fine_tune=True, n_filters=6)
    reports["cnn"] = grad_check(
        lambda: cnn.loss_batch([ex], train=False),
        cnn.parameters(),
        max_coords=max_coords,
    )
    return reports
