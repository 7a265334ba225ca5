"""Why the bypass attention cannot see its target input.

The attention score of token t is an affine map over the concatenation
of the word embedding and the pooled target vector.  The target block
contributes the same additive constant at every position, and the
softmax normalization cancels any constant shift, so the attention
weights are identical for any two targets.  Consequently the
target-augmented model and its minus variant (word-only bypass) are the
same function whenever their shared weights coincide.
"""

import numpy as np

from stancebench.models import (
    EncodedExample,
    TanClassifier,
    check_attention_target_invariance,
    tan_minus_twin,
)
from stancebench.verification import attention_invariance_suite

rng = np.random.default_rng(4)
emb = rng.normal(0, 0.5, (30, 8))
model = TanClassifier(emb, hidden=6, seed=4, target_augmented=True)

tokens = tuple(int(i) for i in rng.integers(0, 30, 7))
target_a = (1, 2, 3)
target_b = (25, 26)

wa = model.attention_weights(EncodedExample(tokens, target_a))
wb = model.attention_weights(EncodedExample(tokens, target_b))
print("attention with target A:", wa.round(6))
print("attention with target B:", wb.round(6))
print("max difference:", np.abs(wa - wb).max())

dev = check_attention_target_invariance(model, tokens, target_a, target_b)
print(f"invariance deviation: {dev:.2e}")

# Make the target block of the bypass huge; the output still cannot move.
model.att_w.values[model.dim:] = rng.normal(0, 10.0, (model.dim, 1))
dev = check_attention_target_invariance(model, tokens, target_a, target_b)
print(f"after inflating target weights: {dev:.2e}")

# The minus variant sharing the word-block weights is the same function.
twin = tan_minus_twin(model)
ex = EncodedExample(tokens, target_a)
diff = np.abs(model.forward(ex).values - twin.forward(ex).values).max()
print(f"full vs minus forward difference: {diff:.2e}")

# The full randomized suite: 100 models x 10 posts x random target pairs.
report = attention_invariance_suite(trials=100, posts_per_trial=10, seed=0)
print(
    f"\nsuite: max attention deviation {report.max_attention_deviation:.2e}, "
    f"max paired forward diff {report.max_paired_forward_diff:.2e}, "
    f"passed={report.passed}"
)
