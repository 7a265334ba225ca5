import numpy as np
import pytest

from stancebench.corpus import Post, StanceLabel
from stancebench.errors import ValidationError
from stancebench.embeddings import EmbeddingTable
from stancebench.models import EncodedExample, TokenIndexer, build_model
from stancebench.training import (
    TrainSchedule,
    clamp_classifier_norm,
    encode_posts,
    eval_loss,
    load_checkpoint,
    restore_parameters,
    save_checkpoint,
    train,
)


def _fixture_examples(rng, n=10, vocab=24, dim=8):
    emb = rng.normal(0, 0.5, (vocab, dim))
    examples = []
    for i in range(n):
        label = i % 3
        ids = (label * 4,) + tuple(int(x) for x in rng.integers(0, vocab, 5))
        examples.append(EncodedExample(ids, (1, 2), label=label))
    return emb, examples


class TestTrainLoop:
    def test_two_runs_identical_checkpoints(self, rng, tmp_path):
        emb, examples = _fixture_examples(rng)
        sched = TrainSchedule(
            learning_rate=5e-3, batch_size=5, dropout=0.5, epochs=8, seed=42
        )
        paths = []
        for name in ("a", "b"):
            model = build_model("lstm", emb, hidden=6, seed=42)
            train(model, examples, sched)
            path = tmp_path / f"{name}.ckpt"
            save_checkpoint(model, path, sched)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_eval_loss_is_dropout_free_and_stable(self, rng):
        emb, examples = _fixture_examples(rng)
        model = build_model("tan_minus", emb, hidden=6, seed=1)
        assert eval_loss(model, examples) == eval_loss(model, examples)

    def test_validation_trace_recorded(self, rng):
        emb, examples = _fixture_examples(rng, n=12)
        model = build_model("lstm", emb, hidden=6, seed=0)
        sched = TrainSchedule(learning_rate=5e-3, batch_size=6, epochs=4, seed=0,
                              dropout=0.0)
        result = train(model, examples[:8], sched, val_examples=examples[8:])
        assert len(result.val_trace) == 4
        assert all(0.0 <= v <= 1.0 for v in result.val_trace)

    def test_checkpoint_predictions_at_epochs(self, rng):
        emb, examples = _fixture_examples(rng, n=9)
        model = build_model("cnn", emb, seed=0)
        sched = TrainSchedule(learning_rate=5e-3, batch_size=9, epochs=5, seed=0,
                              dropout=0.0)
        result = train(
            model,
            examples[:6],
            sched,
            test_examples=examples[6:],
            checkpoint_epochs=(3, 5),
        )
        assert set(result.checkpoint_predictions) == {3, 5}
        assert all(
            len(v) == 3 and all(isinstance(s, StanceLabel) for s in v)
            for v in result.checkpoint_predictions.values()
        )

    def test_empty_training_set_rejected(self, rng):
        emb, _ = _fixture_examples(rng)
        model = build_model("lstm", emb, hidden=4, seed=0)
        with pytest.raises(ValidationError):
            train(model, [], TrainSchedule(epochs=1))

    def test_norm_constraint_holds_after_every_update(self, rng):
        emb, examples = _fixture_examples(rng)
        model = build_model("cnn", emb, seed=0)
        limit = 0.05  # tight limit so it actually binds
        sched = TrainSchedule(
            learning_rate=1e-2, batch_size=5, epochs=3, seed=0, norm_limit=limit,
            dropout=0.0,
        )
        train(model, examples, sched)
        w = model.cls_w.values
        for c in range(w.shape[1]):
            assert float(w[:, c] @ w[:, c]) <= limit + 1e-12

    def test_clamp_is_noop_under_limit(self, rng):
        emb, _ = _fixture_examples(rng)
        model = build_model("cnn", emb, seed=0)
        before = model.cls_w.values.copy()
        clamp_classifier_norm(model, 1e9)
        np.testing.assert_array_equal(before, model.cls_w.values)

    def test_lr_decay_applied(self, rng):
        emb, examples = _fixture_examples(rng)
        model = build_model("cnn", emb, seed=0)
        sched = TrainSchedule(
            learning_rate=1e-2, batch_size=10, epochs=3, seed=0, lr_decay=0.5,
            dropout=0.0,
        )
        # decay multiplies per epoch; after 3 epochs lr = 1e-2 * 0.5^3
        result = train(model, examples, sched)
        assert result is not None  # decay path exercised without error


class TestCheckpointIO:
    def test_roundtrip_restores_values(self, rng, tmp_path):
        emb, examples = _fixture_examples(rng)
        model = build_model("tan", emb, hidden=5, seed=2)
        sched = TrainSchedule(epochs=1, seed=2)
        path = tmp_path / "m.ckpt"
        save_checkpoint(model, path, sched)
        params, sched_hash = load_checkpoint(path)
        assert sched_hash == sched.hash()
        fresh = build_model("tan", emb, hidden=5, seed=99)
        restore_parameters(fresh, params)
        ex = examples[0]
        np.testing.assert_array_equal(
            fresh.forward(ex).values, model.forward(ex).values
        )

    def test_mismatched_checkpoint_rejected(self, rng, tmp_path):
        emb, _ = _fixture_examples(rng)
        model = build_model("tan", emb, hidden=5, seed=2)
        path = tmp_path / "m.ckpt"
        save_checkpoint(model, path, TrainSchedule(epochs=1))
        params, _ = load_checkpoint(path)
        other = build_model("lstm", emb, hidden=5, seed=2)
        with pytest.raises(ValidationError):
            restore_parameters(other, params)


class TestEncodePosts:
    def test_encoding_and_labels(self):
        table = EmbeddingTable({}, np.zeros((0, 6)), oov_seed=0)
        indexer = TokenIndexer(table)
        posts = [
            Post("a", "AT", "God exists #SemST", StanceLabel.AGAINST),
            Post("b", "AT", "religion is fading", StanceLabel.FAVOR),
        ]
        examples = encode_posts(posts, indexer, "AT")
        assert examples[0].label == 1 and examples[1].label == 0
        assert examples[0].target_ids == examples[1].target_ids
        assert len(examples[0].token_ids) > 0

    def test_marker_only_post_gets_placeholder(self):
        table = EmbeddingTable({}, np.zeros((0, 4)), oov_seed=0)
        indexer = TokenIndexer(table)
        posts = [Post("a", "AT", "#SemST", StanceLabel.NONE)]
        examples = encode_posts(posts, indexer, "AT")
        assert len(examples[0].token_ids) == 1
