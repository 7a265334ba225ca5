"""End-to-end: vote-scheme training, evaluation, and comparison.

Two compact neural models train on a synthetic separable topic through
the double-voting scheme (majority over checkpoint epochs inside each
run, then majority over runs with disjoint validation folds), a
baseline SVM predicts once, and everything lands in one comparison
table with the published reference rows attached.  Sizes are kept tiny
so the demo runs in seconds.
"""

import numpy as np

from stancebench.corpus import Post, StanceLabel, TopicDataset
from stancebench.evaluation import (
    all_models_missed,
    macro_f1_favor_against,
    render_comparison,
)
from stancebench.runner import (
    majority_class_baseline,
    random_embedding_table,
    run_neural_model,
    run_svm_model,
)
from stancebench.training import TrainSchedule
from stancebench.vote import VoteConfig

F, A, N = StanceLabel.FAVOR, StanceLabel.AGAINST, StanceLabel.NONE

WORDS = {
    F: ["support", "favor", "agree", "yes", "love"],
    A: ["oppose", "against", "reject", "no", "hate"],
    N: ["weather", "coffee", "traffic", "lunch", "music"],
}

rng = np.random.default_rng(1)
train, test = [], []
i = 0
for label, words in WORDS.items():
    for k in range(16):
        toks = [words[int(j)] for j in rng.integers(0, len(words), 4)]
        text = " ".join(toks + ["about", "the", "topic"])
        post = Post(f"v{i:04d}", "AT", text, label)
        (train if k < 12 else test).append(post)
        i += 1
ds = TopicDataset("AT", train=train, test=test)
gold = [p.gold for p in ds.test]

table = random_embedding_table(dim=12, seed=0)
schedule = TrainSchedule(
    learning_rate=1e-2, batch_size=12, dropout=0.3, epochs=8, seed=0, hidden=6
)
vote_cfg = VoteConfig(
    num_runs=2, validation_fraction=0.15, checkpoint_epochs=(6, 7, 8), master_seed=5
)

reports = {}
predictions = {}
for name in ("tan_minus", "cnn"):
    out = run_neural_model(ds, name, table, schedule=schedule, vote_cfg=vote_cfg)
    predictions[name] = out.predictions
    reports[name] = {"AT": macro_f1_favor_against(out.predictions, gold)}
    print(f"{name}: vote matrix holds {len(out.matrix.labels)} cells, "
          f"official {reports[name]['AT'].official:.3f}")

svm_out = run_svm_model(ds, "sen_svm", seed=0)
predictions["sen_svm"] = svm_out.predictions
reports["sen_svm"] = {"AT": macro_f1_favor_against(svm_out.predictions, gold)}

base = majority_class_baseline(ds)
predictions["majority_baseline"] = base.predictions
reports["majority_baseline"] = {"AT": macro_f1_favor_against(base.predictions, gold)}

comparison = render_comparison(reports, topics=["AT"], reference_family="semeval")
print("\n" + comparison.to_text())

missed = all_models_missed(predictions, gold, ds.test)
print(f"posts every model missed: {len(missed.all_posts())}")
