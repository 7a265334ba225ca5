"""The two SVM stance models on a small synthetic health topic.

The single-stage model uses POS-filtered stance-vector counts, a
lexicon sentiment flag, and bag-of-words unigrams.  The two-step model
first separates neutral posts from relevant ones (subjectivity +
surface features), then classifies the relevant ones as favor/against
(subjectivity, word and character n-grams, target-term presence).
Both train with the stochastic subgradient (Pegasos) solver.
"""

from stancebench.corpus import Post, StanceLabel
from stancebench.evaluation import macro_f1_favor_against
from stancebench.svm import SenSvm, SvmTrainConfig, TwoStepSvm

F, A, N = StanceLabel.FAVOR, StanceLabel.AGAINST, StanceLabel.NONE

TEXTS = {
    F: [
        "vaccines clearly cause autism in children",
        "autism rates rose right after vaccination",
        "my child changed after the mmr shot",
        "the vaccine autism link looks real to me",
        "more proof vaccines trigger autism",
    ],
    A: [
        "no credible study links vaccines and autism",
        "the vaccine autism myth was debunked years ago",
        "large trials found no autism association",
        "science shows vaccines are safe for children",
        "doctors agree the vaccine is safe",
    ],
    N: [
        "the clinic opens at nine tomorrow",
        "many parents ask their doctor questions",
        "a new hospital wing opened downtown",
        "the article reviews recent health news",
        "appointment slots fill up quickly",
    ],
}

train, test = [], []
i = 0
for label, rows in TEXTS.items():
    for k, text in enumerate(rows):
        post = Post(f"d{i:03d}", "MMR", text, label)
        (train if k < 4 else test).append(post)
        i += 1

cfg = SvmTrainConfig(lambda_=0.01, epochs=150, seed=7)

sen = SenSvm("MMR", cfg).fit(train)
sen_preds = [sen.predict(p) for p in test]

two = TwoStepSvm("MMR", cfg).fit(train)
two_preds = [two.predict(p) for p in test]

gold = [p.gold for p in test]
print("gold:        ", [g.value for g in gold])
print("single-stage:", [p.value for p in sen_preds])
print("two-step:    ", [p.value for p in two_preds])

for name, preds in (("single-stage", sen_preds), ("two-step", two_preds)):
    report = macro_f1_favor_against(preds, gold)
    print(f"\n{name} official metric: {report.official:.3f}")
    print(f"  favor f1 {report.f1['FAVOR']:.3f}, against f1 {report.f1['AGAINST']:.3f}")

# The cascade never emits a polar label once stage 1 said NONE.
stage1_none = [
    p for p in test
    if two.predict(p) is StanceLabel.NONE
]
print(f"\nposts the cascade routed to NONE: {[p.id for p in stage1_none]}")
