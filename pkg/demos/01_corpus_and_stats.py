"""Loading the two corpus families and checking class statistics.

Builds a small SemEval-format file and an MPCHI-style CSV in a temp
directory, loads both, prints per-class counts, and shows the seeded
stratified split used for MPCHI topics.
"""

import tempfile
from pathlib import Path

from stancebench.corpus import (
    PUBLISHED_COUNTS,
    SplitSpec,
    dataset_stats,
    load_mpchi,
    load_semeval,
    stratified_split,
)

work = Path(tempfile.mkdtemp(prefix="stancebench_demo_"))

# --- SemEval layout: tab-separated with ID/Target/Tweet/Stance columns ---
semeval = work / "at_train.tsv"
rows = [
    ("101", "Atheism", "science explains the world #SemST", "FAVOR"),
    ("102", "Atheism", "prayer gives me strength #SemST", "AGAINST"),
    ("103", "Atheism", "the lord watches over us #SemST", "AGAINST"),
    ("104", "Atheism", "the game starts at seven #SemST", "NONE"),
]
semeval.write_text(
    "ID\tTarget\tTweet\tStance\n"
    + "".join("\t".join(r) + "\n" for r in rows),
    encoding="utf-8",
)
ds = load_semeval(semeval, split="train")
print(f"loaded topic {ds.topic!r}: {len(ds.train)} training posts")
print("per-class stats:", dataset_stats(ds)["train"])

# --- MPCHI layout: delimited sentences, split locally ---
mpchi = work / "mmr.csv"
lines = ["Sentence,Stance"]
labels = ["FAVOR"] * 7 + ["AGAINST"] * 9 + ["NONE"] * 8
for i, lab in enumerate(labels):
    lines.append(f"a consumer health sentence number {i},{lab}")
mpchi.write_text("\n".join(lines) + "\n", encoding="utf-8")

ds_mmr = load_mpchi(mpchi, topic="MMR", split=SplitSpec(train_fraction=0.7, seed=11))
stats = dataset_stats(ds_mmr)
print("\nMMR after seeded 70/30 stratified split:")
print("  train:", stats["train"])
print("  test: ", stats["test"])

# The split is deterministic and ignores input order.
again, _ = stratified_split(list(reversed(ds_mmr.train + ds_mmr.test)),
                            SplitSpec(train_fraction=0.7, seed=11))
print("split reproducible under seed:", {p.id for p in again} == {p.id for p in ds_mmr.train})

# Reference: the published class counts the official files must match.
print("\npublished counts for HC:", PUBLISHED_COUNTS["HC"])
