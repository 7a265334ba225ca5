"""Splitting concatenated hashtags into word sequences.

A dynamic program minimizes the summed word cost
log((rank + 1) * log V) over a frequency-ordered word list; unknown
material is only admitted as single characters with a penalty, so some
segmentation always exists.  An exhaustive enumeration over all
2^(n-1) split points verifies the DP on short tags.
"""

from stancebench.preprocess import load_default_frequency_table
from stancebench.segment import (
    UnigramFrequencyTable,
    brute_force_segment,
    segment_hashtag,
)

freq = load_default_frequency_table()

for tag in ("powertowomen", "climatechange", "readyforhillary", "genderequality"):
    print(f"#{tag:<18} -> {' '.join(segment_hashtag(tag, freq))}")

# Costs grow with rank, so frequent words are preferred.
for word in ("to", "power", "women"):
    print(f"cost({word!r}) = {freq.cost(word):.4f} (rank {freq.rank(word)})")

# The alternative split loses because 'tow'/'omen' are not in the list:
# multi-character out-of-vocabulary chunks are not legal segments at all.
print("'tow' usable as a segment:", freq.cost_units("tow") is not None)

# On a toy lexicon the DP answer equals exhaustive enumeration.
toy = UnigramFrequencyTable(["cat", "dog", "catd"])
for tag in ("catdog", "catdcat", "dogcatdog"):
    dp = segment_hashtag(tag, toy)
    brute = brute_force_segment(tag, toy)
    assert dp == brute
    print(f"{tag}: dp={dp} brute={brute}")

# Unknown substrings fall back to single characters.
print("fallback:", segment_hashtag("catqx", toy))
