"""The shared preprocessing pipeline, stage by stage.

Case-folding and tokenization run for every model.  Microblog inputs
additionally get lexicon normalization and hashtag segmentation.  The
classical mode (for SVM features) then removes stopwords and stems;
the embedding mode keeps surface forms so pre-trained vectors resolve.
"""

from stancebench.corpus import Post, StanceLabel
from stancebench.porter import porter_stem
from stancebench.preprocess import (
    PreprocessConfig,
    PreprocessMode,
    load_default_frequency_table,
    load_default_normalization,
    load_default_stopwords,
    preprocess_post,
    tokenize,
)

lex = load_default_normalization()
freq = load_default_frequency_table()
stop = load_default_stopwords()

tweet = Post(
    id="42",
    topic="FM",
    text="Can't believe u said that, AAF! #powertowomen http://a.io #SemST",
    gold=StanceLabel.FAVOR,
)

print("raw:", tweet.text)
print("\ntokenized:", list(tokenize(tweet.text.lower())))

embedding_cfg = PreprocessConfig(mode=PreprocessMode.EMBEDDING)
emb = preprocess_post(tweet, embedding_cfg, lex=lex, freq=freq)
print("\nembedding mode (no stemming, surface forms kept):")
print(" ", list(emb))
print("  hashtag-derived tokens:",
      [t for t, h in zip(emb.tokens, emb.from_hashtag) if h])

classical_cfg = PreprocessConfig(
    mode=PreprocessMode.CLASSICAL, stopword_list=stop
)
cls = preprocess_post(tweet, classical_cfg, lex=lex, freq=freq)
print("\nclassical mode (stopwords removed, stemmed):")
print(" ", list(cls))
print("  stemmed tokens:", [t for t, s in zip(cls.tokens, cls.stemmed) if s])

# The stemmer itself follows the published suffix-stripping steps.
for word in ("caresses", "relational", "running", "happiness", "sky"):
    print(f"  stem({word}) = {porter_stem(word)}")

# The '#SemST' campaign marker is dropped by default; disable to keep it.
keep = preprocess_post(
    tweet, PreprocessConfig(mode=PreprocessMode.EMBEDDING, drop_marker=False),
    lex=lex, freq=freq,
)
print("\nwith drop_marker=False the marker splits into:", list(keep)[-2:])
