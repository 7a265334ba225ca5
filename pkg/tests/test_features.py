import numpy as np
import pytest

from stancebench.corpus import Post, StanceLabel
from stancebench.errors import ConfigError, ValidationError
from stancebench.features import (
    CoarsePosTag,
    CoarsePosTagger,
    FeaturePipeline,
    FeatureVector,
    SentimentPolarity,
    SubjectivityLexicon,
    Vocabulary,
    bow_unigrams,
    coarse_pos_tag,
    concat_features,
    make_view,
    ngrams,
    sentiment_feature,
    sentiment_polarity,
    stance_vector,
    subjectivity_features,
    surface_features,
)
from stancebench.preprocess import PreprocessConfig


@pytest.fixture
def lex():
    return SubjectivityLexicon(
        {
            "good": ("strong", "pos"),
            "great": ("strong", "pos"),
            "bad": ("strong", "neg"),
            "awful": ("strong", "neg"),
            "nice": ("weak", "pos"),
            "poor": ("weak", "neg"),
        }
    )


def _vocab(*keys) -> Vocabulary:
    v = Vocabulary()
    for k in keys:
        v.add(k)
    v.freeze()
    return v


class TestFeatureVector:
    def test_invariants_enforced(self):
        with pytest.raises(ValidationError):
            FeatureVector((1, 0), (1.0, 1.0), 2)  # decreasing indices
        with pytest.raises(ValidationError):
            FeatureVector((0,), (0.0,), 1)  # explicit zero
        with pytest.raises(ValidationError):
            FeatureVector((3,), (1.0,), 2)  # out of range

    def test_concat_offsets(self):
        a = FeatureVector((0,), (1.0,), 2)
        b = FeatureVector((1,), (2.0,), 3)
        c = concat_features([a, b])
        assert c.dimension == 5
        assert c.indices == (0, 3) and c.values == (1.0, 2.0)

    def test_dense_roundtrip(self):
        v = FeatureVector((1, 4), (2.0, 3.0), 6)
        assert list(v.to_dense()) == [0, 2.0, 0, 0, 3.0, 0]


class TestBow:
    def test_counting(self):
        v = bow_unigrams(["run", "run", "fast"], _vocab("run", "fast"))
        assert v.indices == (0, 1) and v.values == (2.0, 1.0)

    def test_empty_tokens(self):
        v = bow_unigrams([], _vocab("x"))
        assert v.indices == ()

    def test_frozen_vocab_skips_unseen(self):
        vocab = _vocab("known")
        v = bow_unigrams(["known", "zzz"], vocab)
        assert v.indices == (0,) and v.values == (1.0,)
        assert "zzz" not in vocab


class TestNgrams:
    def test_word_bigrams(self):
        vocab = Vocabulary()
        v = ngrams(["a", "b", "c"], 2, "word", vocab)
        assert "a b" in vocab and "b c" in vocab
        assert sum(v.values) == 2.0

    def test_char_trigrams(self):
        vocab = Vocabulary()
        ngrams(["abcd"], 3, "char", vocab)
        assert "abc" in vocab and "bcd" in vocab

    def test_degenerate_longer_than_sequence(self):
        v = ngrams(["a", "b", "c"], 5, "word", _vocab("x"))
        assert v.indices == ()

    def test_bad_n_rejected(self):
        with pytest.raises(ValidationError):
            ngrams(["a"], 0, "word", Vocabulary())


class TestStanceVector:
    def test_pos_filter(self):
        tokens = ["vaccines", "cause", "autism", "the"]
        tags = [
            CoarsePosTag.NOUN,
            CoarsePosTag.VERB,
            CoarsePosTag.NOUN,
            CoarsePosTag.OTHER,
        ]
        vocab = Vocabulary()
        v = stance_vector(tokens, tags, vocab)
        assert set(vocab._index) == {"vaccines", "cause", "autism"}
        assert sum(v.values) == 3.0

    def test_all_other_empty(self):
        v = stance_vector(["the", "a"], [CoarsePosTag.OTHER] * 2, _vocab("x"))
        assert v.indices == ()

    def test_duplicate_noun_counts(self):
        vocab = Vocabulary()
        v = stance_vector(["war", "war"], [CoarsePosTag.NOUN] * 2, vocab)
        assert v.values == (2.0,)

    def test_misalignment_rejected(self):
        with pytest.raises(ValidationError):
            stance_vector(["a"], [], Vocabulary())

    def test_equals_bow_of_filtered_tokens(self, rng):
        # construction property on random fixtures
        tags_pool = list(CoarsePosTag)
        words = ["alpha", "beta", "gamma", "delta"]
        for _ in range(25):
            n = int(rng.integers(1, 10))
            tokens = [words[int(i)] for i in rng.integers(0, len(words), n)]
            tags = [tags_pool[int(i)] for i in rng.integers(0, len(tags_pool), n)]
            filtered = [
                t
                for t, tag in zip(tokens, tags)
                if tag is not CoarsePosTag.OTHER
            ]
            v1 = stance_vector(tokens, tags, _vocab(*words))
            v2 = bow_unigrams(filtered, _vocab(*words))
            assert v1 == v2


class TestSentiment:
    def test_positive_majority(self, lex):
        v = sentiment_polarity(["good", "great", "day"], lex)
        assert v is SentimentPolarity.POSITIVE

    def test_no_hits_neutral(self, lex):
        assert sentiment_polarity(["just", "words"], lex) is SentimentPolarity.NEUTRAL

    def test_tie_neutral(self, lex):
        assert sentiment_polarity(["good", "bad"], lex) is SentimentPolarity.NEUTRAL

    def test_one_hot_layout(self, lex):
        v = sentiment_feature(["awful"], lex)
        assert v.dimension == 3 and v.indices == (1,)


class TestSubjectivity:
    def test_strong_negative_count(self, lex):
        v = subjectivity_features(["awful"], lex)
        assert v.dimension == 4
        assert v.indices == (1,) and v.values == (1.0,)

    def test_empty_post(self, lex):
        assert subjectivity_features([], lex).indices == ()

    def test_repeat_counts_twice(self, lex):
        v = subjectivity_features(["nice", "nice"], lex)
        assert v.indices == (2,) and v.values == (2.0,)


class TestSurface:
    def test_counts_on_raw_text(self):
        raw = "Is this how @UN_Women sees #genderequality ? Only #women with arms?"
        v = surface_features(raw).to_dense()
        assert v[0] == 2.0  # hashtags
        assert v[1] == 1.0  # mentions
        assert v[4] == 1.0  # question mark present

    def test_plain_sentence_zeroes(self):
        assert surface_features("plain words here").indices == ()

    def test_emoticons(self):
        assert surface_features(":) :)").to_dense()[3] == 2.0

    def test_url_and_exclamations(self):
        v = surface_features("wow!! see https://a.io").to_dense()
        assert v[2] == 1.0 and v[5] == 2.0


class TestCoarsePosTagger:
    def test_suffix_rules(self):
        empty = CoarsePosTagger({})
        assert empty.tag("quickly") is CoarsePosTag.ADVERB
        assert empty.tag("famous") is CoarsePosTag.ADJECTIVE
        assert empty.tag("walked") is CoarsePosTag.VERB
        assert empty.tag("vaccination") is CoarsePosTag.NOUN
        assert empty.tag("?!") is CoarsePosTag.OTHER

    def test_dictionary_first(self):
        assert coarse_pos_tag(["the"])[0] is CoarsePosTag.OTHER
        assert coarse_pos_tag(["believe"])[0] is CoarsePosTag.VERB


class TestPipeline:
    def _posts(self):
        return [
            Post("a", "MMR", "vaccines cause autism badly", StanceLabel.FAVOR),
            Post("b", "MMR", "no evidence links vaccines #SemST", StanceLabel.AGAINST),
            Post("c", "MMR", "what a great day :)", StanceLabel.NONE),
        ]

    def test_sen_dimension_is_sum_of_blocks(self):
        posts = self._posts()
        cfg = PreprocessConfig()
        views = [make_view(p, cfg) for p in posts]
        pipe = FeaturePipeline(("stance_vector", "sentiment", "bow"), topic="MMR")
        pipe.fit(views)
        dim = pipe.dimension()
        assert dim == len(pipe._vocabs["stance_vector"]) + 3 + len(pipe._vocabs["bow"])
        x = pipe.transform(views[0])
        assert x.dimension == dim

    def test_unknown_feature_rejected(self):
        with pytest.raises(ConfigError):
            FeaturePipeline(("bow", "mystery"))

    def test_empty_selection_rejected(self):
        with pytest.raises(ConfigError):
            FeaturePipeline(())

    def test_same_dimension_across_posts(self):
        posts = self._posts()
        cfg = PreprocessConfig()
        views = [make_view(p, cfg) for p in posts]
        pipe = FeaturePipeline(
            ("subjectivity", "word_ngrams", "char_ngrams", "target_presence"),
            topic="MMR",
        ).fit(views)
        dims = {pipe.transform(v).dimension for v in views}
        assert len(dims) == 1

    def test_transform_never_grows_vocabulary(self):
        posts = self._posts()
        cfg = PreprocessConfig()
        views = [make_view(p, cfg) for p in posts]
        pipe = FeaturePipeline(("bow",), topic="MMR").fit(views[:2])
        before = len(pipe._vocabs["bow"])
        pipe.transform(views[2])  # has unseen words
        assert len(pipe._vocabs["bow"]) == before

    def test_values_finite_nonnegative(self):
        posts = self._posts()
        cfg = PreprocessConfig()
        views = [make_view(p, cfg) for p in posts]
        pipe = FeaturePipeline(
            ("stance_vector", "sentiment", "bow", "subjectivity", "surface"),
            topic="MMR",
        ).fit(views)
        for v in views:
            x = pipe.transform(v)
            arr = np.array(x.values)
            assert np.isfinite(arr).all() and (arr >= 0).all()

    def test_target_presence(self):
        posts = self._posts()
        cfg = PreprocessConfig()
        views = [make_view(p, cfg) for p in posts]
        pipe = FeaturePipeline(("target_presence",), topic="MMR").fit(views)
        hit = pipe.transform(views[0])  # contains 'vaccines'... target words
        miss = pipe.transform(views[2])
        assert sum(hit.values) >= 1.0
        assert sum(miss.values) == 0.0
