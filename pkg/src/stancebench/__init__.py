"""Stance detection benchmark toolkit.

Classical SVM pipelines and compact neural stance models (LSTM, bypass
attention BiLSTM with/without target augmentation, 1-D CNN) over the
SemEval-2016 Task 6A microblog collection and MPCHI-style consumer
health datasets, with the shared preprocessing pipeline, double-voting
prediction scheme, official favor/against macro-F1 metric, and a
numerical verification that the bypass attention ignores its target
input.
"""

from .corpus import (
    CLASS_ORDER,
    Post,
    SplitSpec,
    StanceLabel,
    TopicDataset,
    dataset_stats,
    load_mpchi,
    load_semeval,
    stratified_split,
)
from .evaluation import macro_f1_favor_against, official_metric, pooled_overall
from .porter import porter_stem
from .preprocess import PreprocessConfig, PreprocessMode, preprocess_post, tokenize
from .segment import UnigramFrequencyTable, segment_hashtag

__version__ = "0.1.0"

__all__ = [
    "CLASS_ORDER",
    "Post",
    "PreprocessConfig",
    "PreprocessMode",
    "SplitSpec",
    "StanceLabel",
    "TopicDataset",
    "UnigramFrequencyTable",
    "dataset_stats",
    "load_mpchi",
    "load_semeval",
    "macro_f1_favor_against",
    "official_metric",
    "pooled_overall",
    "porter_stem",
    "preprocess_post",
    "segment_hashtag",
    "stratified_split",
    "tokenize",
    "__version__",
]
