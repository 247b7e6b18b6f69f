"""Email classification with a bag-of-words neural network."""

from ._mailclass import (
    BodyPart,
    EmailDocument,
    Header,
    LabeledCorpus,
    MailclassError,
    RawEmail,
    build_vocabulary,
    chi2_scores,
    config_keys,
    confusion_matrix,
    corpus_stats,
    english_stop_words,
    filter_labels,
    load_corpus,
    parse_eml,
    parse_mbox,
    predict,
    serialize_mbox,
    sweep,
    synthetic_corpus,
    tokenize,
    train,
    train_test_split,
)

__all__ = [
    "BodyPart",
    "EmailDocument",
    "Header",
    "LabeledCorpus",
    "MailclassError",
    "RawEmail",
    "build_vocabulary",
    "chi2_scores",
    "config_keys",
    "confusion_matrix",
    "corpus_stats",
    "english_stop_words",
    "filter_labels",
    "load_corpus",
    "parse_eml",
    "parse_mbox",
    "predict",
    "serialize_mbox",
    "sweep",
    "synthetic_corpus",
    "tokenize",
    "train",
    "train_test_split",
]
