"""Probabilistic text de-identification with exact differential-privacy accounting."""

from .corpus import (
    AnnotatedSentence,
    Corpus,
    CorpusError,
    CorpusParseError,
    EntitySpan,
    build_category_lexicon,
    parse_conll,
    parse_labeled,
    write_conll,
    write_labeled,
)
from .mechanism import ReplacementStrategy, build_strategy, transform_corpus, transform_sentence
from .policy import (
    ReplacementPolicy,
    degenerate_policy,
    frequency_policy,
    gazetteer_policy,
    min_mass,
    uniform_policy,
)
from .privacy import (
    PrivacyReport,
    effective_p,
    empirical_epsilon_oracle,
    epsilon,
    min_policy_mass_for_epsilon,
    verify_bound,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSentence",
    "Corpus",
    "CorpusError",
    "CorpusParseError",
    "EntitySpan",
    "PrivacyReport",
    "ReplacementPolicy",
    "ReplacementStrategy",
    "build_category_lexicon",
    "build_strategy",
    "degenerate_policy",
    "effective_p",
    "empirical_epsilon_oracle",
    "epsilon",
    "frequency_policy",
    "gazetteer_policy",
    "min_mass",
    "min_policy_mass_for_epsilon",
    "parse_conll",
    "parse_labeled",
    "transform_corpus",
    "transform_sentence",
    "uniform_policy",
    "verify_bound",
    "write_conll",
    "write_labeled",
]
