"""Probabilistic text de-identification.

Every sensitive unit (an in-span word, or a whole span at entity
granularity) draws ``r ~ U[0, 1)`` and is replaced by a surrogate sampled
from the policy iff ``r <= p``.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .corpus import (
    ENTITY,
    WORD,
    AnnotatedSentence,
    Corpus,
    EntitySpan,
    build_category_lexicon,
)
from .policy import (
    PolicyError,
    ReplacementPolicy,
    degenerate_policy,
    frequency_policy,
    gazetteer_policy,
    private_vocabulary,
    redact_policy,
    typed_placeholder_policy,
    uniform_policy,
)
from .privacy import PrivacyReport, privacy_report

NO_REPLACEMENT = "no_replacement"
REDACT = "redact"
TYPED_PLACEHOLDER = "typed_placeholder"
NAMED_PLACEHOLDER = "named_placeholder"
WORD_BY_WORD = "word_by_word"
FULL_ENTITY = "full_entity"
STRATEGY_NAMES = (NO_REPLACEMENT, REDACT, TYPED_PLACEHOLDER, NAMED_PLACEHOLDER, WORD_BY_WORD, FULL_ENTITY)
PLACEHOLDER_STRATEGIES = (REDACT, TYPED_PLACEHOLDER, NAMED_PLACEHOLDER)


class StrategyError(ValueError):
    pass


@dataclass(frozen=True)
class ReplacementStrategy:
    """A fixed choice of replacement probability, policy and unit granularity.

    Placeholder strategies default to entity granularity (one placeholder per
    span); word granularity is allowed for them. ``full_entity`` is always
    entity-level and ``word_by_word`` always word-level.
    """

    name: str
    p: float
    policy: Optional[ReplacementPolicy]
    granularity: Optional[str] = None
    consistent_mapping: bool = False

    def __post_init__(self):
        if self.name not in STRATEGY_NAMES:
            raise StrategyError(f"unknown strategy {self.name!r}")
        if not (0.0 <= self.p <= 1.0):
            raise StrategyError(f"p must lie in [0, 1], got {self.p!r}")
        object.__setattr__(self, "p", float(self.p))
        gran = self.granularity
        if gran is None:
            gran = WORD if self.name == WORD_BY_WORD else ENTITY
            object.__setattr__(self, "granularity", gran)
        if gran not in (WORD, ENTITY):
            raise StrategyError(f"unknown granularity {gran!r}")
        if self.name == FULL_ENTITY and gran != ENTITY:
            raise StrategyError("full_entity replaces whole spans; granularity must be 'entity'")
        if self.name == WORD_BY_WORD and gran != WORD:
            raise StrategyError("word_by_word requires granularity 'word'")
        if self.consistent_mapping and self.name != FULL_ENTITY:
            raise StrategyError("consistent_mapping is only available for full_entity")
        if self.name == NO_REPLACEMENT:
            if self.p != 0.0:
                raise StrategyError("no_replacement implies p = 0")
        elif self.policy is None:
            raise StrategyError(f"strategy {self.name} needs a replacement policy")

    def check_covers(self, categories) -> None:
        if self.name == NO_REPLACEMENT:
            return
        for cat in categories:
            if not self.policy.covers(cat):
                raise PolicyError(f"replacement policy does not cover category {cat!r}")


def no_replacement() -> ReplacementStrategy:
    return ReplacementStrategy(NO_REPLACEMENT, 0.0, None)


@dataclass(frozen=True)
class LogRecord:
    sentence: int
    unit: int
    category: str
    original: str
    emitted: str
    replaced: bool
    r: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "sentence": self.sentence,
                "unit": self.unit,
                "category": self.category,
                "original": self.original,
                "emitted": self.emitted,
                "replaced": self.replaced,
                "r": self.r,
            },
            ensure_ascii=False,
        )


TransformationLog = List[LogRecord]


def write_log(log: Sequence[LogRecord]) -> str:
    return "".join(rec.to_json() + "\n" for rec in log)


def read_log(text: str) -> TransformationLog:
    return [LogRecord(**json.loads(line)) for line in text.splitlines() if line.strip()]


def _draw(rng: random.Random) -> float:
    # r = 0 would count as replaced even at p = 0
    r = rng.random()
    while r == 0.0:
        r = rng.random()
    return r


def transform_sentence(
    sentence: AnnotatedSentence,
    strategy: ReplacementStrategy,
    rng: random.Random,
    *,
    index: int = 0,
    memo: Optional[Dict[Tuple[str, str], str]] = None,
) -> Tuple[AnnotatedSentence, TransformationLog]:
    """Apply the strategy to one sentence. Tokens outside spans are never touched.

    ``memo`` carries the original -> surrogate table when ``consistent_mapping``
    is on; it is shared across the sentences of one corpus run.
    """
    strategy.check_covers(sp.category for sp in sentence.spans)
    p = strategy.p
    log: TransformationLog = []
    tokens: List[str] = []
    spans: List[EntitySpan] = []
    cursor = 0
    unit = 0
    for span in sentence.spans:
        tokens.extend(sentence.tokens[cursor:span.start])
        start = len(tokens)
        cat = span.category
        if strategy.granularity == WORD:
            for tok in sentence.tokens[span.start:span.end]:
                r = _draw(rng)
                replaced = r <= p
                emitted = strategy.policy.sample(cat, rng) if replaced else tok
                log.append(LogRecord(index, unit, cat, tok, emitted, replaced, r))
                tokens.append(emitted)
                unit += 1
        else:
            original = sentence.span_text(span)
            r = _draw(rng)
            replaced = r <= p
            if not replaced:
                emitted = original
            elif memo is not None and strategy.consistent_mapping:
                key = (cat, original)
                if key not in memo:
                    memo[key] = strategy.policy.sample(cat, rng)
                emitted = memo[key]
            else:
                emitted = strategy.policy.sample(cat, rng)
            log.append(LogRecord(index, unit, cat, original, emitted, replaced, r))
            tokens.extend(emitted.split() if replaced else sentence.tokens[span.start:span.end])
            unit += 1
        spans.append(EntitySpan(start, len(tokens), cat))
        cursor = span.end
    tokens.extend(sentence.tokens[cursor:])
    return AnnotatedSentence(tuple(tokens), tuple(spans), sentence.label), log


def sentence_seed(master_seed: int, index: int) -> int:
    """Per-sentence stream seed; depends only on (master_seed, index)."""
    digest = hashlib.blake2b(
        f"{master_seed & 0xFFFFFFFFFFFFFFFF}:{index}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


def sentence_rng(master_seed: int, index: int) -> random.Random:
    return random.Random(sentence_seed(master_seed, index))


def corpus_vocabulary(corpus: Corpus, granularity: str):
    return private_vocabulary(build_category_lexicon(corpus, granularity))


def transform_corpus(
    corpus: Corpus,
    strategy: ReplacementStrategy,
    master_seed: int,
    *,
    identifier_recall: Optional[float] = None,
) -> Tuple[Corpus, TransformationLog, PrivacyReport]:
    """Transform every sentence with its own derived stream and attach a privacy report.

    The private vocabulary for the report is every in-span surface form of
    the input corpus at the strategy's granularity.
    """
    strategy.check_covers(corpus.categories())
    memo: Optional[Dict[Tuple[str, str], str]] = {} if strategy.consistent_mapping else None
    out = []
    log: TransformationLog = []
    for i, sent in enumerate(corpus.sentences):
        new, recs = transform_sentence(sent, strategy, sentence_rng(master_seed, i), index=i, memo=memo)
        out.append(new)
        log.extend(recs)
    report = privacy_report(
        strategy.name,
        strategy.p,
        strategy.policy,
        corpus_vocabulary(corpus, strategy.granularity),
        consistent_mapping=strategy.consistent_mapping,
        identifier_recall=identifier_recall,
    )
    return Corpus(tuple(out), corpus.name), log, report


def most_frequent_forms(corpus: Corpus, granularity: str = ENTITY) -> Dict[str, str]:
    """Most frequent surface form per category (ties go to the lexicographically first)."""
    lexicon = build_category_lexicon(corpus, granularity)
    return {cat: min(forms, key=lambda f: (-forms[f], f)) for cat, forms in lexicon.items()}


def build_strategy(
    name: str,
    p: float,
    corpus: Corpus,
    *,
    source: str = "corpus",
    gazetteer: Optional[str] = None,
    exemplars: Optional[Dict[str, str]] = None,
    granularity: Optional[str] = None,
    consistent_mapping: bool = False,
) -> ReplacementStrategy:
    """Assemble a strategy whose policy is derived from ``corpus`` where needed.

    ``source`` selects the surrogate distribution for word_by_word and
    full_entity: ``uniform`` over the corpus forms, ``corpus`` frequencies, or
    ``gazetteer`` (``gazetteer`` holds the file text). Named placeholders use
    ``exemplars`` or, by default, each category's most frequent form.
    """
    if name == NO_REPLACEMENT:
        return ReplacementStrategy(NO_REPLACEMENT, p, None)
    cats = corpus.categories()
    if name == REDACT:
        policy = redact_policy(cats)
    elif name == TYPED_PLACEHOLDER:
        policy = typed_placeholder_policy(cats)
    elif name == NAMED_PLACEHOLDER:
        policy = degenerate_policy(exemplars or most_frequent_forms(corpus))
    elif name in (WORD_BY_WORD, FULL_ENTITY):
        gran = WORD if name == WORD_BY_WORD else ENTITY
        if source == "uniform":
            policy = uniform_policy(corpus_vocabulary(corpus, gran))
        elif source == "corpus":
            policy = frequency_policy(build_category_lexicon(corpus, gran))
        elif source == "gazetteer":
            if gazetteer is None:
                raise StrategyError("gazetteer source needs gazetteer text")
            policy = gazetteer_policy(gazetteer)
        else:
            raise StrategyError(f"unknown policy source {source!r}")
    else:
        raise StrategyError(f"unknown strategy {name!r}")
    return ReplacementStrategy(name, p, policy, granularity, consistent_mapping)
