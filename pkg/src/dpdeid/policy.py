"""Token-independent replacement distributions, one categorical per entity category.

A policy never looks at the token being replaced: sampling takes only a
category and a random stream. That structural property is what the
privacy accounting relies on.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Mapping, Tuple

from .corpus import CategoryLexicon, CorpusParseError, check_category

DEGENERATE = "degenerate"
UNIFORM = "uniform"
FREQUENCY = "frequency"
GAZETTEER = "gazetteer"
KINDS = (DEGENERATE, UNIFORM, FREQUENCY, GAZETTEER)

# category -> possible original surface forms
PrivateVocabulary = Dict[str, FrozenSet[str]]

REDACT_TOKEN = "IIIII"


class PolicyError(ValueError):
    pass


@dataclass(frozen=True)
class _Table:
    tokens: Tuple[str, ...]
    masses: Tuple[float, ...]
    cumulative: Tuple[float, ...]


def _normalize(weights: Mapping[str, float]) -> _Table:
    if not weights:
        raise PolicyError("empty distribution")
    for tok, w in weights.items():
        if not (w > 0 and math.isfinite(w)):
            raise PolicyError(f"weight for {tok!r} must be positive and finite, got {w!r}")
    tokens = tuple(sorted(weights))
    total = math.fsum(weights[t] for t in tokens)
    masses = tuple(weights[t] / total for t in tokens)
    cum = []
    acc = 0.0
    for m in masses:
        acc += m
        cum.append(acc)
    return _Table(tokens, masses, tuple(cum))


@dataclass(frozen=True)
class ReplacementPolicy:
    """Per-category surrogate distributions.

    ``distributions`` maps category -> surrogate -> probability mass. Tokens
    are held in lexicographic order so that inverse-CDF sampling with a given
    uniform draw is reproducible.
    """

    kind: str
    distributions: Mapping[str, Mapping[str, float]]
    _tables: Dict[str, _Table] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PolicyError(f"unknown policy kind {self.kind!r}")
        if not self.distributions:
            raise PolicyError("policy covers no categories")
        tables = {}
        for cat, weights in self.distributions.items():
            check_category(cat)
            try:
                tables[cat] = _normalize(weights)
            except PolicyError as exc:
                raise PolicyError(f"category {cat}: {exc}") from None
        frozen = {cat: dict(zip(t.tokens, t.masses)) for cat, t in sorted(tables.items())}
        object.__setattr__(self, "distributions", frozen)
        object.__setattr__(self, "_tables", tables)

    @property
    def categories(self) -> Tuple[str, ...]:
        return tuple(self.distributions)

    def covers(self, category: str) -> bool:
        return category in self._tables

    def support(self, category: str) -> Tuple[str, ...]:
        return self._table(category).tokens

    def mass(self, category: str, token: str) -> float:
        return self.distributions.get(category, {}).get(token, 0.0)

    def _table(self, category: str) -> _Table:
        try:
            return self._tables[category]
        except KeyError:
            raise PolicyError(f"policy has no distribution for category {category!r}") from None

    def inverse_cdf(self, category: str, u: float) -> str:
        """Token whose cumulative interval (in lexicographic order) contains ``u``."""
        table = self._table(category)
        idx = bisect_right(table.cumulative, u)
        # float round-off can leave the last cumulative value just under 1
        return table.tokens[min(idx, len(table.tokens) - 1)]

    def sample(self, category: str, rng: random.Random) -> str:
        self._table(category)
        return self.inverse_cdf(category, rng.random())


def sample(policy: ReplacementPolicy, category: str, rng: random.Random) -> str:
    return policy.sample(category, rng)


def degenerate_policy(category_to_token: Mapping[str, str]) -> ReplacementPolicy:
    """Mass 1 on a single surrogate per category (redaction and placeholders)."""
    if not category_to_token:
        raise PolicyError("empty category -> token mapping")
    return ReplacementPolicy(DEGENERATE, {c: {t: 1.0} for c, t in category_to_token.items()})


def redact_policy(categories, token: str = REDACT_TOKEN) -> ReplacementPolicy:
    return degenerate_policy({c: token for c in categories})


def typed_placeholder_policy(categories) -> ReplacementPolicy:
    return degenerate_policy({c: c for c in categories})


def uniform_policy(vocab: Mapping[str, FrozenSet[str]]) -> ReplacementPolicy:
    if not vocab:
        raise PolicyError("empty vocabulary")
    dists = {}
    for cat, forms in vocab.items():
        if not forms:
            raise PolicyError(f"category {cat} has an empty vocabulary")
        dists[cat] = {t: 1.0 for t in forms}
    return ReplacementPolicy(UNIFORM, dists)


def frequency_policy(lexicon: CategoryLexicon) -> ReplacementPolicy:
    if not lexicon or not any(lexicon.values()):
        raise PolicyError("empty lexicon")
    return ReplacementPolicy(
        FREQUENCY, {cat: {t: float(n) for t, n in forms.items()} for cat, forms in lexicon.items() if forms}
    )


def parse_gazetteer(text: str) -> Dict[str, Dict[str, float]]:
    """Read ``category<TAB>token<TAB>weight`` lines; repeated entries accumulate."""
    weights: Dict[str, Dict[str, float]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise CorpusParseError(f"expected 3 tab-separated fields, got {len(fields)}", lineno)
        cat, tok, raw = fields
        if not cat or not tok:
            raise CorpusParseError("empty category or token", lineno)
        try:
            w = float(raw)
        except ValueError:
            raise CorpusParseError(f"weight {raw!r} is not a number", lineno) from None
        if not (w > 0 and math.isfinite(w)):
            raise CorpusParseError(f"weight must be positive, got {raw!r}", lineno)
        bucket = weights.setdefault(cat, {})
        bucket[tok] = bucket.get(tok, 0.0) + w
    return weights


def gazetteer_policy(text: str) -> ReplacementPolicy:
    weights = parse_gazetteer(text)
    if not weights:
        raise PolicyError("gazetteer is empty")
    return ReplacementPolicy(GAZETTEER, weights)


def private_vocabulary(lexicon: CategoryLexicon) -> PrivateVocabulary:
    return {cat: frozenset(forms) for cat, forms in lexicon.items() if forms}


def parse_vocabulary(text: str) -> PrivateVocabulary:
    """Read ``category<TAB>token`` lines (extra columns are ignored)."""
    vocab: Dict[str, set] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) < 2 or not fields[0] or not fields[1]:
            raise CorpusParseError("expected category<TAB>token", lineno)
        vocab.setdefault(fields[0], set()).add(fields[1])
    return {cat: frozenset(forms) for cat, forms in vocab.items()}


def min_mass(policy: ReplacementPolicy, vocab: Mapping[str, FrozenSet[str]], category: str) -> float:
    """Smallest policy mass over the category's possible originals (0 if any is off-support)."""
    forms = vocab.get(category)
    if not forms:
        raise PolicyError(f"vocabulary has no tokens for category {category!r}")
    return min(policy.mass(category, t) for t in forms)
