"""Privacy accounting for probabilistic token replacement.

With replacement probability ``p`` and a token-independent surrogate
distribution ``pi``, the mechanism is (eps, 0)-DP with

    eps = log((1 - p + p * pi_min) / (p * pi_min))

where ``pi_min`` is the smallest surrogate mass over the possible originals.
:func:`empirical_epsilon_oracle` recomputes the same quantity by exact
enumeration of neighbouring one-token datasets, without using the formula.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import FrozenSet, Mapping, Optional, Tuple

import numpy as np

from .policy import DEGENERATE, ReplacementPolicy, min_mass

INF = math.inf
ORACLE_MAX_TOKENS = 1000


class PrivacyError(ValueError):
    pass


def _check_prob(name: str, x: float) -> float:
    if not (0.0 <= x <= 1.0):
        raise PrivacyError(f"{name} must lie in [0, 1], got {x!r}")
    return float(x)


def epsilon(p: float, pi_min: float) -> float:
    """Privacy loss of replacing with probability ``p`` given minimum surrogate mass ``pi_min``."""
    p = _check_prob("p", p)
    pi_min = _check_prob("pi_min", pi_min)
    if p == 1.0:
        return 0.0
    if p == 0.0 or pi_min == 0.0:
        return INF
    # log((1 - p + p m) / (p m)) == log1p((1 - p) / (p m))
    denom = p * pi_min
    if denom < 1e-300:
        # quotient would overflow or p * m underflows; stay in log space
        return math.log(1.0 - p + denom) - math.log(p) - math.log(pi_min)
    return math.log1p((1.0 - p) / denom)


def min_policy_mass_for_epsilon(p: float, target_eps: float) -> float:
    """Smallest surrogate mass that keeps the loss at ``target_eps`` for a given ``p``."""
    p = _check_prob("p", p)
    if p in (0.0, 1.0):
        raise PrivacyError("inverse is undefined for p = 0 or p = 1")
    if not (target_eps > 0 and math.isfinite(target_eps)):
        raise PrivacyError(f"target epsilon must be positive and finite, got {target_eps!r}")
    if target_eps > 700.0:
        # expm1 overflows; e^eps - 1 == e^eps to double precision here
        m = math.exp(math.log1p(-p) - math.log(p) - target_eps)
    else:
        m = (1.0 - p) / (p * math.expm1(target_eps))
    if m > 1.0:
        raise PrivacyError(
            f"epsilon {target_eps} is unattainable at p={p}; the minimum is {-math.log(p):.6g}"
        )
    return m


def effective_p(configured_p: float, identifier_recall: float) -> float:
    """Upper bound on the realised replacement rate when entities are found with given recall."""
    return _check_prob("configured_p", configured_p) * _check_prob("identifier_recall", identifier_recall)


def _outcome_matrix(p: float, policy: ReplacementPolicy, originals, outputs, category) -> np.ndarray:
    # rows: original token, cols: observed token
    pi = np.array([policy.mass(category, t) for t in outputs])
    probs = np.tile(p * pi, (len(originals), 1))
    col = {t: j for j, t in enumerate(outputs)}
    for i, o in enumerate(originals):
        probs[i, col[o]] += 1.0 - p
    return probs


def empirical_epsilon_oracle(
    p: float,
    policy: ReplacementPolicy,
    vocab: Mapping[str, FrozenSet[str]],
    category: str,
) -> float:
    """Exact worst-case log-ratio over all neighbouring one-token datasets and outputs.

    Datasets D1 = [t1] and D2 = [t2] range over ordered pairs of distinct
    vocabulary tokens; the observed token ranges over vocabulary plus policy
    support. The maximum over pairs for a fixed output equals the log of the
    column max over the column min, which is what is computed here.
    """
    p = _check_prob("p", p)
    originals = sorted(vocab.get(category, ()))
    if not originals:
        raise PrivacyError(f"vocabulary has no tokens for category {category!r}")
    support = policy.support(category) if policy.covers(category) else ()
    outputs = sorted(set(originals) | set(support))
    if len(outputs) > ORACLE_MAX_TOKENS:
        raise PrivacyError(
            f"{len(outputs)} tokens exceed the exhaustive-enumeration limit of {ORACLE_MAX_TOKENS}"
        )
    if len(originals) < 2:
        return 0.0  # no pair of neighbouring datasets exists

    probs = _outcome_matrix(p, policy, originals, outputs, category)
    row = {o: i for i, o in enumerate(originals)}
    worst = 0.0
    for j, t in enumerate(outputs):
        column = probs[:, j]
        # originals other than t all produce t only via replacement: identical probabilities
        others = np.delete(column, row[t]) if t in row else column
        assert np.all(others == others[0]), "replacement probability depends on the original"
        hi, lo = column.max(), column.min()
        if hi == 0.0:
            continue
        if lo == 0.0:
            return INF
        worst = max(worst, math.log(hi) - math.log(lo))
    return worst


@dataclass(frozen=True)
class BoundCheck:
    p: float
    category: str
    theoretical: float
    empirical: float
    passed: bool


def verify_bound(
    p: float,
    policy: ReplacementPolicy,
    vocab: Mapping[str, FrozenSet[str]],
    category: str,
    *,
    tol: float = 1e-9,
    theoretical: Optional[float] = None,
) -> BoundCheck:
    """Compare the closed form against the oracle. ``theoretical`` overrides the formula (test hook)."""
    emp = empirical_epsilon_oracle(p, policy, vocab, category)
    theo = epsilon(p, min_mass(policy, vocab, category)) if theoretical is None else theoretical
    if math.isinf(theo) or math.isinf(emp):
        passed = theo == emp
    else:
        passed = abs(theo - emp) <= tol
    return BoundCheck(p, category, theo, emp, passed)


# --- reports ---------------------------------------------------------------


@dataclass(frozen=True)
class CategoryPrivacy:
    name: str
    min_mass: float
    epsilon: float


@dataclass(frozen=True)
class PrivacyReport:
    strategy: str
    p: float
    per_category: Tuple[CategoryPrivacy, ...]
    overall_epsilon: float
    delta: float = 0.0
    guarantee_void: bool = False
    configured_p: Optional[float] = None
    identifier_recall: Optional[float] = None
    notes: Tuple[str, ...] = ()

    @property
    def recall_adjusted(self) -> bool:
        return self.identifier_recall is not None

    def to_dict(self) -> dict:
        d = {
            "strategy": self.strategy,
            "p": self.p,
            "per_category": [
                {"name": c.name, "min_mass": c.min_mass, "epsilon": encode_epsilon(c.epsilon)}
                for c in self.per_category
            ],
            "overall_epsilon": encode_epsilon(self.overall_epsilon),
            "delta": self.delta,
            "guarantee_void": self.guarantee_void,
        }
        if self.recall_adjusted:
            d["recall_adjusted"] = True
            d["configured_p"] = self.configured_p
            d["identifier_recall"] = self.identifier_recall
        if self.notes:
            d["notes"] = list(self.notes)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"


def encode_epsilon(eps: float):
    """JSON has no infinity literal; +inf is written as the string ``"inf"``."""
    return "inf" if math.isinf(eps) else eps


def decode_epsilon(value) -> float:
    return INF if value == "inf" else float(value)


def privacy_report(
    strategy: str,
    p: float,
    policy: Optional[ReplacementPolicy],
    vocab: Mapping[str, FrozenSet[str]],
    *,
    consistent_mapping: bool = False,
    identifier_recall: Optional[float] = None,
) -> PrivacyReport:
    """Per-category and worst-case epsilon for a configured strategy over a private vocabulary."""
    configured = p = _check_prob("p", p)
    if identifier_recall is not None:
        p = effective_p(configured, identifier_recall)
    notes = []
    per_cat = []
    for cat in sorted(vocab):
        if not vocab[cat]:
            continue
        m = min_mass(policy, vocab, cat) if policy is not None else 0.0
        per_cat.append(CategoryPrivacy(cat, m, epsilon(p, m)))
    overall = max((c.epsilon for c in per_cat), default=0.0)
    if not per_cat:
        notes.append("no private tokens in scope")
    if consistent_mapping:
        notes.append("consistent mapping makes replacements token-dependent: no formal guarantee")
    if identifier_recall is not None:
        notes.append(f"recall-adjusted: p = {configured} x recall {identifier_recall} = {p}")
    if policy is not None and policy.kind == DEGENERATE and p == 1.0:
        notes.append(
            "single-surrogate policy: loss is 0 at p = 1, but untouched tokens remain identifiable "
            "whenever p < 1 or identification misses them"
        )
    if len(per_cat) > 1:
        notes.append("overall epsilon is the per-category maximum; cross-category composition is not accounted")
    return PrivacyReport(
        strategy=strategy,
        p=p,
        per_category=tuple(per_cat),
        overall_epsilon=overall,
        delta=0.0,
        guarantee_void=consistent_mapping,
        configured_p=configured if identifier_recall is not None else None,
        identifier_recall=identifier_recall,
        notes=tuple(notes),
    )
