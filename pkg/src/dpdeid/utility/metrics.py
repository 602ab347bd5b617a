"""Exact-span entity F1 (CoNLL convention) and sentence accuracy."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

from ..corpus import Corpus


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: Optional[float] = None
    f1: Optional[float] = None
    precision: Optional[float] = None
    recall: Optional[float] = None
    per_class: Dict[str, ClassScores] = field(default_factory=dict)


def _prf(tp: int, n_pred: int, n_gold: int) -> Tuple[float, float, float]:
    p = tp / n_pred if n_pred else 0.0
    r = tp / n_gold if n_gold else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def entity_f1(gold: Corpus, predicted: Corpus) -> EvalMetrics:
    """Micro-averaged F1 where a predicted span is correct iff start, end and category match."""
    if len(gold) != len(predicted):
        raise EvaluationError(f"sentence count mismatch: {len(gold)} gold vs {len(predicted)} predicted")
    tp, n_pred, n_gold = Counter(), Counter(), Counter()
    for i, (g, p) in enumerate(zip(gold.sentences, predicted.sentences)):
        if len(g.tokens) != len(p.tokens):
            raise EvaluationError(f"sentence {i}: token count mismatch")
        gs = set(g.spans)
        for sp in p.spans:
            n_pred[sp.category] += 1
            if sp in gs:
                tp[sp.category] += 1
        for sp in g.spans:
            n_gold[sp.category] += 1
    per_class = {}
    for cat in sorted(set(n_gold) | set(n_pred)):
        prec, rec, f = _prf(tp[cat], n_pred[cat], n_gold[cat])
        per_class[cat] = ClassScores(prec, rec, f, n_gold[cat])
    prec, rec, f = _prf(sum(tp.values()), sum(n_pred.values()), sum(n_gold.values()))
    return EvalMetrics(f1=f, precision=prec, recall=rec, per_class=per_class)


def accuracy(gold: Corpus, predicted_labels: Sequence[str]) -> EvalMetrics:
    if len(gold) != len(predicted_labels):
        raise EvaluationError(f"sentence count mismatch: {len(gold)} gold vs {len(predicted_labels)} predicted")
    if not len(gold):
        raise EvaluationError("empty evaluation set")
    gold_labels = [s.label for s in gold.sentences]
    correct = sum(g == p for g, p in zip(gold_labels, predicted_labels))
    per_class = {}
    for label in sorted(set(gold_labels) | set(predicted_labels)):
        tp = sum(g == p == label for g, p in zip(gold_labels, predicted_labels))
        prec, rec, f = _prf(tp, list(predicted_labels).count(label), gold_labels.count(label))
        per_class[label] = ClassScores(prec, rec, f, gold_labels.count(label))
    return EvalMetrics(accuracy=correct / len(gold), per_class=per_class)
