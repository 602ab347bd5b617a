"""Privacy/utility sweep: transform train data at several p, train, score on the untouched test set."""

from __future__ import annotations

import csv
import hashlib
import io
import math
import statistics
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from ..corpus import Corpus, write_labeled
from ..mechanism import NO_REPLACEMENT, build_strategy, transform_corpus
from ..privacy import encode_epsilon
from .metrics import accuracy, entity_f1
from .models import train_sentence_classifier, train_token_tagger

NER = "ner"
INTENT = "intent"
TASKS = (NER, INTENT)
TASK_METRIC = {NER: "f1", INTENT: "accuracy"}

CSV_HEADER = ("p", "epsilon", "strategy", "task", "metric", "value", "seed")


@dataclass(frozen=True)
class SweepRow:
    p: float
    epsilon: float
    strategy: str
    task: str
    metric: str
    value: float
    seed: int


def evaluate(train: Corpus, test: Corpus, task: str) -> float:
    """Train the task model on ``train`` and return its metric on ``test``."""
    if task == NER:
        tagger = train_token_tagger(train)
        return entity_f1(test, tagger.predict_corpus(test)).f1
    if task == INTENT:
        clf = train_sentence_classifier(train)
        return accuracy(test, clf.predict_corpus(test)).accuracy
    raise ValueError(f"unknown task {task!r}; expected one of {TASKS}")


def _fingerprint(corpus: Corpus) -> str:
    return hashlib.sha256(write_labeled(corpus).encode()).hexdigest()


def sweep(
    train: Corpus,
    test: Corpus,
    strategies: Sequence[str],
    p_grid: Sequence[float],
    seeds: Sequence[int],
    *,
    tasks: Sequence[str] = TASKS,
    **strategy_options,
) -> List[SweepRow]:
    """One row per (strategy, p, seed, task), in that nesting order.

    ``no_replacement`` ignores the grid and contributes rows at p = 0 only.
    Extra keyword arguments are passed to :func:`build_strategy`.
    """
    for p in p_grid:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"grid value {p!r} is outside [0, 1]")
    before = _fingerprint(test)
    rows: List[SweepRow] = []
    for name in strategies:
        grid = (0.0,) if name == NO_REPLACEMENT else p_grid
        for p in grid:
            strategy = build_strategy(name, p, train, **strategy_options)
            for seed in seeds:
                transformed, _, report = transform_corpus(train, strategy, seed)
                for task in tasks:
                    value = evaluate(transformed, test, task)
                    rows.append(
                        SweepRow(p, report.overall_epsilon, name, task, TASK_METRIC[task], value, seed)
                    )
    assert _fingerprint(test) == before, "test corpus was modified during the sweep"
    return rows


def rows_to_csv(rows: Iterable[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([repr(r.p), encode_epsilon(r.epsilon), r.strategy, r.task, r.metric, repr(r.value), r.seed])
    return buf.getvalue()


def rows_from_csv(text: str) -> List[SweepRow]:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        eps = math.inf if rec["epsilon"] == "inf" else float(rec["epsilon"])
        rows.append(
            SweepRow(float(rec["p"]), eps, rec["strategy"], rec["task"], rec["metric"], float(rec["value"]), int(rec["seed"]))
        )
    return rows


def summarize(rows: Iterable[SweepRow]) -> Dict[Tuple[str, float, str], Tuple[float, float]]:
    """Mean and sample standard deviation over seeds per (strategy, p, task)."""
    groups: Dict[Tuple[str, float, str], List[float]] = {}
    for r in rows:
        groups.setdefault((r.strategy, r.p, r.task), []).append(r.value)
    return {
        k: (statistics.fmean(v), statistics.stdev(v) if len(v) > 1 else 0.0) for k, v in groups.items()
    }
