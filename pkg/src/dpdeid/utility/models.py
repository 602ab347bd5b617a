"""Count-based multinomial naive Bayes models with add-one smoothing."""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from typing import Dict, List, Sequence, Tuple

from ..corpus import AnnotatedSentence, Corpus, CorpusError, bio_to_spans, repair_bio

BOS = "<s>"
EOS = "</s>"


class _MultinomialNB:
    """Shared scoring: log prior + sum of add-one smoothed log likelihoods.

    With ``skip_unseen`` features never observed in training contribute
    nothing; otherwise they get the smoothed likelihood ``1 / (N_c + V)``.
    """

    def __init__(self, docs: Sequence[Tuple[Sequence[str], str]], skip_unseen: bool = False):
        self.skip_unseen = skip_unseen
        self.class_counts: Counter = Counter()
        self.feature_counts: Dict[str, Counter] = defaultdict(Counter)
        self.vocab = set()
        for features, label in docs:
            self.class_counts[label] += 1
            self.feature_counts[label].update(features)
            self.vocab.update(features)
        self.classes = sorted(self.class_counts)
        n_docs = sum(self.class_counts.values())
        v = len(self.vocab) + 1  # one slot for unseen features
        self._log_prior = {c: math.log(self.class_counts[c] / n_docs) for c in self.classes}
        self._denom = {c: math.log(sum(self.feature_counts[c].values()) + v) for c in self.classes}

    def scores(self, features: Sequence[str]) -> Dict[str, float]:
        out = {}
        for c in self.classes:
            counts = self.feature_counts[c]
            s = self._log_prior[c]
            for f in features:
                if self.skip_unseen and f not in self.vocab:
                    continue
                s += math.log(counts.get(f, 0) + 1) - self._denom[c]
            out[c] = s
        return out

    def predict_features(self, features: Sequence[str]) -> str:
        scores = self.scores(features)
        best = self.classes[0]
        for c in self.classes[1:]:
            if scores[c] > scores[best]:  # ties keep the lexicographically first class
                best = c
        return best


def sentence_features(sentence: AnnotatedSentence) -> List[str]:
    return [t.lower() for t in sentence.tokens]


class SentenceClassifier:
    """Bag-of-unigrams naive Bayes over lowercased tokens."""

    def __init__(self, nb: _MultinomialNB):
        self._nb = nb

    @property
    def labels(self) -> List[str]:
        return list(self._nb.classes)

    def predict(self, sentence: AnnotatedSentence) -> str:
        return self._nb.predict_features(sentence_features(sentence))

    def predict_corpus(self, corpus: Corpus) -> List[str]:
        return [self.predict(s) for s in corpus.sentences]


def train_sentence_classifier(train: Corpus) -> SentenceClassifier:
    docs = []
    for i, sent in enumerate(train.sentences):
        if sent.label is None:
            raise CorpusError(f"sentence {i} has no label")
        docs.append((sentence_features(sent), sent.label))
    if not docs:
        raise CorpusError("cannot train on an empty corpus")
    return SentenceClassifier(_MultinomialNB(docs))


def token_features(tokens: Sequence[str], i: int) -> List[str]:
    """Current token, alone and paired with each neighbour (or a boundary marker)."""
    prev = tokens[i - 1] if i > 0 else BOS
    nxt = tokens[i + 1] if i + 1 < len(tokens) else EOS
    cur = tokens[i]
    return ["w=" + cur, "w-1,w=" + prev + " " + cur, "w,w+1=" + cur + " " + nxt]


class TokenTagger:
    """Per-token BIO tagger; illegal I- tags in the output are coerced to B-.

    Every feature includes the current token and unseen features are
    skipped, so a token never seen in training falls back to the tag prior.
    A model trained on redacted text therefore learns the placeholder, not
    the slot context.
    """

    def __init__(self, nb: _MultinomialNB):
        self._nb = nb

    @property
    def tags(self) -> List[str]:
        return list(self._nb.classes)

    def tag(self, tokens: Sequence[str]) -> List[str]:
        raw = [self._nb.predict_features(token_features(tokens, i)) for i in range(len(tokens))]
        return repair_bio(raw)

    def predict(self, sentence: AnnotatedSentence) -> AnnotatedSentence:
        spans = bio_to_spans(self.tag(sentence.tokens), warn=False)
        return AnnotatedSentence(sentence.tokens, tuple(spans), sentence.label)

    def predict_corpus(self, corpus: Corpus) -> Corpus:
        return Corpus(tuple(self.predict(s) for s in corpus.sentences), corpus.name)


def train_token_tagger(train: Corpus) -> TokenTagger:
    docs = []
    for sent in train.sentences:
        for i, tag in enumerate(sent.bio_tags()):
            docs.append((token_features(sent.tokens, i), tag))
    if not docs:
        raise CorpusError("cannot train on an empty corpus")
    return TokenTagger(_MultinomialNB(docs, skip_unseen=True))
