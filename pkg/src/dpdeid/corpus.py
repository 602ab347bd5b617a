"""Entity-annotated corpora: data model, CoNLL/BIO2 and labeled-JSONL I/O, lexicons."""

from __future__ import annotations

import json
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

CANONICAL_CATEGORIES = ("PER", "LOC", "ORG", "DATE", "TIME")

WORD = "word"
ENTITY = "entity"
GRANULARITIES = (WORD, ENTITY)

# category -> surface form -> occurrence count
CategoryLexicon = Dict[str, Dict[str, int]]


class CorpusError(ValueError):
    """Invalid corpus data."""


class CorpusParseError(CorpusError):
    """Malformed input file. ``line`` is 1-based, or None when not line-specific."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BIOCoercionWarning(UserWarning):
    """An ``I-X`` tag without a preceding ``B-X``/``I-X`` was read as ``B-X``."""


def check_category(name: str) -> str:
    if not isinstance(name, str) or not name or any(c.isspace() for c in name):
        raise CorpusError(f"invalid entity category {name!r}")
    return name


@dataclass(frozen=True, order=True)
class EntitySpan:
    start: int
    end: int
    category: str

    def __post_init__(self):
        check_category(self.category)
        if not (0 <= self.start < self.end):
            raise CorpusError(f"invalid span bounds [{self.start}, {self.end})")

    def __len__(self):
        return self.end - self.start


@dataclass(frozen=True)
class AnnotatedSentence:
    tokens: Tuple[str, ...]
    spans: Tuple[EntitySpan, ...] = ()
    label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "spans", tuple(self.spans))
        if not self.tokens:
            raise CorpusError("sentence has no tokens")
        for tok in self.tokens:
            if not tok or any(c.isspace() for c in tok):
                raise CorpusError(f"token {tok!r} is empty or contains whitespace")
        prev_end = 0
        for span in self.spans:
            if span.start < prev_end:
                raise CorpusError("spans overlap or are not sorted by start")
            if span.end > len(self.tokens):
                raise CorpusError(
                    f"span [{span.start}, {span.end}) exceeds sentence length {len(self.tokens)}"
                )
            prev_end = span.end

    def span_text(self, span: EntitySpan) -> str:
        return " ".join(self.tokens[span.start:span.end])

    @property
    def text(self) -> str:
        return " ".join(self.tokens)

    def bio_tags(self) -> List[str]:
        return spans_to_bio(len(self.tokens), self.spans)


@dataclass(frozen=True)
class Corpus:
    sentences: Tuple[AnnotatedSentence, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i):
        return self.sentences[i]

    def categories(self) -> List[str]:
        return sorted({sp.category for s in self.sentences for sp in s.spans})


# --- BIO2 ------------------------------------------------------------------


def spans_to_bio(n_tokens: int, spans: Iterable[EntitySpan]) -> List[str]:
    tags = ["O"] * n_tokens
    for span in spans:
        tags[span.start] = "B-" + span.category
        for i in range(span.start + 1, span.end):
            tags[i] = "I-" + span.category
    return tags


def _split_tag(tag: str) -> Tuple[str, Optional[str]]:
    if tag == "O":
        return "O", None
    if len(tag) > 2 and tag[1] == "-" and tag[0] in "BI":
        return tag[0], tag[2:]
    raise ValueError(f"invalid BIO2 tag {tag!r}")


def bio_to_spans(tags: Sequence[str], *, warn: bool = True) -> List[EntitySpan]:
    """Reconstruct spans from BIO2 tags; a stray ``I-X`` opens a new span."""
    spans = []
    start, cat = None, None
    for i, tag in enumerate(tags):
        prefix, tcat = _split_tag(tag)
        if prefix == "I" and cat == tcat:
            continue
        if start is not None:
            spans.append(EntitySpan(start, i, cat))
            start, cat = None, None
        if prefix == "O":
            continue
        if prefix == "I" and warn:
            warnings.warn(
                f"I-{tcat} at token {i} does not continue a span; read as B-{tcat}",
                BIOCoercionWarning,
                stacklevel=3,
            )
        start, cat = i, tcat
    if start is not None:
        spans.append(EntitySpan(start, len(tags), cat))
    return spans


def repair_bio(tags: Sequence[str]) -> List[str]:
    """Coerce illegal ``I-X`` tags to ``B-X`` so the sequence is valid BIO2."""
    out = []
    prev_cat = None
    for tag in tags:
        prefix, cat = _split_tag(tag)
        if prefix == "I" and cat != prev_cat:
            tag = "B-" + cat
        out.append(tag)
        prev_cat = cat
    return out


# --- CoNLL -----------------------------------------------------------------


def parse_conll(text: str, name: str = "") -> Corpus:
    """Parse ``token<TAB>tag`` lines with blank-line sentence separators."""
    sentences = []
    tokens: List[str] = []
    tags: List[str] = []
    first_line = 0

    def flush():
        if not tokens:
            return
        try:
            spans = bio_to_spans(tags)
            sentences.append(AnnotatedSentence(tuple(tokens), tuple(spans)))
        except (CorpusError, ValueError) as exc:
            raise CorpusParseError(str(exc), first_line) from exc
        tokens.clear()
        tags.clear()

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush()
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise CorpusParseError(f"expected 2 tab-separated fields, got {len(fields)}", lineno)
        tok, tag = fields
        try:
            _split_tag(tag)
        except ValueError as exc:
            raise CorpusParseError(str(exc), lineno) from None
        if not tokens:
            first_line = lineno
        tokens.append(tok)
        tags.append(tag)
    flush()
    return Corpus(tuple(sentences), name)


def write_conll(corpus: Corpus) -> str:
    """Emit BIO2 CoNLL. Sentence labels are not representable and are dropped."""
    parts = []
    for sent in corpus.sentences:
        for tok, tag in zip(sent.tokens, sent.bio_tags()):
            parts.append(f"{tok}\t{tag}\n")
        parts.append("\n")
    return "".join(parts)


# --- labeled JSONL ---------------------------------------------------------


def parse_labeled(text: str, name: str = "") -> Corpus:
    """Parse one JSON record per line with ``text``, ``label`` and ``spans`` fields."""
    sentences = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusParseError(f"invalid JSON: {exc.msg}", lineno) from None
        if not isinstance(rec, dict):
            raise CorpusParseError("record is not an object", lineno)
        for key in ("text", "label", "spans"):
            if key not in rec:
                raise CorpusParseError(f"missing field {key!r}", lineno)
        if not isinstance(rec["text"], str) or not isinstance(rec["label"], str):
            raise CorpusParseError("'text' and 'label' must be strings", lineno)
        if not isinstance(rec["spans"], list):
            raise CorpusParseError("'spans' must be a list", lineno)
        try:
            spans = sorted(
                EntitySpan(int(sp["start"]), int(sp["end"]), sp["category"]) for sp in rec["spans"]
            )
            sentences.append(AnnotatedSentence(tuple(rec["text"].split()), tuple(spans), rec["label"]))
        except (KeyError, TypeError) as exc:
            raise CorpusParseError(f"malformed span: {exc}", lineno) from None
        except CorpusError as exc:
            raise CorpusParseError(str(exc), lineno) from None
    return Corpus(tuple(sentences), name)


def write_labeled(corpus: Corpus) -> str:
    lines = []
    for sent in corpus.sentences:
        rec = {
            "text": sent.text,
            "label": sent.label if sent.label is not None else "",
            "spans": [{"start": sp.start, "end": sp.end, "category": sp.category} for sp in sent.spans],
        }
        lines.append(json.dumps(rec, ensure_ascii=False) + "\n")
    return "".join(lines)


# --- lexicon ---------------------------------------------------------------


def build_category_lexicon(corpus: Corpus, granularity: str = WORD) -> CategoryLexicon:
    """Count in-span surface forms per category.

    At ``word`` granularity every in-span token is counted; at ``entity``
    granularity each span's tokens joined by single spaces count once.
    """
    if granularity not in GRANULARITIES:
        raise ValueError(f"unknown granularity {granularity!r}")
    counts: Dict[str, Counter] = {}
    for sent in corpus.sentences:
        for span in sent.spans:
            bucket = counts.setdefault(span.category, Counter())
            if granularity == WORD:
                bucket.update(sent.tokens[span.start:span.end])
            else:
                bucket[sent.span_text(span)] += 1
    return {cat: dict(sorted(c.items())) for cat, c in sorted(counts.items())}


def lexicon_total(lexicon: Mapping[str, Mapping[str, int]]) -> int:
    return sum(sum(forms.values()) for forms in lexicon.values())
