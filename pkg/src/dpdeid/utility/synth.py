"""Template-based synthetic corpora with entity slots and sentence labels."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..corpus import AnnotatedSentence, Corpus, EntitySpan

# Surface-form pools; a spec takes the first N forms of each.
LEXICON_POOLS: Dict[str, Tuple[str, ...]] = {
    "PER": (
        "Miller", "Smith", "John", "Maria", "Schmidt", "Tanaka", "Garcia", "Peter Jones",
        "Anna", "Lee", "Fischer", "Olsen", "Kumar", "Rossi", "Dubois", "Novak",
        "Mary Brown", "Weber", "Ivanova", "Chen", "Sarah Connor", "Lopez", "Berg", "Hans Meyer",
    ),
    "LOC": (
        "London", "Rome", "Berlin", "Paris", "Frankfurt Airport", "Madrid", "Tokyo", "Vienna",
        "Boston", "Munich", "Lisbon", "Oslo", "Prague", "Dublin", "Hamburg", "Zurich",
        "New York", "Warsaw", "Athens", "San Francisco", "Geneva", "Kyoto", "Hong Kong", "Cairo",
    ),
    "ORG": (
        "Lufthansa", "SAP", "BOSCH", "Siemens", "Deutsche Bank", "Google", "Airbus", "IBM",
        "Allianz", "Toyota", "Nestle", "BASF", "Philips", "Volvo", "Intel", "Bayer",
        "Red Cross", "Audi", "Nokia", "United Nations", "Shell", "Oracle", "Sony", "Roche",
    ),
    "TIME": (
        "noon", "six pm", "midnight", "afternoon", "evening", "morning", "dawn", "tonight",
        "eight", "nine", "lunchtime", "dusk", "eleven", "breakfast", "seven", "dinnertime",
        "ten am", "two pm", "eight thirty", "four pm",
    ),
    "DATE": (
        "Monday", "Tuesday", "Friday", "tomorrow", "Sunday", "Wednesday", "next week", "Thursday",
        "Saturday", "today", "Christmas", "Easter", "January", "July", "weekend", "yesterday",
        "March third", "June fifth", "May first", "April tenth",
    ),
}

# Label -> templates. ``{CAT}`` marks an entity slot. Labels share slot
# contexts ("from", "with", "at") so the entity category matters to the label.
DEFAULT_TEMPLATES: Dict[str, Tuple[str, ...]] = {
    "BookFlight": (
        "i need a flight from {LOC} to {LOC} on {DATE}",
        "book me on the {ORG} flight to {LOC} at {TIME}",
        "is there a flight from {LOC} leaving at {TIME}",
        "please reserve a seat to {LOC} on {DATE} with {ORG}",
    ),
    "ScheduleMeeting": (
        "can we meet with {PER} on {DATE} at {TIME}",
        "schedule a meeting with {PER} from {ORG} at {TIME}",
        "let us meet {PER} at the {LOC} office on {DATE}",
        "put a call with {PER} in the calendar for {DATE}",
    ),
    "CallPerson": (
        "please call {PER} at {ORG}",
        "i want to talk to {PER} now",
        "phone {PER} and tell {PER} i am late",
        "get me {PER} from {ORG} on the line",
    ),
    "GetWeather": (
        "what is the weather in {LOC} on {DATE}",
        "will it rain in {LOC} at {TIME}",
        "how cold is it in {LOC} today",
        "forecast for {LOC} on {DATE} please",
    ),
}

FILLERS = (
    "hi", "hello", "please", "thanks", "okay", "well", "um", "so", "actually", "right",
    "listen", "sorry", "yes", "alright", "hey", "maybe",
)

_SLOT = re.compile(r"\{([A-Z]+)\}")


class SynthSpecError(ValueError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    n_train: int = 600
    n_test: int = 300
    lexicon_sizes: Mapping[str, int] = field(
        default_factory=lambda: {"PER": 16, "LOC": 16, "ORG": 16, "TIME": 16, "DATE": 16}
    )
    templates: Mapping[str, Sequence[str]] = field(default_factory=lambda: dict(DEFAULT_TEMPLATES))
    filler_rate: float = 0.3

    def validate(self) -> None:
        if self.n_train < 1 or self.n_test < 1:
            raise SynthSpecError("train and test sizes must be positive")
        if len(self.templates) < 2:
            raise SynthSpecError("need at least 2 labels")
        if not (0.0 <= self.filler_rate <= 1.0):
            raise SynthSpecError("filler_rate must lie in [0, 1]")
        used = set()
        for label, temps in self.templates.items():
            if not temps:
                raise SynthSpecError(f"label {label} has no templates")
            for t in temps:
                used.update(_SLOT.findall(t))
        for cat in used:
            size = self.lexicon_sizes.get(cat, 0)
            if size < 2:
                raise SynthSpecError(f"category {cat} needs at least 2 surface forms")
            if size > len(LEXICON_POOLS.get(cat, ())):
                raise SynthSpecError(
                    f"category {cat}: {size} forms requested, pool has {len(LEXICON_POOLS.get(cat, ()))}"
                )

    def lexicon(self) -> Dict[str, Tuple[str, ...]]:
        return {cat: LEXICON_POOLS[cat][:n] for cat, n in sorted(self.lexicon_sizes.items()) if n}


def _realize(template: str, label: str, lexicon, rng: random.Random, filler_rate: float) -> AnnotatedSentence:
    tokens: List[str] = []
    spans: List[EntitySpan] = []
    if rng.random() < filler_rate:
        tokens.append(rng.choice(FILLERS))
    for piece in template.split():
        m = _SLOT.fullmatch(piece)
        if m is None:
            tokens.append(piece)
            continue
        cat = m.group(1)
        form = rng.choice(lexicon[cat]).split()
        spans.append(EntitySpan(len(tokens), len(tokens) + len(form), cat))
        tokens.extend(form)
    return AnnotatedSentence(tuple(tokens), tuple(spans), label)


def gen_synthetic_corpus(spec: Optional[SynthSpec] = None, seed: int = 0) -> Tuple[Corpus, Corpus]:
    """Draw a train and a test corpus; no test sentence text occurs in train."""
    spec = spec or SynthSpec()
    spec.validate()
    rng = random.Random(seed)
    lexicon = spec.lexicon()
    labels = sorted(spec.templates)

    def draw():
        label = rng.choice(labels)
        template = rng.choice(tuple(spec.templates[label]))
        return _realize(template, label, lexicon, rng, spec.filler_rate)

    train = [draw() for _ in range(spec.n_train)]
    seen = {s.tokens for s in train}
    test: List[AnnotatedSentence] = []
    attempts = 0
    limit = 50 * spec.n_test
    while len(test) < spec.n_test:
        attempts += 1
        if attempts > limit:
            raise SynthSpecError("cannot draw enough test sentences disjoint from train; enlarge the lexicons")
        s = draw()
        if s.tokens not in seen:
            test.append(s)
    return Corpus(tuple(train), "synthetic-train"), Corpus(tuple(test), "synthetic-test")
