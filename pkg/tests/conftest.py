from pathlib import Path

import pytest

from dpdeid.corpus import AnnotatedSentence, Corpus, EntitySpan

DATA = Path(__file__).parent / "data"

REFERENCE_SOURCE = "Hi Mister Miller , the Lufthansa flight from Frankfurt Airport to Rome is leaving by six pm"
REFERENCE_REDACT = "Hi Mister IIIII , the IIIII flight from IIIII to IIIII is leaving by IIIII"
REFERENCE_TYPED = "Hi Mister PER , the ORG flight from LOC to LOC is leaving by TIME"
REFERENCE_NAMED = "Hi Mister Smith , the SAP flight from London to London is leaving by afternoon"
REFERENCE_EXEMPLARS = {"PER": "Smith", "ORG": "SAP", "LOC": "London", "TIME": "afternoon"}


@pytest.fixture
def reference_sentence() -> AnnotatedSentence:
    return AnnotatedSentence(
        tuple(REFERENCE_SOURCE.split()),
        (
            EntitySpan(2, 3, "PER"),
            EntitySpan(5, 6, "ORG"),
            EntitySpan(8, 10, "LOC"),
            EntitySpan(11, 12, "LOC"),
            EntitySpan(15, 17, "TIME"),
        ),
    )


@pytest.fixture
def reference_corpus(reference_sentence) -> Corpus:
    return Corpus((reference_sentence,), "reference")


@pytest.fixture
def reference_conll_text() -> str:
    return (DATA / "reference.conll").read_text(encoding="utf-8")


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
