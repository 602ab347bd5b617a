from .metrics import ClassScores, EvalMetrics, EvaluationError, accuracy, entity_f1
from .models import SentenceClassifier, TokenTagger, train_sentence_classifier, train_token_tagger
from .sweep import SweepRow, evaluate, rows_from_csv, rows_to_csv, summarize, sweep
from .synth import SynthSpec, SynthSpecError, gen_synthetic_corpus

__all__ = [
    "ClassScores",
    "EvalMetrics",
    "EvaluationError",
    "SentenceClassifier",
    "SweepRow",
    "SynthSpec",
    "SynthSpecError",
    "TokenTagger",
    "accuracy",
    "entity_f1",
    "evaluate",
    "gen_synthetic_corpus",
    "rows_from_csv",
    "rows_to_csv",
    "summarize",
    "sweep",
    "train_sentence_classifier",
    "train_token_tagger",
]
