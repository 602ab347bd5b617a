"""Command-line entry point: ``dpdeid {transform,epsilon,verify,sweep,evaluate,gen-synth}``.

Exit codes: 0 success, 1 verification or validation failure, 2 I/O or parse error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .corpus import (
    Corpus,
    CorpusError,
    CorpusParseError,
    build_category_lexicon,
    parse_conll,
    parse_labeled,
    write_conll,
    write_labeled,
)
from .mechanism import STRATEGY_NAMES, StrategyError, build_strategy, transform_corpus, write_log
from .policy import (
    PolicyError,
    degenerate_policy,
    frequency_policy,
    gazetteer_policy,
    parse_vocabulary,
    uniform_policy,
)
from .privacy import (
    ORACLE_MAX_TOKENS,
    PrivacyError,
    epsilon,
    min_policy_mass_for_epsilon,
    privacy_report,
    verify_bound,
)
from .utility.metrics import accuracy, entity_f1
from .utility.models import train_sentence_classifier, train_token_tagger
from .utility.sweep import TASKS, rows_to_csv, summarize, sweep
from .utility.synth import SynthSpec, SynthSpecError, gen_synthetic_corpus

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# --- helpers ---------------------------------------------------------------


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}", EXIT_IO) from None


def _format_for(path: str, fmt: Optional[str]) -> str:
    if fmt:
        return fmt
    return "labeled" if Path(path).suffix.lower() in (".jsonl", ".json") else "conll"


def _load_corpus(path: str, fmt: Optional[str]) -> Corpus:
    fmt = _format_for(path, fmt)
    text = _read(path)
    try:
        return parse_labeled(text, path) if fmt == "labeled" else parse_conll(text, path)
    except CorpusParseError as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from None


def _dump_corpus(corpus: Corpus, fmt: str) -> str:
    return write_labeled(corpus) if fmt == "labeled" else write_conll(corpus)


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of numbers") from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of integers") from None


def _check_unit(name: str, value: Optional[float]) -> None:
    if value is not None and not (0.0 <= value <= 1.0):
        raise CliError(f"{name} must lie in [0, 1], got {value}", EXIT_INVALID)


def _exemplars(pairs: Optional[Sequence[str]]) -> Optional[Dict[str, str]]:
    if not pairs:
        return None
    out = {}
    for pair in pairs:
        cat, sep, tok = pair.partition("=")
        if not sep or not cat or not tok:
            raise CliError(f"exemplar {pair!r} must look like CATEGORY=TOKEN", EXIT_INVALID)
        out[cat] = tok
    return out


def _fmt_eps(eps: float) -> str:
    return "inf" if math.isinf(eps) else f"{eps:.6f}"


# --- commands --------------------------------------------------------------


def cmd_transform(args) -> int:
    _check_unit("p", args.p)
    _check_unit("recall", args.recall)
    fmt = _format_for(args.input, args.format)
    corpus = _load_corpus(args.input, fmt)
    gazetteer = _read(args.gazetteer) if args.gazetteer else None
    source = args.policy
    if source == "gazetteer" and gazetteer is None:
        raise CliError("--policy gazetteer needs --gazetteer PATH", EXIT_INVALID)
    strategy = build_strategy(
        args.strategy,
        args.p,
        corpus,
        source=source,
        gazetteer=gazetteer,
        exemplars=_exemplars(args.exemplar),
        granularity=args.granularity,
        consistent_mapping=args.consistent_mapping,
    )
    out, records, report = transform_corpus(corpus, strategy, args.seed, identifier_recall=args.recall)
    _write(args.output, _dump_corpus(out, fmt))
    log_path = args.log or args.output + ".log.jsonl"
    report_path = args.report or args.output + ".report.json"
    _write(log_path, write_log(records))
    _write(report_path, report.to_json())
    adj = " (recall-adjusted)" if report.recall_adjusted else ""
    print(f"transformed {len(out)} sentences; p={report.p}{adj} epsilon={_fmt_eps(report.overall_epsilon)}")
    if report.guarantee_void:
        print("warning: consistent mapping is enabled; the privacy guarantee does not apply")
    return EXIT_OK


def cmd_epsilon(args) -> int:
    _check_unit("p", args.p)
    _check_unit("recall", args.recall)
    if args.target_eps is not None:
        m = min_policy_mass_for_epsilon(args.p, args.target_eps)
        print(f"min policy mass for epsilon={args.target_eps} at p={args.p}: {m:.6e}")
        if args.vocab is None and args.pi_min is None:
            return EXIT_OK
    p = args.p
    if args.recall is not None:
        p = p * args.recall
        print(f"recall-adjusted p = {args.p} x {args.recall} = {p}")
    if args.pi_min is not None:
        _check_unit("pi-min", args.pi_min)
        print(f"epsilon = {_fmt_eps(epsilon(p, args.pi_min))}")
        return EXIT_OK
    if args.vocab is None:
        raise CliError("give --vocab, --pi-min or --target-eps", EXIT_INVALID)
    try:
        vocab = parse_vocabulary(_read(args.vocab))
    except CorpusParseError as exc:
        raise CliError(f"{args.vocab}: {exc}", EXIT_IO) from None
    if args.policy == "uniform":
        policy = uniform_policy(vocab)
    elif args.policy == "gazetteer":
        if not args.gazetteer:
            raise CliError("--policy gazetteer needs --gazetteer PATH", EXIT_INVALID)
        try:
            policy = gazetteer_policy(_read(args.gazetteer))
        except CorpusParseError as exc:
            raise CliError(f"{args.gazetteer}: {exc}", EXIT_IO) from None
    elif args.policy == "exemplars":
        policy = degenerate_policy(_exemplars(args.exemplar) or {})
    else:
        if not args.corpus:
            raise CliError("--policy corpus needs --corpus PATH", EXIT_INVALID)
        corpus = _load_corpus(args.corpus, None)
        policy = frequency_policy(build_category_lexicon(corpus, args.granularity))
    report = privacy_report("epsilon", p, policy, vocab)
    for cat in report.per_category:
        print(f"{cat.name}\tmin_mass={cat.min_mass:.6g}\tepsilon={_fmt_eps(cat.epsilon)}")
    print(f"overall\tepsilon={_fmt_eps(report.overall_epsilon)}\tdelta=0")
    return EXIT_OK


def cmd_verify(args) -> int:
    for p in args.p_grid:
        _check_unit("p", p)
    for k in args.k_grid:
        if k < 2 or k > ORACLE_MAX_TOKENS:
            raise CliError(f"K={k} outside [2, {ORACLE_MAX_TOKENS}]; refusing to enumerate", EXIT_INVALID)
    ok = True
    print("K\tp\ttheoretical\tempirical\tresult")
    for k in args.k_grid:
        vocab = {"X": frozenset(f"t{i:04d}" for i in range(k))}
        policy = uniform_policy(vocab)
        for p in args.p_grid:
            check = verify_bound(p, policy, vocab, "X", theoretical=args.inject_epsilon)
            ok &= check.passed
            status = "pass" if check.passed else "FAIL"
            print(f"{k}\t{p}\t{_fmt_eps(check.theoretical)}\t{_fmt_eps(check.empirical)}\t{status}")
    print("all checks passed" if ok else "verification FAILED")
    return EXIT_OK if ok else EXIT_INVALID


def cmd_sweep(args) -> int:
    for p in args.p_grid:
        _check_unit("p", p)
    train = _load_corpus(args.train, args.format)
    test = _load_corpus(args.test, args.format)
    seeds = args.seeds if args.seeds else list(range(args.n_seeds))
    gazetteer = _read(args.gazetteer) if args.gazetteer else None
    rows = sweep(
        train, test, args.strategies, args.p_grid, seeds, tasks=args.tasks,
        source=args.policy, gazetteer=gazetteer,
    )
    _write(args.output, rows_to_csv(rows))
    for (name, p, task), (mean, sd) in summarize(rows).items():
        print(f"{name}\tp={p}\t{task}\t{mean:.4f} +- {sd:.4f}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    train = _load_corpus(args.train, args.format)
    test = _load_corpus(args.test, args.format)
    if args.task == "ner":
        m = entity_f1(test, train_token_tagger(train).predict_corpus(test))
        print(f"f1\t{m.f1:.4f}\nprecision\t{m.precision:.4f}\nrecall\t{m.recall:.4f}")
    else:
        m = accuracy(test, train_sentence_classifier(train).predict_corpus(test))
        print(f"accuracy\t{m.accuracy:.4f}")
    for name, s in m.per_class.items():
        print(f"{name}\tP={s.precision:.4f}\tR={s.recall:.4f}\tF1={s.f1:.4f}\tn={s.support}")
    return EXIT_OK


def cmd_gen_synth(args) -> int:
    spec = SynthSpec(n_train=args.n_train, n_test=args.n_test)
    train, test = gen_synthetic_corpus(spec, args.seed)
    fmt = args.format
    _write(args.train_out, _dump_corpus(train, fmt))
    _write(args.test_out, _dump_corpus(test, fmt))
    print(f"wrote {len(train)} train and {len(test)} test sentences")
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dpdeid", description="Probabilistic text de-identification with differential-privacy accounting.")
    sub = parser.add_subparsers(dest="command", required=True)

    fmt_help = "corpus format; default: labeled for .jsonl/.json, conll otherwise"

    t = sub.add_parser("transform", help="de-identify a corpus; writes corpus, log and privacy report")
    t.add_argument("--input", required=True, help="input corpus path")
    t.add_argument("--format", choices=("conll", "labeled"), help=fmt_help)
    t.add_argument("--output", required=True, help="transformed corpus path (same format as input)")
    t.add_argument("--log", help="transformation log path (default: OUTPUT.log.jsonl)")
    t.add_argument("--report", help="privacy report path (default: OUTPUT.report.json)")
    t.add_argument("--strategy", required=True, choices=STRATEGY_NAMES, help="replacement strategy")
    t.add_argument("--p", type=_number, default=1.0, help="replacement probability (default 1)")
    t.add_argument(
        "--policy", choices=("uniform", "corpus", "gazetteer"), default="corpus",
        help="surrogate source for word_by_word/full_entity (default corpus frequencies)",
    )
    t.add_argument("--gazetteer", help="category<TAB>token<TAB>weight file for --policy gazetteer")
    t.add_argument("--exemplar", action="append", metavar="CAT=TOKEN", help="named-placeholder exemplar (repeatable)")
    t.add_argument("--granularity", choices=("word", "entity"), help="unit of replacement (placeholders only)")
    t.add_argument("--consistent-mapping", action="store_true", help="full_entity only; voids the guarantee")
    t.add_argument("--recall", type=_number, help="identifier recall; reports epsilon at p x recall")
    t.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    t.set_defaults(func=cmd_transform)

    e = sub.add_parser("epsilon", help="closed-form epsilon, or the policy mass needed for a target epsilon")
    e.add_argument("--p", type=_number, required=True, help="replacement probability")
    e.add_argument("--pi-min", type=_number, help="minimum policy mass, evaluated directly")
    e.add_argument("--vocab", help="category<TAB>token file of possible originals")
    e.add_argument(
        "--policy", choices=("uniform", "corpus", "gazetteer", "exemplars"), default="uniform",
        help="policy over --vocab (default uniform)",
    )
    e.add_argument("--gazetteer", help="gazetteer file for --policy gazetteer")
    e.add_argument("--corpus", help="corpus whose frequencies define --policy corpus")
    e.add_argument("--granularity", choices=("word", "entity"), default="word", help="lexicon unit for --policy corpus")
    e.add_argument("--exemplar", action="append", metavar="CAT=TOKEN", help="exemplar for --policy exemplars")
    e.add_argument("--recall", type=_number, help="identifier recall; uses p x recall")
    e.add_argument("--target-eps", type=float, help="print the min policy mass achieving this epsilon")
    e.set_defaults(func=cmd_epsilon)

    v = sub.add_parser("verify", help="check closed-form epsilon against exhaustive enumeration")
    v.add_argument("--p-grid", type=_float_list, default=[0.25, 0.5, 0.9, 1.0], help="comma-separated p values")
    v.add_argument("--k-grid", type=_int_list, default=[2, 4, 16], help="comma-separated vocabulary sizes")
    v.add_argument("--inject-epsilon", type=float, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="privacy/utility sweep over p; writes CSV")
    s.add_argument("--train", required=True, help="training corpus")
    s.add_argument("--test", required=True, help="test corpus (never transformed)")
    s.add_argument("--format", choices=("conll", "labeled"), help=fmt_help)
    s.add_argument("--strategies", type=lambda x: x.split(","), default=["word_by_word"],
                   help="comma-separated strategy names (default word_by_word)")
    s.add_argument("--p-grid", type=_float_list, default=[0.25, 0.5, 0.75, 1.0], help="comma-separated p values")
    s.add_argument("--seeds", type=_int_list, help="comma-separated seeds (overrides --n-seeds)")
    s.add_argument("--n-seeds", type=int, default=10, help="use seeds 0..N-1 (default 10)")
    s.add_argument("--tasks", type=lambda x: x.split(","), default=list(TASKS), help="comma-separated: ner,intent")
    s.add_argument("--policy", choices=("uniform", "corpus", "gazetteer"), default="corpus", help="surrogate source")
    s.add_argument("--gazetteer", help="gazetteer file for --policy gazetteer")
    s.add_argument("--output", required=True, help="CSV output path")
    s.set_defaults(func=cmd_sweep)

    ev = sub.add_parser("evaluate", help="train on one corpus, score on another")
    ev.add_argument("--train", required=True, help="training corpus")
    ev.add_argument("--test", required=True, help="test corpus")
    ev.add_argument("--format", choices=("conll", "labeled"), help=fmt_help)
    ev.add_argument("--task", choices=TASKS, default="intent", help="ner (entity F1) or intent (accuracy)")
    ev.set_defaults(func=cmd_evaluate)

    g = sub.add_parser("gen-synth", help="generate the synthetic train/test corpora")
    g.add_argument("--n-train", type=int, default=SynthSpec.n_train, help="training sentences")
    g.add_argument("--n-test", type=int, default=SynthSpec.n_test, help="test sentences")
    g.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    g.add_argument("--format", choices=("conll", "labeled"), default="labeled", help="output format")
    g.add_argument("--train-out", required=True, help="training corpus output path")
    g.add_argument("--test-out", required=True, help="test corpus output path")
    g.set_defaults(func=cmd_gen_synth)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except CorpusParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (CorpusError, PolicyError, PrivacyError, StrategyError, SynthSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
