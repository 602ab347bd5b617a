import json

import pytest

from conftest import DATA, REFERENCE_NAMED, REFERENCE_REDACT
from dpdeid.cli import main
from dpdeid.corpus import parse_conll, parse_labeled


@pytest.fixture
def reference_path(tmp_path):
    path = tmp_path / "reference.conll"
    path.write_bytes((DATA / "reference.conll").read_bytes())
    return path


def tokens_of(path):
    return " ".join(parse_conll(path.read_text()).sentences[0].tokens)


def test_transform_redact_reference(tmp_path, reference_path):
    out = tmp_path / "out.conll"
    assert main(["transform", "--input", str(reference_path), "--output", str(out), "--strategy", "redact", "--p", "1"]) == 0
    assert tokens_of(out) == REFERENCE_REDACT
    expected = "".join(
        f"{tok}\t{tag}\n"
        for tok, tag in zip(REFERENCE_REDACT.split(), "O O B-PER O O B-ORG O O B-LOC O B-LOC O O O B-TIME".split())
    ) + "\n"
    assert out.read_text() == expected
    report = json.loads((tmp_path / "out.conll.report.json").read_text())
    assert report["overall_epsilon"] == 0.0 and report["delta"] == 0.0
    assert (tmp_path / "out.conll.log.jsonl").read_text().count("\n") == 5


def test_transform_named_with_exemplars(tmp_path, reference_path):
    out = tmp_path / "named.conll"
    args = ["transform", "--input", str(reference_path), "--output", str(out), "--strategy", "named_placeholder"]
    for pair in ("PER=Smith", "ORG=SAP", "LOC=London", "TIME=afternoon"):
        args += ["--exemplar", pair]
    assert main(args) == 0
    assert tokens_of(out) == REFERENCE_NAMED


def test_transform_p0_identity(tmp_path, reference_path):
    out = tmp_path / "same.conll"
    rep = tmp_path / "rep.json"
    log = tmp_path / "log.jsonl"
    args = ["transform", "--input", str(reference_path), "--output", str(out), "--strategy", "word_by_word",
            "--p", "0", "--report", str(rep), "--log", str(log)]
    assert main(args) == 0
    assert out.read_bytes() == reference_path.read_bytes()
    assert json.loads(rep.read_text())["overall_epsilon"] == "inf"
    assert all(not json.loads(line)["replaced"] for line in log.read_text().splitlines())


def test_transform_deterministic(tmp_path, reference_path):
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / f"{run}.conll"
        main(["transform", "--input", str(reference_path), "--output", str(out), "--strategy", "full_entity",
              "--p", "0.6", "--policy", "uniform", "--seed", "17"])
        outputs.append([(tmp_path / f"{run}.conll{suffix}").read_bytes() for suffix in ("", ".log.jsonl", ".report.json")])
    assert outputs[0] == outputs[1]


def test_transform_recall(tmp_path, reference_path, capsys):
    out = tmp_path / "r.conll"
    assert main(["transform", "--input", str(reference_path), "--output", str(out), "--strategy", "word_by_word",
                 "--p", "1", "--recall", "0.8"]) == 0
    assert "recall-adjusted" in capsys.readouterr().out
    rep = json.loads((tmp_path / "r.conll.report.json").read_text())
    assert rep["recall_adjusted"] and rep["p"] == pytest.approx(0.8)


def test_transform_labeled_round_trip(tmp_path):
    src = tmp_path / "in.jsonl"
    src.write_text('{"text": "fly to Rome", "label": "F", "spans": [{"start": 2, "end": 3, "category": "LOC"}]}\n')
    out = tmp_path / "out.jsonl"
    assert main(["transform", "--input", str(src), "--output", str(out), "--strategy", "typed_placeholder"]) == 0
    c = parse_labeled(out.read_text())
    assert c[0].text == "fly to LOC" and c[0].label == "F"


def test_transform_errors(tmp_path, reference_path, capsys):
    out = str(tmp_path / "x.conll")
    assert main(["transform", "--input", str(tmp_path / "missing"), "--output", out, "--strategy", "redact"]) == 2
    bad = tmp_path / "bad.conll"
    bad.write_text("a\tO\nb\tB-LOC\textra\n")
    assert main(["transform", "--input", str(bad), "--output", out, "--strategy", "redact"]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["transform", "--input", str(reference_path), "--output", out, "--strategy", "redact", "--p", "2"]) == 1


def test_epsilon_p1(capsys):
    assert main(["epsilon", "--p", "1", "--pi-min", "0.25"]) == 0
    assert "epsilon = 0.000000" in capsys.readouterr().out


def test_epsilon_target(capsys):
    assert main(["epsilon", "--p", "0.9", "--target-eps", "6.75"]) == 0
    out = capsys.readouterr().out
    value = float(out.strip().rsplit(" ", 1)[-1])
    assert value == pytest.approx(1.3026e-4, rel=1e-3)


def test_epsilon_uniform_vocab(tmp_path, capsys):
    vocab = tmp_path / "vocab.tsv"
    vocab.write_text("LOC\tLondon\nLOC\tRome\nLOC\tParis\nLOC\tOslo\n")
    assert main(["epsilon", "--p", "0.5", "--vocab", str(vocab)]) == 0
    assert "overall\tepsilon=1.609438" in capsys.readouterr().out


def test_epsilon_invalid_p():
    assert main(["epsilon", "--p", "1.5", "--pi-min", "0.1"]) == 1


def test_verify_default_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    row = [line for line in out.splitlines() if line.startswith("4\t1.0")][0].split("\t")
    assert row[2] == row[3] == "0.000000"


def test_verify_injected_failure():
    assert main(["verify", "--inject-epsilon", "0.123"]) == 1


def test_verify_refuses_oversize():
    assert main(["verify", "--k-grid", "5000"]) == 1


def test_gen_synth_evaluate_sweep(tmp_path, capsys):
    tr, te = tmp_path / "train.jsonl", tmp_path / "test.jsonl"
    assert main(["gen-synth", "--train-out", str(tr), "--test-out", str(te)]) == 0
    capsys.readouterr()
    assert main(["evaluate", "--train", str(tr), "--test", str(te), "--task", "intent"]) == 0
    acc = float(capsys.readouterr().out.splitlines()[0].split("\t")[1])
    assert acc >= 0.95
    csv_path = tmp_path / "sweep.csv"
    assert main(["sweep", "--train", str(tr), "--test", str(te), "--strategies", "word_by_word",
                 "--p-grid", "0.25,0.5,0.75,1.0", "--seeds", "0,1", "--output", str(csv_path)]) == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "p,epsilon,strategy,task,metric,value,seed"
    assert len(lines) - 1 == 4 * 2 * 2
    eps = []
    for line in lines[1::4]:
        eps.append(float(line.split(",")[1]))
    assert all(a > b for a, b in zip(eps, eps[1:]))


def test_help_documents_flags(capsys):
    for cmd in ("transform", "epsilon", "verify", "sweep", "evaluate", "gen-synth"):
        with pytest.raises(SystemExit):
            main([cmd, "--help"])
        out = capsys.readouterr().out
        assert "usage:" in out
