import math
import random
from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpdeid.policy import ReplacementPolicy, degenerate_policy, frequency_policy, redact_policy, uniform_policy
from dpdeid.privacy import (
    INF,
    PrivacyError,
    decode_epsilon,
    effective_p,
    empirical_epsilon_oracle,
    epsilon,
    min_policy_mass_for_epsilon,
    privacy_report,
    verify_bound,
)


def brute_force_epsilon(p, pmf, originals):
    """Exact rational enumeration of Pr[output | single-token dataset] over all neighbour pairs."""
    p = Fraction(p)
    outputs = set(originals) | set(pmf)
    worst = Fraction(1)
    for t1, t2 in permutations(originals, 2):
        for t in outputs:
            pi = Fraction(pmf.get(t, 0))
            a = p * pi + (1 - p) * (t == t1)
            b = p * pi + (1 - p) * (t == t2)
            if a == 0 and b == 0:
                continue
            if a == 0 or b == 0:
                return INF
            worst = max(worst, a / b, b / a)
    return math.log(worst)


# frozen from brute_force_epsilon
LOG3 = 1.0986122886681098
LOG5 = 1.6094379124341003


def test_brute_force_values_frozen():
    assert brute_force_epsilon(Fraction(1, 2), {"a": Fraction(1, 2), "b": Fraction(1, 2)}, "ab") == pytest.approx(LOG3, abs=1e-15)
    quarter = Fraction(1, 4)
    assert brute_force_epsilon(Fraction(1, 2), dict.fromkeys("abcd", quarter), "abcd") == pytest.approx(LOG5, abs=1e-15)


@pytest.mark.parametrize("m", [0.01, 0.25, 0.5, 1.0])
def test_epsilon_zero_at_full_replacement(m):
    assert epsilon(1.0, m) == 0.0


def test_epsilon_values():
    assert epsilon(0.5, 0.25) == pytest.approx(LOG5, abs=1e-12)
    assert epsilon(0.5, 0.0) == INF
    assert epsilon(0.0, 0.25) == INF
    assert epsilon(1.0, 0.0) == 0.0


def test_epsilon_inverse_anchor():
    m = min_policy_mass_for_epsilon(0.9, 6.75)
    assert m == pytest.approx(1.3026e-4, rel=1e-3)
    assert epsilon(0.9, m) == pytest.approx(6.75, abs=0.01)


@pytest.mark.parametrize("p, m", [(-0.1, 0.5), (1.1, 0.5), (0.5, -0.1), (0.5, 1.5)])
def test_epsilon_rejects_out_of_range(p, m):
    with pytest.raises(PrivacyError):
        epsilon(p, m)


def test_inverse_values():
    assert min_policy_mass_for_epsilon(0.5, math.log(5)) == pytest.approx(0.25, abs=1e-12)
    for bad_p in (0.0, 1.0):
        with pytest.raises(PrivacyError):
            min_policy_mass_for_epsilon(bad_p, 1.0)


def test_inverse_unattainable_target():
    # at p = 0.5 the loss never drops below log 2
    with pytest.raises(PrivacyError, match="unattainable"):
        min_policy_mass_for_epsilon(0.5, 0.5)


def test_inverse_round_trip_grid():
    for p in (0.1, 0.3, 0.5, 0.7, 0.9):
        for eps in (3.0, 5.0, 6.75, 10.0):
            m = min_policy_mass_for_epsilon(p, eps)
            assert abs(epsilon(p, m) - eps) <= 1e-9


def test_effective_p():
    assert effective_p(1.0, 0.8) == pytest.approx(0.8)
    assert effective_p(0.37, 1.0) == 0.37
    assert effective_p(0.5, 0.5) == 0.25
    with pytest.raises(PrivacyError):
        effective_p(0.5, 1.2)


def test_oracle_two_tokens():
    vocab = {"X": frozenset("ab")}
    assert empirical_epsilon_oracle(0.5, uniform_policy(vocab), vocab, "X") == pytest.approx(LOG3, abs=1e-12)


def test_oracle_full_replacement_is_zero():
    vocab = {"X": frozenset("abcde")}
    assert empirical_epsilon_oracle(1.0, uniform_policy(vocab), vocab, "X") == 0.0
    assert empirical_epsilon_oracle(1.0, redact_policy(["X"]), vocab, "X") == 0.0


def test_oracle_redact_is_infinite_below_one():
    vocab = {"X": frozenset("ab")}
    assert empirical_epsilon_oracle(0.5, redact_policy(["X"]), vocab, "X") == INF


def test_oracle_size_guard():
    vocab = {"X": frozenset(f"t{i}" for i in range(1001))}
    with pytest.raises(PrivacyError, match="limit"):
        empirical_epsilon_oracle(0.5, uniform_policy(vocab), vocab, "X")


@pytest.mark.parametrize("k", [2, 4, 16])
@pytest.mark.parametrize("p", [0.25, 0.5, 0.9, 1.0])
def test_verify_grid(k, p):
    vocab = {"X": frozenset(f"t{i}" for i in range(k))}
    check = verify_bound(p, uniform_policy(vocab), vocab, "X")
    assert check.passed
    assert check.empirical == pytest.approx(
        brute_force_epsilon(Fraction(p), {t: Fraction(1, k) for t in vocab["X"]}, sorted(vocab["X"])), abs=1e-12
    )


def test_verify_frequency_policy():
    pol = frequency_policy({"LOC": {"London": 2, "Rome": 1, "Paris": 1}})
    vocab = {"LOC": frozenset({"London", "Rome", "Paris"})}
    check = verify_bound(0.5, pol, vocab, "LOC")
    assert check.passed
    assert check.theoretical == pytest.approx(LOG5, abs=1e-12)
    assert check.empirical == pytest.approx(LOG5, abs=1e-12)


def test_verify_named_placeholder_at_one():
    pol = degenerate_policy({"LOC": "London"})
    vocab = {"LOC": frozenset({"London", "Rome"})}
    check = verify_bound(1.0, pol, vocab, "LOC")
    assert check.passed and check.theoretical == 0.0 and check.empirical == 0.0


def test_verify_detects_wrong_theory():
    vocab = {"X": frozenset("abcd")}
    assert not verify_bound(0.5, uniform_policy(vocab), vocab, "X", theoretical=1.0).passed


def test_mechanism_frequencies_match_closed_form():
    """Simulate the replacement step and compare empirical output rates with p*pi + (1-p)*[t=o]."""
    pmf = {"a": 0.5, "b": 0.3, "c": 0.2}
    pol = ReplacementPolicy("frequency", {"X": pmf})
    p, n = 0.6, 40_000
    rng = random.Random(5)
    counts = dict.fromkeys(pmf, 0)
    for _ in range(n):
        out = pol.sample("X", rng) if rng.random() <= p else "a"
        counts[out] += 1
    for t, m in pmf.items():
        expected = p * m + (1 - p) * (t == "a")
        assert abs(counts[t] / n - expected) < 0.01


@st.composite
def random_policy(draw):
    k = draw(st.integers(2, 12))
    raw = draw(st.lists(st.integers(1, 50), min_size=k, max_size=k))
    pmf = {f"t{i}": Fraction(w, sum(raw)) for i, w in enumerate(raw)}
    extra = draw(st.integers(0, 3))
    for j in range(extra):  # surrogates that are never originals
        pmf[f"s{j}"] = Fraction(0)
    return pmf


@settings(max_examples=60, deadline=None)
@given(random_policy(), st.floats(min_value=0.01, max_value=1.0))
def test_oracle_equals_closed_form(pmf, p):
    weights = {t: float(w) for t, w in pmf.items() if w > 0}
    pol = ReplacementPolicy("frequency", {"X": weights})
    vocab = {"X": frozenset(t for t in pmf if t.startswith("t"))}
    theo = epsilon(p, min(pol.mass("X", t) for t in vocab["X"]))
    assert empirical_epsilon_oracle(p, pol, vocab, "X") == pytest.approx(theo, abs=1e-9)


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(1e-6, 1.0))
def test_monotone_in_p(p1, p2, m):
    lo, hi = sorted((p1, p2))
    assert epsilon(lo, m) >= epsilon(hi, m)
    if lo < hi and m < 1.0 and lo > 0:
        assert epsilon(lo, m) > epsilon(hi, m)


@given(st.floats(0.01, 0.99), st.floats(1e-6, 1.0), st.floats(1e-6, 1.0))
def test_monotone_in_min_mass(p, m1, m2):
    lo, hi = sorted((m1, m2))
    assert epsilon(p, lo) >= epsilon(p, hi)


def test_report_fields():
    vocab = {"LOC": frozenset({"London", "Rome"}), "PER": frozenset({"Miller"})}
    pol = uniform_policy(vocab)
    rep = privacy_report("word_by_word", 0.5, pol, vocab)
    d = rep.to_dict()
    assert list(d)[:6] == ["strategy", "p", "per_category", "overall_epsilon", "delta", "guarantee_void"]
    assert d["delta"] == 0.0 and d["guarantee_void"] is False
    per = {c["name"]: c for c in d["per_category"]}
    assert per["LOC"]["min_mass"] == 0.5 and per["PER"]["min_mass"] == 1.0
    assert rep.overall_epsilon == max(c.epsilon for c in rep.per_category) == per["LOC"]["epsilon"]


def test_report_infinity_and_recall():
    vocab = {"LOC": frozenset({"London", "Rome"})}
    rep = privacy_report("redact", 1.0, redact_policy(["LOC"]), vocab, identifier_recall=0.8)
    assert rep.p == pytest.approx(0.8) and rep.recall_adjusted
    assert rep.overall_epsilon == INF
    d = rep.to_dict()
    assert d["overall_epsilon"] == "inf" and decode_epsilon(d["overall_epsilon"]) == INF
    assert d["configured_p"] == 1.0 and d["identifier_recall"] == 0.8
    assert any("recall-adjusted" in n for n in d["notes"])


def test_report_consistent_mapping_voids_guarantee():
    vocab = {"LOC": frozenset({"London", "Rome"})}
    rep = privacy_report("full_entity", 1.0, uniform_policy(vocab), vocab, consistent_mapping=True)
    assert rep.guarantee_void


def test_extreme_inputs_stay_finite():
    # p * m underflows to 0 in double precision; the loss is large but finite
    assert epsilon(5e-324, 0.5) == pytest.approx(-math.log(5e-324) + math.log(2), rel=1e-12)
    assert epsilon(5e-324, 0.5) > epsilon(1e-323, 0.5)
    m = min_policy_mass_for_epsilon(0.5, 720.0)
    assert 0.0 < m < 1e-300
    assert epsilon(0.5, m) == pytest.approx(720.0, rel=1e-12)
