from fractions import Fraction

import pytest

import oracles
from corpus import CORPUS
from monqfa.builders import hoeffding_bound
from monqfa.decide import (DecideError, decompose_liidpt, is_lmo, is_piecewise_testable, measured_isolation_ok,
                           synthesize)
from monqfa.dfa import basis_dfa, bool_op, complement, compile_regex, equivalent, minimize
from monqfa.monoid import green_trivial, is_literally_idempotent, transition_monoid
from monqfa.randomgen import random_minimal_dfas


def test_verdict_examples():
    assert is_lmo(compile_regex(".*a.*b.*", "ab")).member
    even = is_lmo(compile_regex("(aa)*", "a"))
    assert not even.member and even.idempotency_witness == (0, "a")
    assert not is_lmo(compile_regex(".*aa.*", "ab")).member


def test_piecewise_testability_examples():
    for strategy in ("monoid", "graph"):
        assert is_piecewise_testable(basis_dfa("ab", "ab"), strategy)
        assert not is_piecewise_testable(compile_regex("(aa)*", "a"), strategy)
        assert not is_piecewise_testable(compile_regex("(ab)*", "ab"), strategy)
    with pytest.raises(DecideError):
        is_piecewise_testable(basis_dfa("a", "ab"), "bogus")


def test_graph_strategy_agrees_with_monoid_oracle():
    for d in random_minimal_dfas(500, seed=77):
        assert is_piecewise_testable(d, "graph") == is_piecewise_testable(d, "monoid")


@pytest.mark.parametrize("name,make,expected", CORPUS, ids=[c[0] for c in CORPUS])
def test_corpus_three_way_agreement(name, make, expected):
    d = minimize(make())
    verdict = is_lmo(d)
    algebraic = green_trivial(transition_monoid(d), "J") and is_literally_idempotent(d)
    try:
        dec = decompose_liidpt(d, require_member=False)
        rebuilt = equivalent(minimize(dec.expr.to_dfa(d.alphabet)), d)
    except DecideError:
        rebuilt = False
    assert verdict.member == algebraic == rebuilt == expected


@pytest.mark.parametrize("name,make,expected", [c for c in CORPUS if not c[2]], ids=[c[0] for c in CORPUS if not c[2]])
def test_non_member_witnesses_are_concrete(name, make, expected):
    d = minimize(make())
    v = is_lmo(d)
    if v.word_pair is not None:
        long_w, short_w, in_long, in_short = v.word_pair
        assert any(long_w == short_w[:i + 1] + short_w[i:] for i in range(len(short_w)))
        assert d.accepts(long_w) == in_long != in_short == d.accepts(short_w)
        assert oracles.literal_idempotency_counterexample(d.accepts, d.alphabet, len(long_w)) is not None
    if v.j_witness is not None:
        m = transition_monoid(d)
        c = v.j_witness
        assert c.a != c.b
        assert m.element_of(c.left_ab + c.word_b + c.right_ab) == m.element_of(c.word_a)
        assert m.element_of(c.left_ba + c.word_a + c.right_ba) == m.element_of(c.word_b)
    assert v.word_pair is not None or v.j_witness is not None
    with pytest.raises(DecideError):
        decompose_liidpt(d)


def test_decompose_examples():
    dec = decompose_liidpt(basis_dfa("a", "ab"))
    assert dec.k == 1 and dec.expr.to_text() == "L[a]"
    dec = decompose_liidpt(complement(basis_dfa("a", "ab")))
    assert dec.expr.to_text() == "!L[a]"
    target = bool_op(basis_dfa("ab", "ab"), complement(basis_dfa("ba", "ab")), "and")
    dec = decompose_liidpt(target)
    assert equivalent(minimize(dec.expr.to_dfa("ab")), target)


def test_decompose_bound():
    with pytest.raises(DecideError):
        decompose_liidpt(basis_dfa("abab", "ab"), k_max=3)


def test_synthesize_examples():
    res = synthesize(basis_dfa("a", "ab"))
    assert res.agrees and measured_isolation_ok(res)
    assert res.declared_cutpoint == Fraction(1, 2)
    for seq, n in res.copies.items():
        assert hoeffding_bound(Fraction(1, 16), n) <= res.atom_error
    full = synthesize(compile_regex(".*", "ab"))
    assert full.declared_isolation == Fraction(1, 2) and full.agrees
    either = bool_op(basis_dfa("ab", "ab"), basis_dfa("ba", "ab"), "or")
    res = synthesize(either, check_len=8)
    assert res.agrees and measured_isolation_ok(res)
    assert res.declared_isolation >= Fraction(1, 4)


def test_synthesize_rejects_non_members():
    with pytest.raises(DecideError):
        synthesize(compile_regex("(aa)*", "a"))
