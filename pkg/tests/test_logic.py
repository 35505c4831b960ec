import itertools

import pytest

import oracles
from corpus import CORPUS
from monqfa.decide import BAnd, BConst, BLeaf, BNot, BOr, decompose_liidpt, is_lmo
from monqfa.dfa import basis_dfa, compile_regex, equivalent, full_dfa, minimize
from monqfa.logic import (And, EasyFO, EasyLTL, LogicError, Not, Or, compile_fo, compile_formula, compile_ltl,
                          model_check_ltl, parse_formula)


def test_parse_examples():
    assert parse_formula("fo(a,b)") == EasyFO("ab")
    f = parse_formula("!fo(a) & fo(b)")
    assert f == And(Not(EasyFO("a")), EasyFO("b"))
    assert parse_formula("fo(a) | fo(b) & fo(c)") == Or(EasyFO("a"), And(EasyFO("b"), EasyFO("c")))
    assert parse_formula(" ltl( {a, b} , {c} ) ") == EasyLTL((frozenset("ab"), frozenset("c")))


@pytest.mark.parametrize("text,pos", [("fo(a,a)", 0), ("fo(a", 4), ("ltl({})", 0), ("fo(a) &", 7),
                                      ("foo", 2), ("fo(a) fo(b)", 6)])
def test_parse_errors_carry_positions(text, pos):
    with pytest.raises(LogicError) as err:
        parse_formula(text)
    assert err.value.pos == pos


def test_mixed_leaves_rejected():
    with pytest.raises(LogicError):
        parse_formula("fo(a) & ltl({a})")


def test_fo_examples():
    assert equivalent(compile_fo(parse_formula("fo(a)"), "ab"), compile_regex(".*a.*", "ab"))
    assert equivalent(compile_fo(parse_formula("fo(a,b)"), "ab"), basis_dfa("ab", "ab"))
    neg = compile_fo(parse_formula("!fo(a)"), "ab")
    assert neg.accepts("bbb") and not neg.accepts("bab")
    with pytest.raises(LogicError):
        compile_fo(parse_formula("fo(c)"), "ab")


def test_ltl_examples():
    assert equivalent(compile_ltl(parse_formula("ltl({a})"), "ab"), compile_regex("a*", "ab"))
    ab = compile_ltl(parse_formula("ltl({a},{b})"), "ab")
    assert ab.accepts("ab") and not ab.accepts("ba")
    assert equivalent(compile_ltl(parse_formula("ltl({a,b},{a})"), "ab"), full_dfa("ab"))


def test_model_check_examples():
    assert model_check_ltl(EasyLTL((frozenset("a"),)), "")
    leaf = EasyLTL((frozenset("a"), frozenset("b")))
    assert model_check_ltl(leaf, "aab")
    assert not model_check_ltl(leaf, "ba")


def _all_sets(alphabet):
    return [frozenset(c) for r in range(1, len(alphabet) + 1) for c in itertools.combinations(alphabet, r)]


@pytest.mark.parametrize("alphabet", ["a", "ab", "abc"])
def test_every_fo_leaf_is_its_basis_language(alphabet):
    for seq in oracles.basis_sequences(alphabet, 3):
        assert equivalent(compile_fo(EasyFO(seq), alphabet), basis_dfa(seq, alphabet))


@pytest.mark.parametrize("alphabet", ["a", "ab"])
def test_every_ltl_leaf_small_alphabets(alphabet):
    sets = _all_sets(alphabet)
    for k in range(1, 4):
        for combo in itertools.product(sets, repeat=k):
            leaf = EasyLTL(combo)
            d = compile_ltl(leaf, alphabet)
            for w in oracles.words(alphabet, 6):
                assert d.accepts(w) == model_check_ltl(leaf, w) == oracles.ltl_member(combo, w)


def test_boolean_combinations_stay_in_the_class():
    for text in ("fo(a,b) & !fo(b,a)", "!(fo(a) | fo(c,b))", "fo(a,b,a) | fo(b,c)",
                 "ltl({a},{b}) | ltl({b},{c})", "!ltl({a,b},{c}) & ltl({a,b,c})"):
        assert is_lmo(compile_formula(text, "abc")).member


def _to_formula(expr):
    if isinstance(expr, BLeaf):
        return EasyFO(expr.seq)
    if isinstance(expr, BNot):
        return Not(_to_formula(expr.inner))
    parts = [_to_formula(e) for e in expr.items]
    op = And if isinstance(expr, BAnd) else Or
    out = parts[0]
    for p in parts[1:]:
        out = op(out, p)
    return out


def test_members_are_expressible_by_fo_formulas():
    for name, make, _ in CORPUS:
        d = minimize(make())
        if not is_lmo(d).member:
            continue
        expr = decompose_liidpt(d).expr
        if isinstance(expr, BConst):
            continue  # the constant languages need no leaf
        assert isinstance(expr, (BLeaf, BNot, BAnd, BOr))
        assert equivalent(compile_fo(_to_formula(expr), d.alphabet), d), name
