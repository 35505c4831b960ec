import random
from fractions import Fraction

import pytest

import oracles
from monqfa.builders import build_basis_automaton, to_lqfa
from monqfa.linalg import Matrix
from monqfa.qfa import (LQFA, END, BranchOverflowError, MOnQFA, Observable, QfaError, accept_prob,
                        accept_prob_branches, accept_probs_upto, classify, density_evolve,
                        lqfa_accept_prob, lqfa_accept_prob_branches)
from monqfa.randomgen import random_lqfa, random_monqfa

H = Fraction(1, 2)


@pytest.fixture(scope="module")
def a_a():
    return build_basis_automaton("a", "ab")


@pytest.fixture(scope="module")
def a_ab():
    return build_basis_automaton("ab", "ab")


def test_density_examples(a_a):
    assert density_evolve(a_a, "") == Matrix.from_rows([[1, 0], [0, 0]])
    assert density_evolve(a_a, "a") == Matrix.from_rows([[H, 0], [0, H]])
    assert density_evolve(a_a, "b") == density_evolve(a_a, "")


def test_accept_prob_examples(a_a, a_ab):
    assert accept_prob(a_a, "a") == H
    assert accept_prob(a_a, "") == 0
    assert accept_prob(a_ab, "ab") == Fraction(1, 4)
    assert accept_prob(a_ab, "ba") == 0


def test_unknown_letter(a_a):
    with pytest.raises(QfaError):
        accept_prob(a_a, "z")


def test_branches_match_hand_count(a_a):
    assert accept_prob_branches(a_a, "a") == H
    assert accept_prob_branches(a_a, "") == accept_prob(a_a, "")


@pytest.mark.parametrize("seq", ["a", "ab", "aba", "bab"])
def test_matches_oracles_on_basis_automata(seq):
    a = build_basis_automaton(seq, "ab")
    table = accept_probs_upto(a, 5)
    for w, p in table.items():
        assert p == oracles.basis_prob(seq, w) == accept_prob(a, w)
        if len(w) <= 4:
            assert accept_prob_branches(a, w) == oracles.basis_prob_branches(seq, w)


def test_random_automata_branch_cross_check():
    rng = random.Random(11)
    ws = list(oracles.words("ab", 6))
    for _ in range(10):
        a = random_monqfa("ab", 3, rng)
        for w in rng.sample(ws, 10):
            assert accept_prob(a, w) == accept_prob_branches(a, w)


def test_trace_is_preserved_and_letters_are_idempotent():
    rng = random.Random(5)
    for _ in range(5):
        a = random_monqfa("ab", 3, rng)
        for w in oracles.words("ab", 3):
            sigma = density_evolve(a, w)
            assert sigma.trace() == 1
            for i in range(len(w)):
                assert density_evolve(a, w[:i + 1] + w[i:]) == sigma


def test_branch_limit(a_ab):
    with pytest.raises(BranchOverflowError):
        accept_prob_branches(a_ab, "ab" * 6, limit=100)


def test_lqfa_agrees_with_source(a_ab):
    l = to_lqfa(a_ab)
    for w in oracles.words("ab", 4):
        assert lqfa_accept_prob(l, w) == accept_prob(a_ab, w)


def test_trivial_lqfa_depends_only_on_end_measurement():
    obs = {c: Observable.identity(2) for c in "ab"}
    p = Matrix.from_rows([[0, 0], [0, 1]])
    obs[END] = Observable(((0, Matrix.identity(2) - p), (1, p)))
    init = Matrix.vector([Fraction(3, 5), Fraction(4, 5)])
    unit = {c: Matrix.identity(2) for c in ("a", "b", END)}
    l = LQFA("ab", obs, init, {1}, unit)
    assert {lqfa_accept_prob(l, w) for w in oracles.words("ab", 3)} == {Fraction(16, 25)}


def test_random_lqfa_branch_cross_check():
    rng = random.Random(3)
    for _ in range(6):
        l = random_lqfa("ab", 2, rng)
        for w in oracles.words("ab", 3):
            assert lqfa_accept_prob(l, w) == lqfa_accept_prob_branches(l, w)


def test_classify(a_a):
    lam = Fraction(1, 8)
    assert classify(a_a, lam, "a")
    assert not classify(a_a, lam, "")
    assert not classify(build_basis_automaton("ab", "ab"), Fraction(1, 32), "ba")
    with pytest.raises(QfaError):
        classify(a_a, 0, "a")


def test_observable_validation():
    p = Matrix.from_rows([[1, 0], [0, 0]])
    with pytest.raises(QfaError):
        Observable(((0, p), (1, p)))  # not orthogonal, not complete
    with pytest.raises(QfaError):
        Observable(((0, p),))  # incomplete
    with pytest.raises(QfaError):
        Observable(((0, p), (0, Matrix.identity(2) - p)))  # duplicate labels
    with pytest.raises(QfaError):
        Observable(((0, Matrix.from_rows([[1, 1], [0, 0]])), (1, Matrix.from_rows([[0, -1], [0, 1]]))))


def test_initial_vector_must_be_unit(a_a):
    with pytest.raises(QfaError):
        MOnQFA("ab", a_a.observables, Matrix.vector([1, 1]), {1})


def test_json_round_trip(a_ab, tmp_path):
    text = a_ab.to_json()
    back = MOnQFA.from_json(text)
    assert back.to_json() == text
    for w in oracles.words("ab", 3):
        assert accept_prob(back, w) == accept_prob(a_ab, w)
    assert back.meta == a_ab.meta
