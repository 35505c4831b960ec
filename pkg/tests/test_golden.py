"""Values computed once with the plain-Fraction oracles and frozen here."""

from fractions import Fraction as F

import pytest

import oracles
from monqfa.builders import binomial_tail, build_basis_automaton
from monqfa.qfa import accept_prob

WORDS = ["", "a", "ab", "ba", "aba", "abab", "abba", "bab", "abca", "cab", "acbca"]

GOLDEN = {
    "a": {w: (F(0) if w == "" else F(1, 2)) for w in WORDS},
    "ab": {"": F(0), "a": F(0), "ab": F(1, 4), "ba": F(0), "aba": F(1, 4), "abab": F(5, 16),
           "abba": F(1, 4), "bab": F(1, 4), "abca": F(1, 4), "cab": F(1, 4), "acbca": F(1, 4)},
    "aba": {w: (F(1, 8) if w in {"aba", "abab", "abba", "abca", "acbca"} else F(0)) for w in WORDS},
    "abc": {w: (F(1, 8) if w in {"abca", "acbca"} else F(0)) for w in WORDS},
    "bab": {w: (F(1, 8) if w in {"abab", "bab"} else F(0)) for w in WORDS},
}


@pytest.mark.parametrize("seq", sorted(GOLDEN))
def test_basis_probabilities(seq):
    a = build_basis_automaton(seq, "abc")
    for w, want in GOLDEN[seq].items():
        assert accept_prob(a, w) == want, w
        assert oracles.basis_prob(seq, w) == want, w


@pytest.mark.parametrize("p,n,lam,want", [(F(1, 2), 2, F(1, 2), F(3, 4)), (F(1, 4), 3, F(1, 2), F(5, 32)),
                                          (F(1, 8), 3, F(1, 8), F(169, 512))])
def test_binomial_tails(p, n, lam, want):
    assert binomial_tail(p, n, lam) == want
    assert oracles.binomial_tail(p, n, lam) == want
