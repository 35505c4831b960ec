"""End-to-end acceptance suite; each test reports one PASS/FAIL summary line."""

import itertools
import math
import random
from fractions import Fraction
from functools import lru_cache

import pytest

import oracles
from corpus import CORPUS
from monqfa.builders import (amplify_automaton, binomial_tail, build_basis_automaton, complement_automaton,
                             direct_sum_automaton, hoeffding_bound, linear_representation, normalize_cutpoint,
                             tensor_automaton, to_lqfa)
from monqfa.decide import is_lmo, measured_isolation_ok, synthesize
from monqfa.dfa import INFINITE, basis_dfa, compile_regex, equivalent, minimize, variation_sup
from monqfa.invariants import check_dfa_corpus
from monqfa.linalg import is_projector, vec_norm2
from monqfa.logic import EasyFO, EasyLTL, compile_fo, compile_ltl, model_check_ltl, model_check_ltl_upto
from monqfa.qfa import accept_prob, accept_prob_branches, accept_probs_upto, lqfa_accept_prob
from monqfa.randomgen import random_minimal_dfas, random_monqfa

H = Fraction(1, 2)
SEQS = oracles.basis_sequences("abc", 3)


@lru_cache(maxsize=None)
def basis_table(seq, max_len=7):
    return accept_probs_upto(build_basis_automaton(seq, "abc"), max_len)


def _constructed():
    """A spread of automata produced by the builders, keyed by a readable name."""
    a, ab, ba = (build_basis_automaton(s, "ab") for s in ("a", "ab", "ba"))
    out = {f"A[{s}]": build_basis_automaton(s, "abc") for s in SEQS}
    out.update({
        "A[a] x A[ab]": tensor_automaton(a, ab),
        "not A[ab]": complement_automaton(ab),
        "1/3 A[a] + 2/3 A[ba]": direct_sum_automaton(Fraction(1, 3), a, ba),
        "normalized A[ab]": normalize_cutpoint(ab),
        "A[ab] twice": amplify_automaton(ab, 2, ab.meta.cutpoint),
    })
    return out


@pytest.mark.criterion(1, "basis automata separate L[s] from its complement (k <= 3, |w| <= 7, exact)")
def test_criterion_1_basis_automata():
    assert len(SEQS) == 21
    for seq in SEQS:
        k = len(seq)
        a = build_basis_automaton(seq, "abc")
        assert a.meta.cutpoint == Fraction(1, 2 ** (2 * k + 1))
        assert a.meta.isolation == Fraction(1, 2 ** (2 * (k + 1)))
        table = basis_table(seq)
        assert len(table) == sum(3 ** n for n in range(8))
        for w, p in table.items():
            assert isinstance(p, Fraction)
            if oracles.is_subsequence(seq, w):
                assert p >= Fraction(1, 2 ** (2 * k)), (seq, w, p)
            else:
                assert p == 0, (seq, w, p)


@pytest.mark.criterion(2, "density evolution equals branch enumeration (|w| <= 5, exact)")
def test_criterion_2_branches():
    for name, a in _constructed().items():
        for w in oracles.words(a.alphabet, 5):
            # the limit guards the worst case; zero branches are pruned while walking
            assert accept_prob(a, w) == accept_prob_branches(a, w, limit=10 ** 9), (name, w)
    rng = random.Random(2024)
    for i in range(100):
        a = random_monqfa("ab", 3, rng)
        for w in oracles.words("ab", 5):
            assert accept_prob(a, w) == accept_prob_branches(a, w), (i, w)


@pytest.mark.criterion(3, "direct sum is the convex combination of values (|w| <= 5, exact)")
@pytest.mark.parametrize("alpha", [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)])
def test_criterion_3_direct_sum(alpha):
    pairs = [("a", "ba"), ("ab", "b"), ("aba", "bab")]
    for s1, s2 in pairs:
        a, b = build_basis_automaton(s1, "ab"), build_basis_automaton(s2, "ab")
        s = direct_sum_automaton(alpha, a, b)
        pa, pb, ps = (accept_probs_upto(x, 5) for x in (a, b, s))
        assert s.exact
        for w in ps:
            assert ps[w] == alpha * pa[w] + (1 - alpha) * pb[w], (s1, s2, w)


@pytest.mark.criterion(4, "tensor multiplies values and complement gives 1 - value (|w| <= 5, exact)")
def test_criterion_4_tensor_and_complement():
    autos = [build_basis_automaton(s, "ab") for s in ("a", "ab", "bab")]
    rng = random.Random(4)
    autos += [random_monqfa("ab", 2, rng) for _ in range(3)]
    tables = [accept_probs_upto(a, 5) for a in autos]
    for (a, ta), (b, tb) in itertools.combinations(zip(autos, tables), 2):
        tt = accept_probs_upto(tensor_automaton(a, b), 5)
        assert all(tt[w] == ta[w] * tb[w] for w in tt)
    for a, ta in zip(autos, tables):
        tc = accept_probs_upto(complement_automaton(a), 5)
        assert all(tc[w] == 1 - ta[w] for w in tc)


@pytest.mark.criterion(5, "linear representation reproduces the acceptance probability")
def test_criterion_5_linear_representation():
    rng = random.Random(5)
    autos = [build_basis_automaton(s, "ab") for s in ("a", "ab", "aba")]
    autos += [random_monqfa("ab", 3, rng) for _ in range(5)]
    for a in autos:
        rep = linear_representation(a)
        assert vec_norm2(rep.xi) == 1
        assert all(is_projector(p, 0) for p in rep.letters.values())
        assert float(vec_norm2(rep.eta)) <= math.sqrt(a.dim) + 1e-12
        for w in oracles.words("ab", 5):
            assert rep.value(w) == accept_prob(a, w), w


@pytest.mark.criterion(6, "N-fold amplification equals the binomial tail and obeys the Hoeffding bound")
def test_criterion_6_amplification():
    rng = random.Random(6)
    sources = [build_basis_automaton("a", "ab"), build_basis_automaton("ab", "ab"), random_monqfa("ab", 2, rng)]
    for a in sources:
        lam = a.meta.cutpoint if a.meta is not None else H
        base = accept_probs_upto(a, 4)
        for n in (1, 2, 3):
            amp = accept_probs_upto(amplify_automaton(a, n, lam), 4)
            for w, p in base.items():
                assert amp[w] == oracles.binomial_tail(p, n, lam), (n, w)
    # below the cut-point by delta, the amplified value is exponentially small
    for lam, delta in [(H, Fraction(1, 4)), (Fraction(1, 8), Fraction(1, 16)), (Fraction(2, 3), Fraction(1, 6))]:
        for n in range(1, 41):
            bound = hoeffding_bound(delta, n)
            for i in range(21):
                p = (lam - delta) * Fraction(i, 20)
                assert float(binomial_tail(p, n, lam)) <= bound + 1e-12, (lam, delta, n, p)


@pytest.mark.criterion(7, "normalize_cutpoint keeps every classification and the promised isolation")
def test_criterion_7_normalize():
    sources = [build_basis_automaton(s, "ab") for s in ("a", "ab", "aba", "bab")]
    sources.append(complement_automaton(build_basis_automaton("ab", "ab")))
    for a in sources:
        lam, delta = a.meta.cutpoint, a.meta.isolation
        n = normalize_cutpoint(a)
        promised = delta / (2 * max(lam, 1 - lam))
        assert n.meta.cutpoint == H and n.meta.isolation == promised
        before, after = accept_probs_upto(a, 6), accept_probs_upto(n, 6)
        assert all((before[w] > lam) == (after[w] > H) for w in before)
        measured = min(abs(p - H) for p in after.values())
        assert float(measured) >= float(promised) - 1e-12


@pytest.mark.criterion(8, "the Latvian reading of an automaton gives identical probabilities (|w| <= 6)")
def test_criterion_8_lqfa():
    rng = random.Random(8)
    ab = build_basis_automaton("ab", "ab")
    sources = [build_basis_automaton("a", "ab"), ab, build_basis_automaton("bab", "ab"),
               normalize_cutpoint(ab), random_monqfa("ab", 3, rng)]
    for a in sources:
        lq = to_lqfa(a)
        for w in oracles.words("ab", 6):
            assert lqfa_accept_prob(lq, w) == accept_prob(a, w), w


@pytest.mark.criterion(9, "four-way characterization and the block-group implication on 500 random DFAs")
def test_criterion_9_random_dfas():
    dfas = random_minimal_dfas(500, seed=9)
    assert len(dfas) == 500
    assert all(d.n <= 6 and len(d.alphabet) <= 3 for d in dfas)
    failures = [r for r in check_dfa_corpus(dfas) if not r.ok]
    assert not failures, [(r.name, r.failures[:3]) for r in failures]


@pytest.mark.criterion(10, "variation of each basis language stays below m / delta^2")
def test_criterion_10_variation():
    for seq in SEQS:
        a = build_basis_automaton(seq, "abc")
        d = basis_dfa(seq, "abc")
        lam = a.meta.cutpoint
        # the DFA really is the language the automaton recognizes
        assert all(d.accepts(w) == (p > lam) for w, p in basis_table(seq).items())
        var = variation_sup(minimize(d))
        assert var != INFINITE
        assert var <= a.dim / a.meta.isolation ** 2


@pytest.mark.criterion(11, "corpus verdicts match and every member synthesizes faithfully (|w| <= 8)")
@pytest.mark.parametrize("name,make,expected", CORPUS, ids=[c[0] for c in CORPUS])
def test_criterion_11_corpus(name, make, expected):
    assert len(CORPUS) >= 30
    d = minimize(make())
    assert is_lmo(d).member == expected
    if expected:
        res = synthesize(d, check_len=8)
        assert res.agrees, res.mismatches[:5]
        assert measured_isolation_ok(res)


def _letter_sets(alphabet):
    return [frozenset(c) for r in range(1, len(alphabet) + 1) for c in itertools.combinations(alphabet, r)]


@pytest.mark.criterion(12, "easy FO and LTL leaves compile to the right languages; model checking agrees")
@pytest.mark.parametrize("alphabet", ["a", "ab", "abc"])
def test_criterion_12_logic(alphabet):
    for seq in oracles.basis_sequences(alphabet, 3):
        assert equivalent(compile_fo(EasyFO(seq), alphabet), basis_dfa(seq, alphabet)), seq
    for k in range(1, 4):
        for combo in itertools.product(_letter_sets(alphabet), repeat=k):
            leaf = EasyLTL(combo)
            d = compile_ltl(leaf, alphabet)
            pattern = "".join("(" + "|".join(sorted(g)) + ")*" for g in combo)
            assert equivalent(d, compile_regex(pattern, alphabet)), pattern
            checked = model_check_ltl_upto(leaf, alphabet, 8)
            assert len(checked) == sum(len(alphabet) ** n for n in range(9))
            assert all(d.accepts(w) == v for w, v in checked.items()), pattern
            # the per-word entry point agrees with the batched one
            for w in ("", alphabet, alphabet[::-1] * 2):
                assert model_check_ltl(leaf, w) == checked[w]
