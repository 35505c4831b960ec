"""Randomized property corpus behind ``monqfa check-invariants``."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .decide import is_piecewise_testable
from .dfa import (INFINITE, Dfa, equivalent, isomorphic, minimize, profile_automaton, scc_trivial,
                  topo_order_exists, variation_sup)
from .monoid import green_trivial, is_block_group, is_literally_idempotent, transition_monoid
from .qfa import accept_prob, accept_prob_branches, density_evolve
from .randomgen import random_dfa, random_monqfa


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, msg: str):
        if len(self.failures) < 5:
            self.failures.append(msg)
        else:
            self.failures.append("...")
            del self.failures[5:-1]


def max_variation_upto(d: Dfa, max_len: int) -> int:
    """Largest number of state changes over words of length <= ``max_len``.

    Dynamic programming over (length, state); independent of the SCC analysis.
    """
    best = {d.initial: 0}
    top = 0
    for _ in range(max_len):
        nxt: dict[int, int] = {}
        for q, v in best.items():
            for t in d.trans[q]:
                val = v + (t != q)
                if nxt.get(t, -1) < val:
                    nxt[t] = val
        best = nxt
        top = max(top, max(best.values()))
    return top


def finite_variation_by_words(d: Dfa) -> int | str:
    """Variation supremum from runs alone: a reachable cycle shows up within 2n letters."""
    n = d.n
    top = max_variation_upto(d, 2 * n)
    return INFINITE if top >= n else top


def check_dfa_corpus(dfas: list[Dfa]) -> list[CheckResult]:
    four = CheckResult("finite variation <=> trivial SCCs <=> compatible order <=> R-trivial")
    block = CheckResult("R-trivial block-group => J-trivial")
    jtriv = CheckResult("J-trivial => R-trivial and L-trivial")
    graph = CheckResult("graph PT check agrees with monoid J-triviality")
    idem = CheckResult("literal idempotency <=> idempotent generator images")
    mini = CheckResult("minimize preserves language and is idempotent")
    for d in dfas:
        m = minimize(d)
        mon = transition_monoid(m)
        r = green_trivial(mon, "R")
        var = variation_sup(m)
        oracle_var = finite_variation_by_words(m)
        flags = (var != INFINITE, scc_trivial(m), topo_order_exists(m), r)
        four.checked += 1
        if len(set(flags)) != 1 or var != oracle_var:
            four.fail(f"{m.to_dict()}: {flags} var={var} oracle={oracle_var}")
        block.checked += 1
        jt = green_trivial(mon, "J")
        if is_block_group(mon) and r and not jt:
            block.fail(str(m.to_dict()))
        jtriv.checked += 1
        if jt and not (r and green_trivial(mon, "L")):
            jtriv.fail(str(m.to_dict()))
        graph.checked += 1
        if is_piecewise_testable(m, "graph") != jt:
            graph.fail(str(m.to_dict()))
        idem.checked += 1
        gens_idem = all(mon.mul(g, g) == g for g in mon.gens)
        if is_literally_idempotent(m) != gens_idem:
            idem.fail(str(m.to_dict()))
        mini.checked += 1
        if not equivalent(d, m) or not isomorphic(minimize(m), m):
            mini.fail(str(d.to_dict()))
    return [four, block, jtriv, graph, idem, mini]


def check_qfa_corpus(rng: random.Random, samples: int, max_len: int = 4) -> list[CheckResult]:
    branches = CheckResult("density evolution equals branch enumeration")
    idem = CheckResult("reading a letter twice equals reading it once")
    trace = CheckResult("density matrices keep unit trace")
    words = ["".join(t) for n in range(max_len + 1) for t in itertools.product("ab", repeat=n)]
    for _ in range(samples):
        a = random_monqfa("ab", rng.randint(1, 3), rng)
        for w in rng.sample(words, min(6, len(words))):
            branches.checked += 1
            if accept_prob(a, w) != accept_prob_branches(a, w):
                branches.fail(f"word {w!r}")
            sigma = density_evolve(a, w)
            trace.checked += 1
            if sigma.trace() != 1:
                trace.fail(f"word {w!r}: trace {sigma.trace()}")
            if w:
                i = rng.randrange(len(w))
                idem.checked += 1
                if density_evolve(a, w[:i + 1] + w[i:]) != sigma:
                    idem.fail(f"word {w!r} doubled at {i}")
    return [branches, idem, trace]


def check_profiles(max_len: int = 6) -> CheckResult:
    res = CheckResult("profiles ignore repeated adjacent letters")
    pa = profile_automaton("ab", 3)
    for n in range(max_len + 1):
        for t in itertools.product("ab", repeat=n):
            w = "".join(t)
            contracted = "".join(c for i, c in enumerate(w) if i == 0 or w[i - 1] != c)
            res.checked += 1
            if pa.profile(w) != pa.profile(contracted):
                res.fail(w)
    return res


def run_invariants(seed: int = 0, samples: int = 200) -> list[CheckResult]:
    rng = random.Random(seed)
    dfas = [random_dfa(rng) for _ in range(samples)]
    results = check_dfa_corpus(dfas)
    results += check_qfa_corpus(rng, max(1, samples // 10))
    results.append(check_profiles())
    return results
