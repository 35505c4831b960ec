"""Deciding membership in the measure-only class and synthesizing recognizers.

A regular language is recognized with isolated cut-point by some measure-only
automaton exactly when its syntactic monoid is J-trivial and every letter acts
idempotently. :func:`is_lmo` checks both conditions on the minimal DFA and
explains failures with concrete words. For members, :func:`decompose_liidpt`
rewrites the language as a boolean combination of basis languages and
:func:`synthesize` turns that combination into an event over basis automata.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable

from .builders import (Event, FComplement, Hadamard, amplify, basis_event, check_basis_seq,
                       constant_event, copies_for_error)
from .dfa import (Dfa, basis_dfa, bool_op, complement, counterexample, distinguishing_word,
                  empty_dfa, full_dfa, minimize, profile_automaton, reduced_sequences, scc_trivial)
from .monoid import (DEFAULT_MONOID_LIMIT, JCertificate, green_trivial, j_certificate,
                     literal_idempotency_witness, transition_monoid)

DEFAULT_K_MAX = 6
DEFAULT_CHECK_LEN = 8
STRATEGIES = ("monoid", "graph")


class DecideError(ValueError):
    """Precondition failure or search bound exceeded."""


# -- verdicts ----------------------------------------------------------------------

@dataclass(frozen=True)
class LmoVerdict:
    member: bool
    literally_idempotent: bool
    j_trivial: bool
    idempotency_witness: tuple[int, str] | None = None
    word_pair: tuple[str, str, bool, bool] | None = None
    j_witness: JCertificate | None = None
    states: int = 0

    def to_dict(self) -> dict:
        out = {
            "member": self.member,
            "literally_idempotent": self.literally_idempotent,
            "j_trivial": self.j_trivial,
            "minimal_states": self.states,
            "witnesses": {},
        }
        if self.idempotency_witness is not None:
            q, c = self.idempotency_witness
            long_w, short_w, in_long, in_short = self.word_pair
            out["witnesses"]["literal_idempotency"] = {
                "state": q, "letter": c,
                "words": {long_w: in_long, short_w: in_short},
            }
        if self.j_witness is not None:
            out["witnesses"]["j_class"] = self.j_witness.to_dict()
        return out


def _word_pair(d: Dfa, q: int, c: str) -> tuple[str, str, bool, bool]:
    """Words ``x c c y`` and ``x c y`` that the language separates."""
    x = d.access_words()[q]
    once = d.step(q, c)
    twice = d.step(once, c)
    y = distinguishing_word(d, twice, once)
    if y is None:
        raise DecideError("automaton is not minimal: witness states are equivalent")
    long_w, short_w = x + c + c + y, x + c + y
    return long_w, short_w, d.accepts(long_w), d.accepts(short_w)


def is_lmo(d: Dfa, strategy: str = "monoid", limit: int = DEFAULT_MONOID_LIMIT) -> LmoVerdict:
    """Literal idempotency plus piecewise testability on the minimal DFA."""
    m = minimize(d)
    wit = literal_idempotency_witness(m)
    pair = _word_pair(m, *wit) if wit else None
    cert = None
    if strategy == "monoid":
        mon = transition_monoid(m, limit)
        cert = j_certificate(mon)
        jt = cert is None
    else:
        jt = is_piecewise_testable(m, strategy)
    return LmoVerdict(wit is None and jt, wit is None, jt, wit, pair, cert, m.n)


def is_piecewise_testable(d: Dfa, strategy: str = "monoid", limit: int = DEFAULT_MONOID_LIMIT) -> bool:
    """J-triviality of the syntactic monoid, or an equivalent check on the graph.

    The graph strategy asks that the minimal DFA be acyclic apart from
    self-loops and locally confluent: from every state ``q`` and letters
    ``a, b`` some ``w`` over ``{a, b}`` gives ``q.a.w = q.b.w``.
    """
    if strategy not in STRATEGIES:
        raise DecideError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    m = minimize(d)
    if strategy == "monoid":
        return green_trivial(transition_monoid(m, limit), "J")
    if not scc_trivial(m):
        return False
    for q in m.reachable():
        for i in range(len(m.alphabet)):
            for j in range(i + 1, len(m.alphabet)):
                if not _confluent(m, m.trans[q][i], m.trans[q][j], (i, j)):
                    return False
    return True


def _confluent(d: Dfa, p: int, q: int, letters: tuple[int, int]) -> bool:
    seen = {(p, q)}
    stack = [(p, q)]
    while stack:
        x, y = stack.pop()
        if x == y:
            return True
        for i in letters:
            nxt = (d.trans[x][i], d.trans[y][i])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return False


# -- boolean expressions over basis languages ----------------------------------

class BasisBoolExpr:
    def to_dfa(self, alphabet: Iterable[str]) -> Dfa:
        raise NotImplementedError

    def leaves(self) -> list[str]:
        raise NotImplementedError

    def to_text(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.to_text()


@dataclass(frozen=True)
class BConst(BasisBoolExpr):
    value: bool

    def to_dfa(self, alphabet):
        return full_dfa(alphabet) if self.value else empty_dfa(alphabet)

    def leaves(self):
        return []

    def to_text(self):
        return "1" if self.value else "0"


@dataclass(frozen=True)
class BLeaf(BasisBoolExpr):
    seq: str

    def __post_init__(self):
        check_basis_seq(self.seq)

    def to_dfa(self, alphabet):
        return basis_dfa(self.seq, alphabet)

    def leaves(self):
        return [self.seq]

    def to_text(self):
        return f"L[{self.seq}]"


@dataclass(frozen=True)
class BNot(BasisBoolExpr):
    inner: BasisBoolExpr

    def to_dfa(self, alphabet):
        return complement(self.inner.to_dfa(alphabet))

    def leaves(self):
        return self.inner.leaves()

    def to_text(self):
        inner = self.inner.to_text()
        return f"!({inner})" if isinstance(self.inner, (BAnd, BOr)) else "!" + inner


@dataclass(frozen=True)
class BAnd(BasisBoolExpr):
    items: tuple[BasisBoolExpr, ...]

    def to_dfa(self, alphabet):
        return reduce(lambda x, y: minimize(bool_op(x, y, "and")),
                      (e.to_dfa(alphabet) for e in self.items))

    def leaves(self):
        return [s for e in self.items for s in e.leaves()]

    def to_text(self):
        return " & ".join(_paren(e) for e in self.items)


@dataclass(frozen=True)
class BOr(BasisBoolExpr):
    items: tuple[BasisBoolExpr, ...]

    def to_dfa(self, alphabet):
        return reduce(lambda x, y: minimize(bool_op(x, y, "or")),
                      (e.to_dfa(alphabet) for e in self.items))

    def leaves(self):
        return [s for e in self.items for s in e.leaves()]

    def to_text(self):
        return " | ".join(_paren(e) for e in self.items)


def _paren(e: BasisBoolExpr) -> str:
    return f"({e.to_text()})" if isinstance(e, (BAnd, BOr)) and len(e.items) > 1 else e.to_text()


def _conj(items: list[BasisBoolExpr]) -> BasisBoolExpr:
    if not items:
        return BConst(True)
    return items[0] if len(items) == 1 else BAnd(tuple(items))


def _disj(items: list[BasisBoolExpr]) -> BasisBoolExpr:
    if not items:
        return BConst(False)
    return items[0] if len(items) == 1 else BOr(tuple(items))


# -- decomposition ----------------------------------------------------------------

def _subword(s: str, t: str) -> bool:
    it = iter(t)
    return all(c in it for c in s)


@dataclass(frozen=True)
class Decomposition:
    k: int
    expr: BasisBoolExpr
    accepting_profiles: int
    rejecting_profiles: int


def _profile_verdicts(d: Dfa, k: int, limit: int) -> dict[frozenset, bool] | None:
    """Acceptance per reachable profile, or None if some profile is ambiguous."""
    pa = profile_automaton(d.alphabet, k, limit)
    verdict: dict[frozenset, bool] = {}
    start = (d.initial, pa.initial)
    seen = {start}
    stack = [start]
    while stack:
        q, p = stack.pop()
        acc = q in d.finals
        prof = pa.states[p]
        if verdict.setdefault(prof, acc) != acc:
            return None
        for i in range(len(d.alphabet)):
            nxt = (d.trans[q][i], pa.trans[p][i])
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return verdict


def _profile_term(profile: frozenset, universe: list[str]) -> BasisBoolExpr:
    members = [s for s in universe if s in profile]
    others = [s for s in universe if s not in profile]
    maximal = [s for s in members if not any(t != s and _subword(s, t) for t in members)]
    minimal = [s for s in others if not any(t != s and _subword(t, s) for t in others)]
    return _conj([BLeaf(s) for s in maximal] + [BNot(BLeaf(s)) for s in minimal])


def _relevant(table: dict[frozenset, bool], universe: list[str]) -> frozenset:
    """Greedily drop sequences whose presence never matters, longest first."""
    keep = set(universe)
    for s in sorted(universe, key=lambda s: (-len(s), s)):
        trial = frozenset(keep - {s})
        seen: dict[frozenset, bool] = {}
        if all(seen.setdefault(p & trial, v) == v for p, v in table.items()):
            keep.discard(s)
    return frozenset(keep)


def decompose_liidpt(d: Dfa, k_max: int = DEFAULT_K_MAX, limit: int = 100_000,
                     check: bool = True, require_member: bool = True) -> Decomposition:
    """Boolean combination of basis languages equal to ``L(d)``.

    Searches the least ``k`` such that the set of adjacent-distinct subwords of
    length at most ``k`` determines membership, then writes the language as a
    union of exact profile descriptions (or the complement of one).
    With ``require_member=False`` the membership test is skipped and the
    search itself fails on languages outside the class.
    """
    if require_member and not is_lmo(d).member:
        raise DecideError("language is not literally idempotent piecewise testable")
    m = minimize(d)
    for k in range(k_max + 1):
        table = _profile_verdicts(m, k, limit)
        if table is not None:
            break
    else:
        raise DecideError(f"no profile length up to {k_max} determines the language")
    universe = _relevant(table, reduced_sequences(m.alphabet, k))
    restricted: dict[frozenset, bool] = {p & universe: v for p, v in table.items()}
    acc = sorted((p for p, v in restricted.items() if v), key=sorted)
    rej = sorted((p for p, v in restricted.items() if not v), key=sorted)
    order = sorted(universe, key=lambda s: (len(s), s))
    if not rej:
        expr: BasisBoolExpr = BConst(True)
    elif not acc:
        expr = BConst(False)
    elif len(acc) <= len(rej):
        expr = _disj([_profile_term(p, order) for p in acc])
    else:
        expr = BNot(_disj([_profile_term(p, order) for p in rej]))
    if check:
        bad = counterexample(minimize(expr.to_dfa(m.alphabet)), m)
        if bad is not None:
            raise DecideError(f"decomposition disagrees with the automaton on {bad!r}")
    return Decomposition(k, expr, len(acc), len(rej))


# -- synthesis -----------------------------------------------------------------------

@dataclass
class SynthesisResult:
    decomposition: Decomposition
    event: Event
    leaves: int
    atom_error: Fraction | None
    copies: dict[str, int]
    declared_cutpoint: Fraction
    declared_isolation: object
    measured_isolation: object
    check_len: int
    mismatches: list[str]

    @property
    def agrees(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "profile_K": self.decomposition.k,
            "expression": self.decomposition.expr.to_text(),
            "leaves": self.leaves,
            "atom_error": None if self.atom_error is None else str(self.atom_error),
            "copies": self.copies,
            "declared_cutpoint": str(self.declared_cutpoint),
            "declared_isolation": _num(self.declared_isolation),
            "measured_isolation": float(self.measured_isolation),
            "check_len": self.check_len,
            "agrees": self.agrees,
            "mismatches": self.mismatches[:20],
        }


def _num(x):
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def event_for(expr: BasisBoolExpr, alphabet, atoms: dict[str, Event]) -> Event:
    """Translate an expression using products, complements and De Morgan."""
    if isinstance(expr, BConst):
        return constant_event(alphabet, int(expr.value))
    if isinstance(expr, BLeaf):
        return atoms[expr.seq]
    if isinstance(expr, BNot):
        return FComplement(event_for(expr.inner, alphabet, atoms))
    parts = [event_for(e, alphabet, atoms) for e in expr.items]
    if isinstance(expr, BAnd):
        return reduce(Hadamard, parts)
    return FComplement(reduce(Hadamard, [FComplement(p) for p in parts]))


def synthesize(d: Dfa, check_len: int = DEFAULT_CHECK_LEN, k_max: int = DEFAULT_K_MAX) -> SynthesisResult:
    """Event with cut-point 1/2 recognizing ``L(d)``, checked on short words.

    Every basis leaf is amplified until it is within ``1/(4T)`` of its
    characteristic function, ``T`` being the number of leaves, so the whole
    combination stays within ``1/4`` of the target.
    """
    dec = decompose_liidpt(d, k_max)
    m = minimize(d)
    alphabet = m.alphabet
    leaves = dec.expr.leaves()
    eps = Fraction(1, 4 * len(leaves)) if leaves else None
    atoms: dict[str, Event] = {}
    copies: dict[str, int] = {}
    for seq in dict.fromkeys(leaves):
        base = basis_event(seq, alphabet)
        n = copies_for_error(base.meta.isolation, eps)
        copies[seq] = n
        atoms[seq] = amplify(base, n, base.meta.cutpoint)
    event = event_for(dec.expr, alphabet, atoms)
    meta = event.meta
    if meta is None:
        raise DecideError("error budget exhausted: no isolation can be declared")
    values = event.values_upto(check_len)
    mismatches = []
    gap = None
    for w, v in values.items():
        if (v > meta.cutpoint) != m.accepts(w):
            mismatches.append(w)
        dist = abs(v - meta.cutpoint)
        gap = dist if gap is None or dist < gap else gap
    return SynthesisResult(dec, event, len(leaves), eps, copies, meta.cutpoint, meta.isolation,
                           gap, check_len, mismatches)


def measured_isolation_ok(result: SynthesisResult, slack: float = 1e-12) -> bool:
    return float(result.measured_isolation) + slack >= float(result.declared_isolation)


__all__ = [
    "LmoVerdict", "is_lmo", "is_piecewise_testable", "BasisBoolExpr", "BConst", "BLeaf", "BNot",
    "BAnd", "BOr", "Decomposition", "decompose_liidpt", "SynthesisResult", "synthesize",
    "event_for", "measured_isolation_ok", "DecideError",
]
