"""Classical deterministic automata: minimization, boolean algebra, structure.

States are dense integers ``0..n-1``; the transition table is total. Partial
inputs are completed with a rejecting sink when they are read in.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .graphs import strongly_connected_components

INFINITE = "infinite"
DEFAULT_PROFILE_LIMIT = 100_000


class DfaError(ValueError):
    """Malformed automaton, alphabet mismatch, or unsupported regex."""


class Dfa:
    """Complete deterministic automaton over a sorted tuple of letters."""

    __slots__ = ("alphabet", "trans", "initial", "finals", "_index")

    def __init__(self, alphabet: Iterable[str], trans: Sequence[Sequence[int]], initial: int,
                 finals: Iterable[int]):
        self.alphabet = tuple(alphabet)
        if list(self.alphabet) != sorted(set(self.alphabet)):
            raise DfaError("alphabet must be given as sorted distinct letters")
        self.trans = tuple(tuple(row) for row in trans)
        self.initial = initial
        self.finals = frozenset(finals)
        self._index = {c: i for i, c in enumerate(self.alphabet)}
        n = len(self.trans)
        if n == 0:
            raise DfaError("a DFA needs at least one state")
        if not 0 <= initial < n:
            raise DfaError(f"initial state {initial} out of range")
        if not all(0 <= q < n for q in self.finals):
            raise DfaError("final states out of range")
        for row in self.trans:
            if len(row) != len(self.alphabet) or not all(0 <= t < n for t in row):
                raise DfaError("transition table must be total over the alphabet")

    @classmethod
    def from_transitions(cls, alphabet: Iterable[str], states: int,
                         transitions: Iterable[tuple[int, str, int]], initial: int,
                         finals: Iterable[int]) -> "Dfa":
        """Build from ``[state, letter, state]`` triples, adding a sink if partial."""
        alphabet = tuple(sorted(set(alphabet)))
        index = {c: i for i, c in enumerate(alphabet)}
        table: list[list[int | None]] = [[None] * len(alphabet) for _ in range(states)]
        for p, c, q in transitions:
            if c not in index:
                raise DfaError(f"letter {c!r} not in the alphabet")
            if not (0 <= p < states and 0 <= q < states):
                raise DfaError(f"transition ({p}, {c}, {q}) uses an unknown state")
            if table[p][index[c]] not in (None, q):
                raise DfaError(f"nondeterministic transitions from {p} on {c!r}")
            table[p][index[c]] = q
        if any(t is None for row in table for t in row):
            sink = states
            table = [[sink if t is None else t for t in row] for row in table]
            table.append([sink] * len(alphabet))
        return cls(alphabet, table, initial, finals)

    # -- basic queries ------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.trans)

    def step(self, q: int, c: str) -> int:
        try:
            return self.trans[q][self._index[c]]
        except KeyError:
            raise DfaError(f"letter {c!r} not in the alphabet") from None

    def run(self, w: str, q: int | None = None) -> int:
        q = self.initial if q is None else q
        for c in w:
            q = self.step(q, c)
        return q

    def accepts(self, w: str) -> bool:
        return self.run(w) in self.finals

    def successors(self, q: int) -> tuple[int, ...]:
        return self.trans[q]

    def reachable(self) -> list[int]:
        """Reachable states in BFS order (letters in alphabet order)."""
        seen = {self.initial}
        order = [self.initial]
        queue = deque(order)
        while queue:
            q = queue.popleft()
            for t in self.trans[q]:
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
        return order

    def access_words(self) -> dict[int, str]:
        """Shortest (then lexicographically least) word reaching each state."""
        words = {self.initial: ""}
        queue = deque([self.initial])
        while queue:
            q = queue.popleft()
            for c, t in zip(self.alphabet, self.trans[q]):
                if t not in words:
                    words[t] = words[q] + c
                    queue.append(t)
        return words

    def __eq__(self, other):
        if not isinstance(other, Dfa):
            return NotImplemented
        return (self.alphabet, self.trans, self.initial, self.finals) == \
            (other.alphabet, other.trans, other.initial, other.finals)

    def __hash__(self):
        return hash((self.alphabet, self.trans, self.initial, self.finals))

    def __repr__(self):
        return f"Dfa(alphabet={''.join(self.alphabet)!r}, states={self.n}, finals={sorted(self.finals)})"

    # -- interchange --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "alphabet": list(self.alphabet),
            "states": self.n,
            "transitions": [[q, c, t] for q in range(self.n) for c, t in zip(self.alphabet, self.trans[q])],
            "initial": self.initial,
            "finals": sorted(self.finals),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Dfa":
        try:
            return cls.from_transitions(doc["alphabet"], doc["states"],
                                        [tuple(t) for t in doc["transitions"]],
                                        doc["initial"], doc["finals"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DfaError):
                raise
            raise DfaError(f"malformed DFA document: {exc}") from exc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Dfa":
        return cls.from_dict(json.loads(text))


# -- minimization and canonical form ------------------------------------------

def _renumber(d: Dfa, order: Sequence[int], classes: Mapping[int, int] | None = None) -> Dfa:
    """Relabel states by their position in ``order`` (after merging ``classes``)."""
    cls = classes or {q: q for q in order}
    reps = []
    seen = set()
    for q in order:
        if cls[q] not in seen:
            seen.add(cls[q])
            reps.append(q)
    num = {cls[q]: i for i, q in enumerate(reps)}
    trans = [[num[cls[t]] for t in d.trans[q]] for q in reps]
    finals = {num[cls[q]] for q in reps if q in d.finals}
    return Dfa(d.alphabet, trans, num[cls[d.initial]], finals)


def _bfs_canonical(d: Dfa) -> Dfa:
    return _renumber(d, d.reachable())


def minimize(d: Dfa) -> Dfa:
    """Minimal equivalent DFA, unreachable states removed, states in BFS order."""
    d = _bfs_canonical(d)
    part = [1 if q in d.finals else 0 for q in range(d.n)]
    nblocks = len(set(part))
    while True:
        sigs = {}
        new = []
        for q in range(d.n):
            sig = (part[q], tuple(part[t] for t in d.trans[q]))
            new.append(sigs.setdefault(sig, len(sigs)))
        if len(sigs) == nblocks:
            break
        part, nblocks = new, len(sigs)
    return _renumber(d, d.reachable(), dict(enumerate(part)))


def isomorphic(d1: Dfa, d2: Dfa) -> bool:
    return _bfs_canonical(d1) == _bfs_canonical(d2)


# -- boolean algebra -----------------------------------------------------------

def _check_same_alphabet(d1: Dfa, d2: Dfa):
    if d1.alphabet != d2.alphabet:
        raise DfaError(f"alphabet mismatch: {''.join(d1.alphabet)} vs {''.join(d2.alphabet)}")


_OPS = {
    "and": lambda x, y: x and y,
    "or": lambda x, y: x or y,
    "minus": lambda x, y: x and not y,
    "xor": lambda x, y: x != y,
}


def bool_op(d1: Dfa, d2: Dfa, op: str) -> Dfa:
    """Product automaton for ``and``, ``or``, ``minus`` or ``xor``."""
    _check_same_alphabet(d1, d2)
    try:
        f = _OPS[op]
    except KeyError:
        raise DfaError(f"unknown boolean operation {op!r}") from None
    start = (d1.initial, d2.initial)
    index = {start: 0}
    pairs = [start]
    trans = []
    i = 0
    while i < len(pairs):
        p, q = pairs[i]
        row = []
        for t1, t2 in zip(d1.trans[p], d2.trans[q]):
            key = (t1, t2)
            if key not in index:
                index[key] = len(pairs)
                pairs.append(key)
            row.append(index[key])
        trans.append(row)
        i += 1
    finals = {j for j, (p, q) in enumerate(pairs) if f(p in d1.finals, q in d2.finals)}
    return Dfa(d1.alphabet, trans, 0, finals)


def intersect(d1: Dfa, d2: Dfa) -> Dfa:
    return bool_op(d1, d2, "and")


def union(d1: Dfa, d2: Dfa) -> Dfa:
    return bool_op(d1, d2, "or")


def difference(d1: Dfa, d2: Dfa) -> Dfa:
    return bool_op(d1, d2, "minus")


def complement(d: Dfa) -> Dfa:
    return Dfa(d.alphabet, d.trans, d.initial, set(range(d.n)) - d.finals)


def shortest_accepted(d: Dfa) -> str | None:
    words = d.access_words()
    hits = [w for q, w in words.items() if q in d.finals]
    return min(hits, key=lambda w: (len(w), w)) if hits else None


def is_empty(d: Dfa) -> bool:
    return shortest_accepted(d) is None


def equivalent(d1: Dfa, d2: Dfa) -> bool:
    return is_empty(bool_op(d1, d2, "xor"))


def counterexample(d1: Dfa, d2: Dfa) -> str | None:
    """Shortest word on which the two automata disagree."""
    return shortest_accepted(bool_op(d1, d2, "xor"))


def full_dfa(alphabet: Iterable[str]) -> Dfa:
    alphabet = tuple(sorted(set(alphabet)))
    return Dfa(alphabet, [[0] * len(alphabet)], 0, {0})


def empty_dfa(alphabet: Iterable[str]) -> Dfa:
    alphabet = tuple(sorted(set(alphabet)))
    return Dfa(alphabet, [[0] * len(alphabet)], 0, set())


def distinguishing_word(d: Dfa, p: int, q: int) -> str | None:
    """Shortest suffix accepted from exactly one of ``p`` and ``q``."""
    start = (p, q)
    seen = {start: ""}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        w = seen[(x, y)]
        if (x in d.finals) != (y in d.finals):
            return w
        for c, tx, ty in zip(d.alphabet, d.trans[x], d.trans[y]):
            if (tx, ty) not in seen:
                seen[(tx, ty)] = w + c
                queue.append((tx, ty))
    return None


# -- basis languages -------------------------------------------------------------

def basis_dfa(seq: str, alphabet: Iterable[str]) -> Dfa:
    """Chain automaton for words containing ``seq`` as a scattered subword."""
    from .builders import check_basis_seq

    check_basis_seq(seq)
    alphabet = tuple(sorted(set(alphabet)))
    stray = set(seq) - set(alphabet)
    if stray:
        raise DfaError(f"letters {sorted(stray)} of {seq!r} are not in the alphabet")
    k = len(seq)
    trans = []
    for i in range(k + 1):
        trans.append([i + 1 if i < k and c == seq[i] else i for c in alphabet])
    return Dfa(alphabet, trans, 0, {k})


# -- structure: SCCs, orderings, variation -------------------------------------------

def _loop_free_successors(d: Dfa) -> list[list[int]]:
    return [sorted({t for t in d.trans[q] if t != q}) for q in range(d.n)]


def scc_trivial(d: Dfa) -> bool:
    """Every strongly connected component is a single state (self-loops allowed)."""
    comp = strongly_connected_components(_loop_free_successors(d))
    return len(set(comp)) == d.n


def compatible_order(d: Dfa) -> list[int] | None:
    """A total order of the reachable states with ``q.a >= q``, if one exists.

    Kahn's algorithm on the transition graph with self-loops removed.
    """
    states = d.reachable()
    succ = {q: {t for t in d.trans[q] if t != q} for q in states}
    indeg = {q: 0 for q in states}
    for q in states:
        for t in succ[q]:
            indeg[t] += 1
    ready = deque(q for q in states if indeg[q] == 0)
    order = []
    while ready:
        q = ready.popleft()
        order.append(q)
        for t in sorted(succ[q]):
            indeg[t] -= 1
            if indeg[t] == 0:
                ready.append(t)
    return order if len(order) == len(states) else None


def topo_order_exists(d: Dfa) -> bool:
    return compatible_order(d) is not None


def variation(d: Dfa, w: str) -> int:
    """Number of state changes along the run of ``d`` on ``w``."""
    q = d.initial
    changes = 0
    for c in w:
        t = d.step(q, c)
        changes += t != q
        q = t
    return changes


def variation_sup(d: Dfa) -> int | str:
    """Supremum of the variation over all words, or ``"infinite"``.

    ``d`` should be minimal. Finite iff the loop-free transition graph is
    acyclic, in which case the supremum is its longest path from the start.
    """
    d = _bfs_canonical(d)
    if not scc_trivial(d):
        return INFINITE
    order = compatible_order(d)
    longest = {q: 0 for q in order}
    for q in reversed(order):
        best = 0
        for t in set(d.trans[q]):
            if t != q:
                best = max(best, 1 + longest[t])
        longest[q] = best
    return longest[d.initial]


# -- profile automaton --------------------------------------------------------

@dataclass(frozen=True)
class ProfileAutomaton:
    """States are sets of adjacent-distinct sequences of length <= k embedded in the input."""

    alphabet: tuple[str, ...]
    k: int
    states: tuple[frozenset, ...]
    trans: tuple[tuple[int, ...], ...]
    initial: int = 0

    def run(self, w: str) -> int:
        q = self.initial
        for c in w:
            q = self.trans[q][self.alphabet.index(c)]
        return q

    def profile(self, w: str) -> frozenset:
        return self.states[self.run(w)]


def profile_step(state: frozenset, c: str, k: int) -> frozenset:
    new = set(state)
    if k >= 1:
        new.add(c)
    for s in state:
        if len(s) < k and s[-1] != c:
            new.add(s + c)
    return frozenset(new)


def profile_automaton(alphabet: Iterable[str], k: int, limit: int = DEFAULT_PROFILE_LIMIT) -> ProfileAutomaton:
    if k < 0:
        raise DfaError("profile length must be nonnegative")
    alphabet = tuple(sorted(set(alphabet)))
    start = frozenset()
    index = {start: 0}
    states = [start]
    trans = []
    i = 0
    while i < len(states):
        row = []
        for c in alphabet:
            t = profile_step(states[i], c, k)
            if t not in index:
                if len(states) >= limit:
                    raise DfaError(f"profile automaton exceeds {limit} states")
                index[t] = len(states)
                states.append(t)
            row.append(index[t])
        trans.append(tuple(row))
        i += 1
    return ProfileAutomaton(alphabet, k, tuple(states), tuple(trans))


def reduced_sequences(alphabet: Iterable[str], k: int) -> list[str]:
    """All adjacent-distinct words of length 1..k, shortest first then lexicographic."""
    alphabet = sorted(set(alphabet))
    out = []
    layer = [c for c in alphabet]
    for _ in range(k):
        out.extend(layer)
        layer = [s + c for s in layer for c in alphabet if s[-1] != c]
    return out


# -- regex subset --------------------------------------------------------------

_SPECIAL = set("|*+?().")


def compile_regex(pattern: str, alphabet: Iterable[str] | None = None) -> Dfa:
    """Minimal DFA of a regex with literals, ``.``, ``|``, ``*``, ``+``, ``?`` and parentheses.

    The alphabet defaults to the literal letters of the pattern.
    """
    if alphabet is None:
        alphabet = {c for c in pattern if c not in _SPECIAL and not c.isspace()}
        if not alphabet:
            raise DfaError("cannot infer an alphabet from the pattern; pass one explicitly")
    alphabet = tuple(sorted(set(alphabet)))
    nfa = _Nfa()
    parser = _RegexParser(pattern.replace(" ", ""), alphabet, nfa)
    start, end = parser.parse()
    return minimize(nfa.determinize(start, end, alphabet))


class _Nfa:
    def __init__(self):
        self.eps: list[set[int]] = []
        self.moves: list[dict[str, set[int]]] = []

    def state(self) -> int:
        self.eps.append(set())
        self.moves.append({})
        return len(self.eps) - 1

    def closure(self, states: Iterable[int]) -> frozenset:
        out = set(states)
        stack = list(out)
        while stack:
            q = stack.pop()
            for t in self.eps[q]:
                if t not in out:
                    out.add(t)
                    stack.append(t)
        return frozenset(out)

    def determinize(self, start: int, end: int, alphabet: tuple[str, ...]) -> Dfa:
        init = self.closure([start])
        index = {init: 0}
        sets = [init]
        trans = []
        i = 0
        while i < len(sets):
            row = []
            for c in alphabet:
                nxt = set()
                for q in sets[i]:
                    nxt |= self.moves[q].get(c, set())
                t = self.closure(nxt)
                if t not in index:
                    index[t] = len(sets)
                    sets.append(t)
                row.append(index[t])
            trans.append(row)
            i += 1
        return Dfa(alphabet, trans, 0, {j for j, s in enumerate(sets) if end in s})


class _RegexParser:
    def __init__(self, text: str, alphabet: tuple[str, ...], nfa: _Nfa):
        self.text, self.pos, self.alphabet, self.nfa = text, 0, alphabet, nfa

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else None

    def parse(self):
        frag = self.union()
        if self.pos != len(self.text):
            raise DfaError(f"unexpected {self.text[self.pos]!r} at position {self.pos} in regex")
        return frag

    def union(self):
        frags = [self.concat()]
        while self.peek() == "|":
            self.pos += 1
            frags.append(self.concat())
        if len(frags) == 1:
            return frags[0]
        s, e = self.nfa.state(), self.nfa.state()
        for fs, fe in frags:
            self.nfa.eps[s].add(fs)
            self.nfa.eps[fe].add(e)
        return s, e

    def concat(self):
        s = self.nfa.state()
        cur = s
        while self.peek() is not None and self.peek() not in "|)":
            fs, fe = self.star()
            self.nfa.eps[cur].add(fs)
            cur = fe
        return s, cur

    def star(self):
        frag = self.atom()
        while self.peek() is not None and self.peek() in "*+?":
            op = self.peek()
            self.pos += 1
            fs, fe = frag
            s, e = self.nfa.state(), self.nfa.state()
            self.nfa.eps[s].add(fs)
            self.nfa.eps[fe].add(e)
            if op != "+":
                self.nfa.eps[s].add(e)  # may skip
            if op != "?":
                self.nfa.eps[fe].add(fs)  # may repeat
            frag = (s, e)
        return frag

    def atom(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            frag = self.union()
            if self.peek() != ")":
                raise DfaError(f"missing ')' at position {self.pos} in regex")
            self.pos += 1
            return frag
        if ch is None or ch in "|)*+?":
            raise DfaError(f"unexpected {ch!r} at position {self.pos} in regex")
        self.pos += 1
        letters = self.alphabet if ch == "." else (ch,)
        if ch != "." and ch not in self.alphabet:
            raise DfaError(f"regex letter {ch!r} is not in the alphabet")
        s, e = self.nfa.state(), self.nfa.state()
        for c in letters:
            self.nfa.moves[s].setdefault(c, set()).add(e)
        return s, e
