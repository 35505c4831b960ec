"""Easy formulas and their boolean combinations, compiled to automata.

Two leaf kinds are supported. ``fo(a,b,a)`` is the existential first-order
formula saying that positions ``x1 < x2 < x3`` carry ``a``, ``b`` and ``a``;
its language is the basis language of the sequence. ``ltl({a,b},{c})`` is the
nested until formula ``G1 U (G2 U (... U end))`` whose language is
``G1* G2* ...``. Leaves are combined with ``!``, ``&`` and ``|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .builders import BuildError, check_basis_seq
from .dfa import Dfa, basis_dfa, bool_op, complement, minimize


class LogicError(ValueError):
    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        super().__init__(message if pos is None else f"{message} (at position {pos})")


class Formula:
    def kind(self) -> str:
        raise NotImplementedError

    def leaves(self) -> list["Formula"]:
        raise NotImplementedError

    def letters(self) -> set[str]:
        return {c for leaf in self.leaves() for c in leaf.letters()}


@dataclass(frozen=True)
class EasyFO(Formula):
    seq: str

    def __post_init__(self):
        try:
            check_basis_seq(self.seq)
        except BuildError as exc:
            raise LogicError(str(exc)) from None

    def kind(self):
        return "fo"

    def leaves(self):
        return [self]

    def letters(self):
        return set(self.seq)

    def __str__(self):
        return f"fo({','.join(self.seq)})"


@dataclass(frozen=True)
class EasyLTL(Formula):
    sets: tuple[frozenset, ...]

    def __post_init__(self):
        if not self.sets:
            raise LogicError("ltl leaf needs at least one letter set")
        for g in self.sets:
            if not g:
                raise LogicError("ltl letter sets must be nonempty")

    def kind(self):
        return "ltl"

    def leaves(self):
        return [self]

    def letters(self):
        return set().union(*self.sets)

    def __str__(self):
        return "ltl(" + ",".join("{" + ",".join(sorted(g)) + "}" for g in self.sets) + ")"


@dataclass(frozen=True)
class Not(Formula):
    inner: Formula

    def kind(self):
        return self.inner.kind()

    def leaves(self):
        return self.inner.leaves()

    def __str__(self):
        return f"!{_wrap(self.inner)}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def kind(self):
        return _same_kind(self.left, self.right)

    def leaves(self):
        return self.left.leaves() + self.right.leaves()

    def __str__(self):
        return f"{_wrap(self.left)} & {_wrap(self.right)}"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def kind(self):
        return _same_kind(self.left, self.right)

    def leaves(self):
        return self.left.leaves() + self.right.leaves()

    def __str__(self):
        return f"{_wrap(self.left)} | {_wrap(self.right)}"


def _wrap(f: Formula) -> str:
    return f"({f})" if isinstance(f, (And, Or)) else str(f)


def _same_kind(a: Formula, b: Formula) -> str:
    ka, kb = a.kind(), b.kind()
    if ka != kb:
        raise LogicError(f"cannot mix {ka} and {kb} leaves in one formula")
    return ka


# -- parsing -------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else None

    def expect(self, ch: str):
        if self.peek() != ch:
            found = self.peek()
            raise LogicError(f"expected {ch!r} but found {'end of input' if found is None else repr(found)}",
                             self.pos)
        self.pos += 1

    def parse(self) -> Formula:
        f = self.disj()
        if self.peek() is not None:
            raise LogicError(f"unexpected {self.peek()!r}", self.pos)
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.pos += 1
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.pos += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        ch = self.peek()
        if ch == "!":
            self.pos += 1
            return Not(self.unary())
        if ch == "(":
            self.pos += 1
            f = self.disj()
            self.expect(")")
            return f
        start = self.pos
        for name in ("fo", "ltl"):
            if self.text.startswith(name, self.pos):
                self.pos += len(name)
                self.expect("(")
                leaf = self.fo_args(start) if name == "fo" else self.ltl_args(start)
                self.expect(")")
                return leaf
        raise LogicError("expected 'fo(...)', 'ltl(...)', '!' or '('" if ch else "unexpected end of input",
                         self.pos)

    def letter(self) -> str:
        ch = self.peek()
        if ch is None or ch in "(){},&|!":
            raise LogicError("expected a letter", self.pos)
        self.pos += 1
        return ch

    def fo_args(self, start: int) -> EasyFO:
        seq = [self.letter()]
        while self.peek() == ",":
            self.pos += 1
            seq.append(self.letter())
        try:
            return EasyFO("".join(seq))
        except LogicError as exc:
            raise LogicError(str(exc), start) from None

    def ltl_args(self, start: int) -> EasyLTL:
        sets = [self.letter_set()]
        while self.peek() == ",":
            self.pos += 1
            sets.append(self.letter_set())
        try:
            return EasyLTL(tuple(sets))
        except LogicError as exc:
            raise LogicError(str(exc), start) from None

    def letter_set(self) -> frozenset:
        self.expect("{")
        items = set()
        if self.peek() != "}":
            items.add(self.letter())
            while self.peek() == ",":
                self.pos += 1
                items.add(self.letter())
        self.expect("}")
        return frozenset(items)


def parse_formula(text: str) -> Formula:
    f = _Parser(text).parse()
    f.kind()  # rejects mixed leaf kinds
    return f


# -- compilation ---------------------------------------------------------------

def ltl_leaf_dfa(leaf: EasyLTL, alphabet: Iterable[str]) -> Dfa:
    """Layered automaton for ``G1* ... Gk*``: stay in the earliest usable layer."""
    alphabet = tuple(sorted(set(alphabet)))
    k = len(leaf.sets)
    sink = k
    trans = []
    for i in range(k):
        row = []
        for c in alphabet:
            row.append(next((j for j in range(i, k) if c in leaf.sets[j]), sink))
        trans.append(row)
    trans.append([sink] * len(alphabet))
    return minimize(Dfa(alphabet, trans, 0, set(range(k))))


def _compile(f: Formula, alphabet: tuple[str, ...], leaf_dfa) -> Dfa:
    if isinstance(f, (EasyFO, EasyLTL)):
        return leaf_dfa(f, alphabet)
    if isinstance(f, Not):
        return complement(_compile(f.inner, alphabet, leaf_dfa))
    op = "and" if isinstance(f, And) else "or"
    return minimize(bool_op(_compile(f.left, alphabet, leaf_dfa), _compile(f.right, alphabet, leaf_dfa), op))


def _check(f: Formula, kind: str, alphabet: Iterable[str]) -> tuple[str, ...]:
    if f.kind() != kind:
        raise LogicError(f"expected a formula with {kind} leaves, got {f.kind()}")
    alphabet = tuple(sorted(set(alphabet)))
    stray = f.letters() - set(alphabet)
    if stray:
        raise LogicError(f"letters {sorted(stray)} are not in the alphabet {''.join(alphabet)}")
    return alphabet


def compile_fo(f: Formula, alphabet: Iterable[str]) -> Dfa:
    alphabet = _check(f, "fo", alphabet)
    return minimize(_compile(f, alphabet, lambda leaf, al: basis_dfa(leaf.seq, al)))


def compile_ltl(f: Formula, alphabet: Iterable[str]) -> Dfa:
    alphabet = _check(f, "ltl", alphabet)
    return minimize(_compile(f, alphabet, ltl_leaf_dfa))


def compile_formula(f: Formula | str, alphabet: Iterable[str]) -> Dfa:
    if isinstance(f, str):
        f = parse_formula(f)
    return compile_fo(f, alphabet) if f.kind() == "fo" else compile_ltl(f, alphabet)


def _empty_suffix(leaf: EasyLTL) -> tuple[bool, ...]:
    # on the empty suffix only the innermost "end" formula holds, and hence every until
    return (True,) * (len(leaf.sets) + 1)


def _prepend(leaf: EasyLTL, c: str, suffix: tuple[bool, ...]) -> tuple[bool, ...]:
    """Truth values of every nested until on ``c + s`` from those on ``s``.

    ``G U rest`` holds on ``c + s`` iff ``rest`` holds there, or ``c`` is in
    ``G`` and ``G U rest`` holds on ``s``.
    """
    k = len(leaf.sets)
    out = [False] * (k + 1)
    for level in range(k - 1, -1, -1):
        out[level] = out[level + 1] or (c in leaf.sets[level] and suffix[level])
    return tuple(out)


def model_check_ltl(leaf: EasyLTL, w: str) -> bool:
    """Evaluate the nested until chain on ``w`` by working through its suffixes."""
    state = _empty_suffix(leaf)
    for c in reversed(w):
        state = _prepend(leaf, c, state)
    return state[0]


def model_check_ltl_upto(leaf: EasyLTL, alphabet: Iterable[str], max_len: int) -> dict[str, bool]:
    """:func:`model_check_ltl` on every word up to ``max_len``, sharing suffixes."""
    alphabet = tuple(sorted(set(alphabet)))
    out = {}
    stack = [("", _empty_suffix(leaf))]
    while stack:
        w, state = stack.pop()
        out[w] = state[0]
        if len(w) < max_len:
            for c in alphabet:
                stack.append((c + w, _prepend(leaf, c, state)))
    return out
