"""Finite monoids given by generators: transition monoids, Green's relations, idempotents.

Green's classes are read off the Cayley graphs. In a finite monoid the right
ideal ``xM`` is what can be reached from ``x`` by right multiplication with
generators, so R-classes are the strongly connected components of the right
Cayley graph. The same holds for L (left graph) and J (both). This keeps
everything linear in ``|M| * |generators|`` and never needs the full table.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .dfa import Dfa
from .graphs import strongly_connected_components

DEFAULT_MONOID_LIMIT = 50_000
RELATIONS = ("J", "R", "L")


class MonoidError(ValueError):
    """Invalid table or monoid larger than the configured limit."""


@dataclass(frozen=True)
class JCertificate:
    """Witness that distinct ``a`` and ``b`` generate the same two-sided ideal.

    ``a = left_ab * b * right_ab`` and ``b = left_ba * a * right_ba`` as words.
    """

    a: int
    b: int
    word_a: str
    word_b: str
    left_ab: str
    right_ab: str
    left_ba: str
    right_ba: str

    def to_dict(self) -> dict:
        return {
            "a": self.word_a, "b": self.word_b,
            "a_from_b": [self.left_ab, self.right_ab],
            "b_from_a": [self.left_ba, self.right_ba],
        }


@dataclass(eq=False)
class FiniteMonoid:
    """Monoid with dense elements ``0..size-1``, described by its generator actions.

    ``right[x][i]`` is ``x * g_i`` and ``left[x][i]`` is ``g_i * x``. ``mul`` is
    the full product, used for idempotents and the table.
    """

    letters: tuple[str, ...]
    gens: tuple[int, ...]
    identity: int
    right: list[list[int]]
    left: list[list[int]]
    words: list[str]
    mul: Callable[[int, int], int]
    elements: list | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.right)

    def __len__(self):
        return self.size

    def generator(self, letter: str) -> int:
        return self.gens[self.letters.index(letter)]

    def element_of(self, word: str) -> int:
        x = self.identity
        for c in word:
            x = self.right[x][self.letters.index(c)]
        return x

    def table(self, limit: int = 4000) -> list[list[int]]:
        if self.size > limit:
            raise MonoidError(f"refusing to build a {self.size}x{self.size} table (limit {limit})")
        if "table" not in self._cache:
            self._cache["table"] = [[self.mul(x, y) for y in range(self.size)] for x in range(self.size)]
        return self._cache["table"]

    def idempotents(self) -> list[int]:
        if "idem" not in self._cache:
            self._cache["idem"] = [x for x in range(self.size) if self.mul(x, x) == x]
        return self._cache["idem"]

    def components(self, rel: str) -> list[int]:
        """Component id of every element for the relation ``J``, ``R`` or ``L``."""
        if rel not in RELATIONS:
            raise MonoidError(f"unknown Green relation {rel!r}")
        if rel not in self._cache:
            if rel == "R":
                succ = self.right
            elif rel == "L":
                succ = self.left
            else:
                succ = [r + l for r, l in zip(self.right, self.left)]
            self._cache[rel] = strongly_connected_components(succ)
        return self._cache[rel]

    def classes(self, rel: str) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for x, c in enumerate(self.components(rel)):
            groups.setdefault(c, []).append(x)
        return sorted(groups.values())


def _bfs_monoid(letters, start, gen_values, act, limit):
    """Close ``start`` under right action by generators, recording shortlex words."""
    index = {start: 0}
    elems = [start]
    words = [""]
    right = []
    i = 0
    while i < len(elems):
        row = []
        for c, g in zip(letters, gen_values):
            y = act(elems[i], g)
            j = index.get(y)
            if j is None:
                if len(elems) >= limit:
                    raise MonoidError(f"monoid exceeds {limit} elements")
                j = index[y] = len(elems)
                elems.append(y)
                words.append(words[i] + c)
            row.append(j)
        right.append(row)
        i += 1
    return elems, index, words, right


def transition_monoid(d: Dfa, limit: int = DEFAULT_MONOID_LIMIT) -> FiniteMonoid:
    """Monoid of the state transformations ``q -> q.w`` of ``d``.

    When ``d`` is minimal this is the syntactic monoid of its language.
    """
    n = d.n
    ident = tuple(range(n))
    gen_values = [tuple(d.trans[q][i] for q in range(n)) for i in range(len(d.alphabet))]

    def then(f, g):
        return tuple(g[x] for x in f)

    elems, index, words, right = _bfs_monoid(d.alphabet, ident, gen_values, then, limit)
    left = [[index[then(g, f)] for g in gen_values] for f in elems]
    gens = tuple(index[g] for g in gen_values)
    return FiniteMonoid(d.alphabet, gens, 0, right, left, words,
                        lambda x, y: index[then(elems[x], elems[y])], elems)


def from_table(table: Sequence[Sequence[int]], identity: int,
               generators: dict[str, int] | None = None) -> FiniteMonoid:
    """Monoid from an explicit multiplication table.

    Without ``generators`` every non-identity element acts as its own generator,
    named by consecutive letters starting at ``a``.
    """
    size = len(table)
    if any(len(row) != size for row in table):
        raise MonoidError("multiplication table must be square")
    if not all(0 <= v < size for row in table for v in row):
        raise MonoidError("table entries out of range")
    for x in range(size):
        if table[identity][x] != x or table[x][identity] != x:
            raise MonoidError(f"element {identity} is not an identity")
    for x in range(size):
        for y in range(size):
            for z in range(size):
                if table[table[x][y]][z] != table[x][table[y][z]]:
                    raise MonoidError(f"table is not associative at ({x}, {y}, {z})")
    if generators is None:
        others = [x for x in range(size) if x != identity]
        generators = {chr(ord("a") + i): x for i, x in enumerate(others)}
    letters = tuple(sorted(generators))
    gvals = [generators[c] for c in letters]
    elems, index, words, _ = _bfs_monoid(letters, identity, gvals, lambda x, g: table[x][g], size + 1)
    if len(elems) != size:
        raise MonoidError("generators do not generate the whole table")
    # renumber so that element ids follow the shortlex order of their words
    right = [[index[table[x][g]] for g in gvals] for x in elems]
    left = [[index[table[g][x]] for g in gvals] for x in elems]
    return FiniteMonoid(letters, tuple(index[g] for g in gvals), 0, right, left, words,
                        lambda x, y: index[table[elems[x]][elems[y]]], elems)


# -- predicates ----------------------------------------------------------------------

def green_trivial(m: FiniteMonoid, rel: str) -> bool:
    return len(set(m.components(rel))) == m.size


def is_block_group(m: FiniteMonoid) -> bool:
    """Every R-class and every L-class holds at most one idempotent."""
    for rel in ("R", "L"):
        comp = m.components(rel)
        seen = set()
        for e in m.idempotents():
            if comp[e] in seen:
                return False
            seen.add(comp[e])
    return True


def is_literally_idempotent(d: Dfa) -> bool:
    return literal_idempotency_witness(d) is None


def literal_idempotency_witness(d: Dfa) -> tuple[int, str] | None:
    """First reachable ``(state, letter)`` with ``q.aa != q.a``, in BFS/letter order."""
    for q in d.reachable():
        for i, c in enumerate(d.alphabet):
            t = d.trans[q][i]
            if d.trans[t][i] != t:
                return q, c
    return None


def j_certificate(m: FiniteMonoid) -> JCertificate | None:
    """A pair of distinct J-equivalent elements with explicit factorizations."""
    comp = m.components("J")
    first: dict[int, int] = {}
    for x in range(m.size):
        c = comp[x]
        if c in first:
            a, b = first[c], x
            lab, rab = _two_sided_path(m, b, a)
            lba, rba = _two_sided_path(m, a, b)
            return JCertificate(a, b, m.words[a], m.words[b], lab, rab, lba, rba)
        first[c] = x
    return None


def _two_sided_path(m: FiniteMonoid, src: int, dst: int) -> tuple[str, str]:
    """Words ``u, v`` with ``u * src * v = dst`` (BFS over one-letter steps)."""
    prev: dict[int, tuple[int, str, str] | None] = {src: None}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            break
        for i, c in enumerate(m.letters):
            for y, side in ((m.right[x][i], "R"), (m.left[x][i], "L")):
                if y not in prev:
                    prev[y] = (x, c, side)
                    queue.append(y)
    if dst not in prev:
        raise MonoidError(f"element {dst} is not in the ideal generated by {src}")
    u, v = [], []
    x = dst
    while prev[x] is not None:
        x, c, side = prev[x]
        (v if side == "R" else u).append(c)
    return "".join(u), "".join(reversed(v))


def report(m: FiniteMonoid, table_limit: int = 64) -> dict:
    """Machine-readable summary: sizes, idempotents, class partitions, verdicts."""
    named = lambda xs: [m.words[x] or "1" for x in xs]  # noqa: E731
    out = {
        "size": m.size,
        "elements": named(range(m.size)),
        "generators": {c: m.words[g] or "1" for c, g in zip(m.letters, m.gens)},
        "idempotents": named(m.idempotents()),
        "classes": {rel: [named(cl) for cl in m.classes(rel)] for rel in RELATIONS},
        "trivial": {rel: green_trivial(m, rel) for rel in RELATIONS},
        "block_group": is_block_group(m),
    }
    if m.size <= table_limit:
        out["table"] = m.table()
    return out


def format_report(rep: dict) -> str:
    lines = [f"elements ({rep['size']}): " + " ".join(rep["elements"]),
             "idempotents: " + " ".join(rep["idempotents"])]
    for rel in RELATIONS:
        cls = ["{" + ",".join(c) + "}" for c in rep["classes"][rel]]
        verdict = "trivial" if rep["trivial"][rel] else "not trivial"
        lines.append(f"{rel}-classes ({verdict}): " + " ".join(cls))
    lines.append(f"block-group: {'yes' if rep['block_group'] else 'no'}")
    if "table" in rep:
        lines.append("table:")
        for row in rep["table"]:
            lines.append("  " + " ".join(f"{v:>3}" for v in row))
    return "\n".join(lines)


def idempotent_generators(m: FiniteMonoid) -> Iterable[str]:
    """Letters whose image is idempotent."""
    return [c for c, g in zip(m.letters, m.gens) if m.mul(g, g) == g]
