"""Explicit automata for basis languages and the closure algebra of events.

``build_basis_automaton("ab", "abc")`` gives a 3-dimensional measure-only
automaton whose acceptance probability is zero off ``S*aS*bS*`` and at least
``2**-4`` on it. Events combine automata under Hadamard product,
f-complement, convex combination and majority amplification; each combinator
can also be materialized into one concrete automaton.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .linalg import (
    Matrix,
    direct_sum_all,
    hconcat,
    is_exact_scalar,
    rational_sqrt,
    real_value,
    tensor,
    tensor_all,
)
from .qfa import (
    END,
    LQFA,
    Meta,
    MOnQFA,
    Observable,
    QfaError,
    accept_prob,
    accept_probs_upto,
)

MAX_MATERIALIZED_COPIES = 3
EXACT_TAIL_LIMIT = 400


class BuildError(ValueError):
    """Invalid construction input."""


# -- basis sequences ------------------------------------------------------

def check_basis_seq(seq: str) -> str:
    """Validate a basis sequence: nonempty, no two equal adjacent letters."""
    if not seq:
        raise BuildError("a basis sequence must be nonempty")
    for x, y in zip(seq, seq[1:]):
        if x == y:
            raise BuildError(f"adjacent letters of {seq!r} must differ (found {x}{y})")
    return seq


def j_indexes(seq: str, letter: str) -> list[int]:
    """1-based positions of ``letter`` in ``seq``."""
    check_basis_seq(seq)
    out = [i + 1 for i, c in enumerate(seq) if c == letter]
    if not out:
        raise BuildError(f"letter {letter!r} does not occur in {seq!r}")
    return out


def _blocks(seq: str, letter: str) -> set[tuple[int, int]]:
    # 0-based index pairs (j-1, j) of the 2x2 blocks
    return {(j - 1, j) for j in j_indexes(seq, letter)}


def up_projector(seq: str, letter: str) -> Matrix:
    """Averages each coordinate pair (j, j+1) with ``seq[j] == letter``; identity elsewhere."""
    n = len(seq) + 1
    rows = [[Fraction(0)] * n for _ in range(n)]
    inside = set()
    for r, s in _blocks(seq, letter):
        inside.update((r, s))
        for x in (r, s):
            for y in (r, s):
                rows[x][y] = Fraction(1, 2)
    for i in range(n):
        if i not in inside:
            rows[i][i] = Fraction(1)
    return Matrix.from_rows(rows)


def down_projector(seq: str, letter: str) -> Matrix:
    n = len(seq) + 1
    rows = [[Fraction(0)] * n for _ in range(n)]
    for r, s in _blocks(seq, letter):
        for x in (r, s):
            for y in (r, s):
                rows[x][y] = Fraction(1, 2) if x == y else Fraction(-1, 2)
    return Matrix.from_rows(rows)


UP, DOWN = 0, 1
REJECT, ACCEPT = 0, 1


def basis_meta(k: int) -> Meta:
    return Meta(Fraction(1, 2 ** (2 * k + 1)), Fraction(1, 2 ** (2 * (k + 1))))


@lru_cache(maxsize=512)
def build_basis_automaton(seq: str, alphabet: str | Iterable[str]) -> MOnQFA:
    """Automaton recognizing ``S* a1 S* ... ak S*`` with an isolated cut-point.

    Up and down projectors carry labels 0 and 1; letters outside the sequence
    measure the identity; the end-marker accepts on the last basis vector.
    """
    check_basis_seq(seq)
    alphabet = tuple(sorted(set(alphabet)))
    stray = set(seq) - set(alphabet)
    if stray:
        raise BuildError(f"letters {sorted(stray)} of {seq!r} are not in the alphabet")
    k = len(seq)
    dim = k + 1
    observables = {}
    for c in alphabet:
        if c in seq:
            observables[c] = Observable(((UP, up_projector(seq, c)), (DOWN, down_projector(seq, c))))
        else:
            observables[c] = Observable.identity(dim)
    last = Matrix.basis_vector(k, dim)
    acc = last.adjoint() @ last
    observables[END] = Observable(((REJECT, Matrix.identity(dim) - acc), (ACCEPT, acc)))
    return MOnQFA(alphabet, observables, Matrix.basis_vector(0, dim), {ACCEPT}, basis_meta(k))


def constant_automaton(alphabet: Iterable[str], value: int) -> MOnQFA:
    """One-dimensional automaton accepting every word with probability 0 or 1."""
    if value not in (0, 1):
        raise BuildError("constant automata take the value 0 or 1")
    alphabet = tuple(sorted(set(alphabet)))
    obs = {c: Observable.identity(1) for c in (*alphabet, END)}
    return MOnQFA(alphabet, obs, Matrix.identity(1), {0} if value else set())


# -- automaton-level constructions -----------------------------------------

def _same_alphabet(a: MOnQFA, b: MOnQFA):
    if a.alphabet != b.alphabet:
        raise BuildError(f"alphabet mismatch: {''.join(a.alphabet)} vs {''.join(b.alphabet)}")


def _product_observable(parts: Sequence[Observable]) -> tuple[Observable, list[tuple]]:
    """Tensor product observable; returns it with the label tuple of each result."""
    combos = list(itertools.product(*(o.results for o in parts)))
    results = []
    label_tuples = []
    for idx, combo in enumerate(combos):
        label_tuples.append(tuple(lab for lab, _ in combo))
        results.append((idx, tensor_all([p for _, p in combo])))
    return Observable(tuple(results)), label_tuples


def tensor_automaton(a: MOnQFA, b: MOnQFA) -> MOnQFA:
    """Automaton whose acceptance probability is ``p_a * p_b``."""
    _same_alphabet(a, b)
    observables = {}
    for c in (*a.alphabet, END):
        observables[c], labels = _product_observable([a.observables[c], b.observables[c]])
    accepting = {i for i, (la, lb) in enumerate(labels) if la in a.accepting and lb in b.accepting}
    return MOnQFA(a.alphabet, observables, tensor(a.initial, b.initial), accepting)


def complement_automaton(a: MOnQFA) -> MOnQFA:
    """Same automaton with the complementary accepting labels: ``1 - p_a``."""
    meta = None if a.meta is None else Meta(1 - a.meta.cutpoint, a.meta.isolation)
    rest = set(a.observables[END].labels) - a.accepting
    return a.with_accepting(rest, meta)


def amplitude_split(weight) -> list:
    """Amplitudes whose squares sum to ``weight``.

    A single ``sqrt(weight)`` when that is rational (or ``weight`` is a float);
    otherwise up to four rationals from a four-square decomposition, so that
    exact automata stay exact.
    """
    if not is_exact_scalar(weight):
        return [math.sqrt(weight)] if weight > 0 else []
    weight = Fraction(weight)
    if weight == 0:
        return []
    r = rational_sqrt(weight)
    if r is not None:
        return [r]
    from sympy.solvers.diophantine.diophantine import sum_of_four_squares

    d = weight.denominator
    parts = sum_of_four_squares(weight.numerator * d)
    return [Fraction(x, d) for x in parts if x]


def direct_sum_automaton(alpha, a: MOnQFA, b: MOnQFA) -> MOnQFA:
    """Automaton with acceptance probability ``alpha*p_a + (1-alpha)*p_b``.

    Observables are block-diagonal copies of both sides and the initial vector
    puts amplitude ``sqrt(alpha)`` on ``a`` and ``sqrt(1-alpha)`` on ``b``. When
    an exact weight has no rational square root its amplitude is spread over
    several copies of the same side. Accepting labels are namespaced per copy.
    """
    _same_alphabet(a, b)
    if not 0 <= alpha <= 1:
        raise BuildError(f"convex weight {alpha} outside [0, 1]")
    beta = 1 - alpha
    copies = [(a, amp) for amp in amplitude_split(alpha)] + [(b, amp) for amp in amplitude_split(beta)]
    observables = {}
    for c in (*a.alphabet, END):
        parts = [auto.observables[c] for auto, _ in copies]
        observables[c] = _direct_sum_observable(parts)
    initial = hconcat([auto.initial.scale(amp) for auto, amp in copies])
    accepting = set()
    for i, (auto, _) in enumerate(copies):
        accepting |= {(i, lab) for lab in auto.accepting}
    return _relabel(MOnQFA(a.alphabet, observables, initial, accepting))


def _direct_sum_observable(parts: Sequence[Observable]) -> Observable:
    dims = [o.dim for o in parts]
    exact = all(o.exact for o in parts)
    results = []
    for i, o in enumerate(parts):
        for lab, p in o.results:
            blocks = []
            for j, d in enumerate(dims):
                blocks.append(p if j == i else Matrix.zeros(d, d, exact))
            results.append(((i, lab), direct_sum_all(blocks)))
    return Observable(tuple(results))


def _relabel(a: MOnQFA) -> MOnQFA:
    """Renumber every observable's labels as 0, 1, ... keeping the accepting set."""
    observables = {}
    accepting = set()
    for c, o in a.observables.items():
        mapping = {lab: i for i, lab in enumerate(o.labels)}
        observables[c] = Observable(tuple((mapping[lab], p) for lab, p in o.results))
        if c == END:
            accepting = {mapping[lab] for lab in a.accepting}
    return MOnQFA(a.alphabet, observables, a.initial, accepting, a.meta)


def amplify_automaton(a: MOnQFA, n: int, threshold) -> MOnQFA:
    """N-fold tensor power accepting when at least ``threshold*n`` copies accept."""
    if n < 1:
        raise BuildError("amplification needs n >= 1")
    need = _min_successes(n, threshold)
    observables = {}
    for c in a.alphabet:
        observables[c], _ = _product_observable([a.observables[c]] * n)
    observables[END], labels = _product_observable([a.observables[END]] * n)
    accepting = {i for i, tup in enumerate(labels) if sum(lab in a.accepting for lab in tup) >= need}
    return MOnQFA(a.alphabet, observables, tensor_all([a.initial] * n), accepting)


def normalize_cutpoint(a: MOnQFA) -> MOnQFA:
    """Equivalent automaton with cut-point 1/2.

    Mixes ``a`` with a constant automaton so that
    ``p' = 1/2 + (p - lam) / (2 max(lam, 1-lam))``; the isolation becomes
    ``delta / (2 max(lam, 1-lam))``.
    """
    if a.meta is None:
        raise BuildError("normalize_cutpoint needs a declared cut-point and isolation")
    lam, delta = a.meta.cutpoint, a.meta.isolation
    if not 0 < lam < 1 or lam == Fraction(1, 2):
        raise BuildError(f"cut-point must lie in (0, 1) and differ from 1/2, got {lam}")
    if delta <= 0:
        raise BuildError("isolation must be positive")
    big = max(lam, 1 - lam)
    alpha = 1 / (2 * big)
    const = constant_automaton(a.alphabet, 1 if lam < Fraction(1, 2) else 0)
    out = direct_sum_automaton(alpha, a, const)
    return out.with_meta(Meta(Fraction(1, 2), delta / (2 * big)))


def to_lqfa(a: MOnQFA) -> LQFA:
    """The same automaton read as a Latvian automaton with identity unitaries."""
    unitaries = {c: Matrix.identity(a.dim, a.exact) for c in (*a.alphabet, END)}
    return LQFA(a.alphabet, a.observables, a.initial, a.accepting, unitaries, a.meta, a.tol)


# -- linear representation --------------------------------------------------

@dataclass(frozen=True)
class LinearRep:
    xi: Matrix
    letters: dict
    eta: Matrix

    def value(self, w: str):
        v = self.xi
        for c in w:
            try:
                v = v @ self.letters[c]
            except KeyError:
                raise QfaError(f"letter {c!r} not in the representation") from None
        return real_value((v @ self.eta.T).entry(0, 0))


def linear_representation(a: MOnQFA) -> LinearRep:
    """``(xi, P(c), eta)`` on the squared space with ``xi P(w) eta^T = p_a(w)``."""
    xi = tensor(a.initial, a.initial.conj())
    letters = {}
    for c in a.alphabet:
        ps = a.observables[c].projectors
        total = tensor(ps[0], ps[0].conj())
        for p in ps[1:]:
            total = total + tensor(p, p.conj())
        letters[c] = total
    end = a.observables[END]
    m = a.dim
    acc = Matrix.zeros(m * m, m * m, a.exact)
    for lab in a.accepting:
        p = end.projector(lab)
        acc = acc + tensor(p, p.conj())
    eta = Matrix.identity(m, a.exact).flatten_rows() @ acc
    return LinearRep(xi, letters, eta)


# -- events -----------------------------------------------------------------

def _min_successes(n: int, threshold) -> int:
    """Least integer k with k >= threshold*n."""
    t = threshold * n
    if is_exact_scalar(threshold):
        return max(math.ceil(Fraction(t)), 0)
    return max(math.ceil(t - 1e-12), 0)


@lru_cache(maxsize=1 << 16)
def binomial_tail(p, n: int, threshold):
    """P[Bin(n, p) >= threshold*n]; exact for rational p and moderate n."""
    kmin = _min_successes(n, threshold)
    if kmin <= 0:
        return Fraction(1) if is_exact_scalar(p) else 1.0
    if kmin > n:
        return Fraction(0) if is_exact_scalar(p) else 0.0
    if p == 0:
        return Fraction(0) if is_exact_scalar(p) else 0.0
    if p == 1:
        return Fraction(1) if is_exact_scalar(p) else 1.0
    if is_exact_scalar(p) and n <= EXACT_TAIL_LIMIT:
        p = Fraction(p)
        return sum(math.comb(n, k) * p ** k * (1 - p) ** (n - k) for k in range(kmin, n + 1))
    from scipy.stats import binom

    return float(binom.sf(kmin - 1, n, float(p)))


def hoeffding_bound(delta, n: int) -> float:
    return math.exp(-2 * float(delta) ** 2 * n)


def copies_for_error(delta, eps) -> int:
    """Smallest n with exp(-2 delta^2 n) <= eps."""
    n = max(1, math.ceil(math.log(1 / float(eps)) / (2 * float(delta) ** 2)))
    while hoeffding_bound(delta, n) > eps:
        n += 1
    return n


class Event:
    """Probabilistic word function built from automata by closure operations."""

    alphabet: tuple

    def value(self, w: str):
        return self._eval(w, None)

    def values_upto(self, max_len: int) -> dict[str, object]:
        """Values on every word of length <= ``max_len``."""
        tables = {}
        for atom in self.atoms():
            key = id(atom.automaton)
            if key not in tables:
                tables[key] = accept_probs_upto(atom.automaton, max_len, self.alphabet)
        words = tables[next(iter(tables))].keys() if tables else _words_upto(self.alphabet, max_len)
        return {w: self._eval(w, tables) for w in words}

    def atoms(self) -> Iterable["Atom"]:
        for ch in self.children():
            yield from ch.atoms()

    def children(self) -> tuple["Event", ...]:
        return ()

    @property
    def meta(self) -> Meta | None:
        eps = self.error_bound
        if eps is not None and eps < Fraction(1, 2):
            return Meta(Fraction(1, 2), Fraction(1, 2) - eps if is_exact_scalar(eps) else 0.5 - eps)
        return None

    @property
    def error_bound(self):
        """Upper bound on |value - characteristic function| when known, else None."""
        return None

    def classify(self, w: str, cutpoint=None) -> bool:
        if cutpoint is None:
            if self.meta is None:
                raise BuildError("no cut-point declared for this event")
            cutpoint = self.meta.cutpoint
        return self.value(w) > cutpoint

    def materialize(self) -> MOnQFA:
        raise NotImplementedError

    def _eval(self, w: str, tables):
        raise NotImplementedError


def _words_upto(alphabet, max_len):
    for n in range(max_len + 1):
        for t in itertools.product(alphabet, repeat=n):
            yield "".join(t)


@dataclass(frozen=True, eq=False)
class Atom(Event):
    automaton: MOnQFA
    exact_error: object = None

    @property
    def alphabet(self):
        return self.automaton.alphabet

    def atoms(self):
        yield self

    def _eval(self, w, tables):
        if tables is not None:
            return tables[id(self.automaton)][w]
        return accept_prob(self.automaton, w)

    @property
    def meta(self):
        return self.automaton.meta if self.automaton.meta is not None else Event.meta.fget(self)

    @property
    def error_bound(self):
        return self.exact_error

    def materialize(self):
        return self.automaton


@dataclass(frozen=True, eq=False)
class Hadamard(Event):
    left: Event
    right: Event

    @property
    def alphabet(self):
        return self.left.alphabet

    def children(self):
        return (self.left, self.right)

    def _eval(self, w, tables):
        return self.left._eval(w, tables) * self.right._eval(w, tables)

    @property
    def error_bound(self):
        a, b = self.left.error_bound, self.right.error_bound
        return None if a is None or b is None else a + b

    def materialize(self):
        return tensor_automaton(self.left.materialize(), self.right.materialize())


@dataclass(frozen=True, eq=False)
class FComplement(Event):
    inner: Event

    @property
    def alphabet(self):
        return self.inner.alphabet

    def children(self):
        return (self.inner,)

    def _eval(self, w, tables):
        return 1 - self.inner._eval(w, tables)

    @property
    def error_bound(self):
        return self.inner.error_bound

    @property
    def meta(self):
        m = self.inner.meta
        return None if m is None else Meta(1 - m.cutpoint, m.isolation)

    def materialize(self):
        return complement_automaton(self.inner.materialize())


@dataclass(frozen=True, eq=False)
class Convex(Event):
    alpha: object
    left: Event
    right: Event

    @property
    def alphabet(self):
        return self.left.alphabet

    def children(self):
        return (self.left, self.right)

    def _eval(self, w, tables):
        return self.alpha * self.left._eval(w, tables) + (1 - self.alpha) * self.right._eval(w, tables)

    def materialize(self):
        return direct_sum_automaton(self.alpha, self.left.materialize(), self.right.materialize())


@dataclass(frozen=True, eq=False)
class Amplified(Event):
    inner: Event
    n: int
    threshold: object

    @property
    def alphabet(self):
        return self.inner.alphabet

    def children(self):
        return (self.inner,)

    def _eval(self, w, tables):
        return binomial_tail(self.inner._eval(w, tables), self.n, self.threshold)

    @property
    def error_bound(self):
        m = self.inner.meta
        if m is None or m.cutpoint != self.threshold:
            return None
        return hoeffding_bound(m.isolation, self.n)

    @property
    def meta(self):
        eps = self.error_bound
        if eps is not None and eps < 0.5:
            return Meta(Fraction(1, 2), 0.5 - eps)
        return None

    def materialize(self):
        if self.n > MAX_MATERIALIZED_COPIES:
            raise BuildError(f"refusing to materialize {self.n} tensor copies "
                             f"(limit {MAX_MATERIALIZED_COPIES})")
        return amplify_automaton(self.inner.materialize(), self.n, self.threshold)


def atom(a: MOnQFA) -> Atom:
    return Atom(a)


def basis_event(seq: str, alphabet) -> Atom:
    return Atom(build_basis_automaton(seq, tuple(sorted(set(alphabet)))))


def constant_event(alphabet, value: int) -> Atom:
    return Atom(constant_automaton(alphabet, value), exact_error=Fraction(0))


def _check_alphabets(e1: Event, e2: Event):
    if e1.alphabet != e2.alphabet:
        raise BuildError(f"alphabet mismatch: {''.join(e1.alphabet)} vs {''.join(e2.alphabet)}")


def _verify(node: Event, auto: MOnQFA, check_len: int):
    for w in _words_upto(node.alphabet, check_len):
        got, want = accept_prob(auto, w), node.value(w)
        if is_exact_scalar(got) and is_exact_scalar(want):
            ok = got == want
        else:
            ok = abs(float(got) - float(want)) <= 1e-9
        if not ok:
            raise BuildError(f"materialized automaton disagrees on {w!r}: {got} != {want}")


def hadamard(e1: Event, e2: Event, check_len: int = 2) -> Hadamard:
    """Pointwise product of two events."""
    _check_alphabets(e1, e2)
    node = Hadamard(e1, e2)
    if isinstance(e1, Atom) and isinstance(e2, Atom):
        _verify(node, node.materialize(), check_len)
    return node


def f_complement(e: Event, check_len: int = 2) -> FComplement:
    """``1 - e``."""
    node = FComplement(e)
    if isinstance(e, Atom):
        _verify(node, node.materialize(), check_len)
    return node


def convex(alpha, e1: Event, e2: Event, check_len: int = 2) -> Convex:
    """``alpha*e1 + (1-alpha)*e2``."""
    _check_alphabets(e1, e2)
    if not 0 <= alpha <= 1:
        raise BuildError(f"convex weight {alpha} outside [0, 1]")
    node = Convex(alpha, e1, e2)
    if isinstance(e1, Atom) and isinstance(e2, Atom):
        _verify(node, node.materialize(), check_len)
    return node


def amplify(e: Event, n: int, threshold) -> Amplified:
    """Probability that at least ``threshold*n`` of ``n`` independent runs accept."""
    if n < 1:
        raise BuildError("amplification needs n >= 1")
    return Amplified(e, n, threshold)


def disjunction(e1: Event, e2: Event) -> Event:
    """Union via De Morgan using only products and complements."""
    return FComplement(Hadamard(FComplement(e1), FComplement(e2)))


# -- textual event expressions ----------------------------------------------

def parse_event(text: str, alphabet, loader: Callable[[str], MOnQFA] | None = None) -> Event:
    """Parse ``(had E E)``, ``(fc E)``, ``(cvx a E E)``, ``(amp N t E)``,
    ``(basis "aba")``, ``(const 0|1)`` and ``(qfa "file.json")``."""
    tokens = _tokenize(text)
    pos = 0
    alphabet = tuple(sorted(set(alphabet)))

    def take():
        nonlocal pos
        if pos >= len(tokens):
            raise BuildError("unexpected end of event expression")
        tok = tokens[pos]
        pos += 1
        return tok

    def expr() -> Event:
        tok = take()
        if tok != "(":
            raise BuildError(f"expected '(' but found {tok!r}")
        head = take()
        if head == "had":
            node = hadamard(expr(), expr())
        elif head == "fc":
            node = f_complement(expr())
        elif head == "cvx":
            weight = _number(take())
            node = convex(weight, expr(), expr())
        elif head == "amp":
            n = int(take())
            thr = _number(take())
            node = amplify(expr(), n, thr)
        elif head == "basis":
            node = basis_event(_string(take()), alphabet)
        elif head == "const":
            node = constant_event(alphabet, int(take()))
        elif head == "qfa":
            if loader is None:
                raise BuildError("no loader available for (qfa ...)")
            node = Atom(loader(_string(take())))
        else:
            raise BuildError(f"unknown event operator {head!r}")
        if take() != ")":
            raise BuildError(f"expected ')' after {head} expression")
        return node

    node = expr()
    if pos != len(tokens):
        raise BuildError(f"trailing input after event expression: {tokens[pos:]}")
    return node


def _tokenize(text: str) -> list[str]:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            out.append(ch)
            i += 1
        elif ch == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise BuildError("unterminated string in event expression")
            out.append(text[i:j + 1])
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in '()"':
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _string(tok: str) -> str:
    if len(tok) < 2 or tok[0] != '"' or tok[-1] != '"':
        raise BuildError(f"expected a quoted string, found {tok!r}")
    return tok[1:-1]


def _number(tok: str):
    try:
        return Fraction(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError:
            raise BuildError(f"bad number {tok!r}") from None
