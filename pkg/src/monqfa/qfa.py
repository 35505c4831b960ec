"""Measure-only one-way quantum finite automata and their Latvian extension.

A word is read left to right. Every letter triggers a projective measurement
given by an :class:`Observable`; after the last letter the end-marker ``#``
observable is measured and the word is accepted when the outcome label lies
in the accepting set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from .linalg import (
    DEFAULT_TOL,
    LinalgError,
    Matrix,
    is_projector,
    is_unitary,
    norm_sq,
    real_value,
)

END = "#"
DEFAULT_BRANCH_LIMIT = 2 ** 20


class QfaError(ValueError):
    """Invalid automaton data or an input word outside the alphabet."""


class BranchOverflowError(QfaError):
    """Branch enumeration would exceed the configured limit."""


@dataclass(frozen=True)
class Observable:
    """Complete family of pairwise orthogonal projectors with distinct labels."""

    results: tuple[tuple[Hashable, Matrix], ...]
    tol: float = field(default=DEFAULT_TOL, compare=False, repr=False)

    def __post_init__(self):
        results = tuple((lab, p) for lab, p in self.results)
        object.__setattr__(self, "results", results)
        if not results:
            raise QfaError("an observable needs at least one projector")
        labels = [lab for lab, _ in results]
        if len(set(labels)) != len(labels):
            raise QfaError(f"duplicate result labels {labels}")
        dim = results[0][1].rows
        total = Matrix.zeros(dim, dim, all(p.exact for _, p in results))
        for lab, p in results:
            if p.shape != (dim, dim):
                raise QfaError(f"projector {lab!r} has shape {p.shape}, expected {(dim, dim)}")
            try:
                ok = is_projector(p, self.tol)
            except LinalgError as exc:
                raise QfaError(str(exc)) from exc
            if not ok:
                raise QfaError(f"result {lab!r} is not an orthogonal projector")
            total = total + p
        for i, (la, pa) in enumerate(results):
            for lb, pb in results[i + 1:]:
                if not (pa @ pb).is_zero(self.tol):
                    raise QfaError(f"projectors {la!r} and {lb!r} are not orthogonal")
        if not total.close_to(Matrix.identity(dim, total.exact), self.tol):
            raise QfaError("projectors do not sum to the identity")

    @classmethod
    def identity(cls, dim: int, label: Hashable = 0, exact: bool = True) -> "Observable":
        return cls(((label, Matrix.identity(dim, exact)),))

    @classmethod
    def of(cls, projectors: Mapping[Hashable, Matrix] | Sequence[Matrix], tol: float = DEFAULT_TOL):
        """Build from a label->projector map, or a list labelled 0, 1, ..."""
        if isinstance(projectors, Mapping):
            items = tuple(projectors.items())
        else:
            items = tuple(enumerate(projectors))
        return cls(items, tol)

    @property
    def dim(self) -> int:
        return self.results[0][1].rows

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.results)

    @property
    def projectors(self) -> tuple[Matrix, ...]:
        return tuple(p for _, p in self.results)

    @property
    def exact(self) -> bool:
        return all(p.exact for p in self.projectors)

    def projector(self, label: Hashable) -> Matrix:
        for lab, p in self.results:
            if lab == label:
                return p
        raise KeyError(label)

    def is_trivial(self) -> bool:
        """Single outcome: the measurement never disturbs the state."""
        return len(self.results) == 1


@dataclass(frozen=True)
class Meta:
    """Declared cut-point and isolation of an automaton or event."""

    cutpoint: Fraction | float
    isolation: Fraction | float


class MOnQFA:
    """Measure-only one-way QFA over ``alphabet`` with end-marker ``#``."""

    def __init__(self, alphabet: Iterable[str], observables: Mapping[str, Observable],
                 initial: Matrix, accepting: Iterable[Hashable],
                 meta: Meta | None = None, tol: float = DEFAULT_TOL):
        self.alphabet = tuple(sorted(set(alphabet)))
        if not self.alphabet:
            raise QfaError("alphabet must be nonempty")
        for c in self.alphabet:
            if len(c) != 1 or c == END:
                raise QfaError(f"letters are single characters other than {END!r}, got {c!r}")
        self.observables = dict(observables)
        self.initial = initial
        self.accepting = frozenset(accepting)
        self.meta = meta
        self.tol = tol
        self._validate()

    def _validate(self):
        if self.initial.rows != 1:
            raise QfaError("the initial state must be a row vector")
        m = self.initial.cols
        missing = [c for c in (*self.alphabet, END) if c not in self.observables]
        if missing:
            raise QfaError(f"no observable for {missing}")
        extra = set(self.observables) - set(self.alphabet) - {END}
        if extra:
            raise QfaError(f"observables given for letters outside the alphabet: {sorted(extra)}")
        for c, o in self.observables.items():
            if o.dim != m:
                raise QfaError(f"observable for {c!r} has dimension {o.dim}, expected {m}")
        n2 = norm_sq(self.initial)
        if self.initial.exact:
            if n2 != 1:
                raise QfaError(f"initial state has squared norm {n2}, expected 1")
        elif abs(n2 - 1) > self.tol:
            raise QfaError(f"initial state has squared norm {n2}, expected 1")
        if not self.accepting <= set(self.observables[END].labels):
            raise QfaError("accepting labels must be results of the end-marker observable")

    @property
    def dim(self) -> int:
        return self.initial.cols

    @property
    def exact(self) -> bool:
        return self.initial.exact and all(o.exact for o in self.observables.values())

    def observable(self, c: str) -> Observable:
        try:
            return self.observables[c]
        except KeyError:
            raise QfaError(f"letter {c!r} is not in the alphabet {''.join(self.alphabet)}") from None

    def check_word(self, w: str):
        for c in w:
            if c not in self.alphabet:
                raise QfaError(f"letter {c!r} is not in the alphabet {''.join(self.alphabet)}")

    def accepting_projector(self) -> Matrix:
        obs = self.observables[END]
        out = Matrix.zeros(self.dim, self.dim, obs.exact)
        for lab in self.accepting:
            out = out + obs.projector(lab)
        return out

    def with_accepting(self, accepting: Iterable[Hashable], meta: Meta | None = None) -> "MOnQFA":
        return MOnQFA(self.alphabet, self.observables, self.initial, accepting, meta, self.tol)

    def with_meta(self, meta: Meta | None) -> "MOnQFA":
        return MOnQFA(self.alphabet, self.observables, self.initial, self.accepting, meta, self.tol)

    def __repr__(self):
        return (f"MOnQFA(alphabet={''.join(self.alphabet)!r}, dim={self.dim}, "
                f"accepting={sorted(self.accepting, key=repr)}, meta={self.meta})")

    # -- interchange ------------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "alphabet": list(self.alphabet),
            "dim": self.dim,
            "observables": {
                c: [{"label": lab, "projector": p.to_literal()} for lab, p in o.results]
                for c, o in self.observables.items()
            },
            "initial": self.initial.to_literal()[0],
            "accepting": sorted(self.accepting, key=repr),
        }
        if self.meta is not None:
            doc["meta"] = {"cutpoint": _num_out(self.meta.cutpoint),
                           "isolation": _num_out(self.meta.isolation)}
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping, exact: bool | None = None, tol: float = DEFAULT_TOL) -> "MOnQFA":
        try:
            observables = {
                c: Observable(tuple((_label_in(r["label"]), Matrix.from_literal(r["projector"], exact))
                                    for r in results), tol)
                for c, results in doc["observables"].items()
            }
            initial = Matrix.from_literal([doc["initial"]], exact)
            meta = None
            if doc.get("meta"):
                meta = Meta(_num_in(doc["meta"]["cutpoint"]), _num_in(doc["meta"]["isolation"]))
            a = cls(doc["alphabet"], observables, initial,
                    [_label_in(x) for x in doc["accepting"]], meta, tol)
        except (KeyError, TypeError) as exc:
            raise QfaError(f"malformed automaton document: {exc}") from exc
        if "dim" in doc and doc["dim"] != a.dim:
            raise QfaError(f"declared dim {doc['dim']} does not match the data ({a.dim})")
        return a

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str, exact: bool | None = None) -> "MOnQFA":
        return cls.from_dict(json.loads(text), exact)


def _label_in(x):
    return tuple(x) if isinstance(x, list) else x


def _num_out(x):
    return str(x) if isinstance(x, Fraction) else x


def _num_in(x):
    return Fraction(x) if isinstance(x, (str, int)) else x


class LQFA(MOnQFA):
    """Latvian QFA: per symbol a unitary ``U_c`` followed by the measurement ``O_c``."""

    def __init__(self, alphabet, observables, initial, accepting, unitaries: Mapping[str, Matrix],
                 meta: Meta | None = None, tol: float = DEFAULT_TOL):
        super().__init__(alphabet, observables, initial, accepting, meta, tol)
        self.unitaries = dict(unitaries)
        for c in (*self.alphabet, END):
            u = self.unitaries.get(c)
            if u is None:
                raise QfaError(f"no unitary for {c!r}")
            if u.shape != (self.dim, self.dim) or not is_unitary(u, tol):
                raise QfaError(f"matrix for {c!r} is not a {self.dim}x{self.dim} unitary")


# -- semantics ------------------------------------------------------------

def initial_density(a: MOnQFA) -> Matrix:
    return a.initial.adjoint() @ a.initial


def measure(sigma: Matrix, obs: Observable) -> Matrix:
    """Non-selective measurement: sum over outcomes of ``P sigma P``."""
    if obs.is_trivial():
        return sigma
    out = None
    for p in obs.projectors:
        term = p @ sigma @ p
        out = term if out is None else out + term
    return out


def density_evolve(a: MOnQFA, w: str) -> Matrix:
    """Density matrix after reading ``w`` left to right (before the end-marker)."""
    a.check_word(w)
    sigma = initial_density(a)
    for c in w:
        sigma = measure(sigma, a.observables[c])
    return sigma


def _accepted_mass(a: MOnQFA, sigma: Matrix):
    obs = a.observables[END]
    total = Fraction(0) if sigma.exact and obs.exact else 0.0
    for lab in a.accepting:
        p = obs.projector(lab)
        total += real_value((p @ sigma @ p).trace())
    return total


def accept_prob(a: MOnQFA, w: str):
    """Acceptance probability; a Fraction when the automaton is exact."""
    return _accepted_mass(a, density_evolve(a, w))


def accept_probs_upto(a: MOnQFA, max_len: int, alphabet: Sequence[str] | None = None) -> dict[str, object]:
    """Acceptance probability of every word of length <= ``max_len``.

    Walks the word tree depth first so that each prefix's density matrix is
    computed once; per word the result equals :func:`accept_prob`.
    """
    letters = tuple(alphabet) if alphabet is not None else a.alphabet
    out: dict[str, object] = {}
    stack = [("", initial_density(a))]
    while stack:
        w, sigma = stack.pop()
        out[w] = _accepted_mass(a, sigma)
        if len(w) < max_len:
            for c in letters:
                stack.append((w + c, measure(sigma, a.observable(c))))
    return out


def accept_prob_branches(a: MOnQFA, w: str, limit: int = DEFAULT_BRANCH_LIMIT):
    """Acceptance probability as a sum of squared branch amplitudes.

    Every sequence of outcomes along ``w`` is a branch; its contribution is the
    squared norm of the initial vector after the corresponding projectors and an
    accepting end-marker projector.
    """
    a.check_word(w)
    count = 1
    for c in w:
        count *= len(a.observables[c].results)
    if count > limit:
        raise BranchOverflowError(f"{count} branches exceed the limit {limit}")
    end = a.observables[END]
    finals = [end.projector(lab) for lab in a.accepting]
    total = Fraction(0) if a.exact else 0.0

    def walk(v: Matrix, i: int):
        nonlocal total
        if v.is_zero():
            return
        if i == len(w):
            for p in finals:
                total += norm_sq(v @ p)
            return
        for p in a.observables[w[i]].projectors:
            walk(v @ p, i + 1)

    walk(a.initial, 0)
    return total


def lqfa_accept_prob(l: LQFA, w: str):
    """Acceptance probability of a Latvian automaton."""
    l.check_word(w)
    sigma = initial_density(l)
    for c in w:
        u = l.unitaries[c]
        sigma = measure(u.adjoint() @ sigma @ u, l.observables[c])
    u = l.unitaries[END]
    return _accepted_mass(l, u.adjoint() @ sigma @ u)


def lqfa_accept_prob_branches(l: LQFA, w: str, limit: int = DEFAULT_BRANCH_LIMIT):
    """Branch enumeration for Latvian automata, used as an independent check."""
    l.check_word(w)
    count = 1
    for c in w:
        count *= len(l.observables[c].results)
    if count > limit:
        raise BranchOverflowError(f"{count} branches exceed the limit {limit}")
    end = l.observables[END]
    finals = [end.projector(lab) for lab in l.accepting]
    total = Fraction(0) if l.exact and all(u.exact for u in l.unitaries.values()) else 0.0

    def walk(v: Matrix, i: int):
        nonlocal total
        if i == len(w):
            v = v @ l.unitaries[END]
            for p in finals:
                total += norm_sq(v @ p)
            return
        v = v @ l.unitaries[w[i]]
        for p in l.observables[w[i]].projectors:
            walk(v @ p, i + 1)

    walk(l.initial, 0)
    return total


def classify(a: MOnQFA, cutpoint, w: str) -> bool:
    """True (accept) iff the acceptance probability strictly exceeds ``cutpoint``."""
    if cutpoint <= 0:
        raise QfaError("the cut-point must be positive")
    return accept_prob(a, w) > cutpoint
