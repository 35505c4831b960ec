"""Seeded random instances: rational automata and small DFAs."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .dfa import Dfa, minimize
from .linalg import Matrix
from .qfa import END, LQFA, MOnQFA, Observable

# primitive Pythagorean triples give rational points on the unit circle
_TRIPLES = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25), (20, 21, 29), (12, 35, 37)]


def rational_orthogonal(n: int, rng: random.Random, rotations: int | None = None) -> list[list[Fraction]]:
    """Random orthogonal matrix with rational entries (product of Givens rotations)."""
    q = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    if n == 1:
        return [[Fraction(rng.choice((1, -1)))]]
    for _ in range(rotations if rotations is not None else 2 * n):
        i, j = rng.sample(range(n), 2)
        a, b, h = rng.choice(_TRIPLES)
        c, s = Fraction(a, h), Fraction(b, h) * rng.choice((1, -1))
        for row in q:
            x, y = row[i], row[j]
            row[i], row[j] = c * x - s * y, s * x + c * y
    return q


def random_observable(n: int, rng: random.Random, max_parts: int | None = None) -> Observable:
    """Projectors onto a random partition of a random rational orthonormal basis."""
    basis = rational_orthogonal(n, rng)
    parts = rng.randint(1, min(n, max_parts or n))
    owner = [rng.randrange(parts) for _ in range(n)]
    for p in range(parts):  # make every part nonempty
        owner[p] = p
    rng.shuffle(owner)
    results = []
    for p in range(parts):
        rows = [[Fraction(0)] * n for _ in range(n)]
        for k in range(n):
            if owner[k] == p:
                v = basis[k]
                for i in range(n):
                    for j in range(n):
                        rows[i][j] += v[i] * v[j]
        results.append((p, Matrix.from_rows(rows, exact=True)))
    return Observable(tuple(results))


def random_monqfa(alphabet: Sequence[str], dim: int, rng: random.Random) -> MOnQFA:
    alphabet = tuple(sorted(set(alphabet)))
    obs = {c: random_observable(dim, rng) for c in alphabet}
    obs[END] = random_observable(dim, rng)
    labels = list(obs[END].labels)
    accepting = {lab for lab in labels if rng.random() < 0.5} or {labels[-1]}
    initial = Matrix.from_rows([rational_orthogonal(dim, rng)[0]], exact=True)
    return MOnQFA(alphabet, obs, initial, accepting)


def random_lqfa(alphabet: Sequence[str], dim: int, rng: random.Random) -> LQFA:
    base = random_monqfa(alphabet, dim, rng)
    unitaries = {c: Matrix.from_rows(rational_orthogonal(dim, rng), exact=True)
                 for c in (*base.alphabet, END)}
    return LQFA(base.alphabet, base.observables, base.initial, base.accepting, unitaries)


def random_dfa(rng: random.Random, max_states: int = 6, max_letters: int = 3) -> Dfa:
    """Random complete DFA. Half the draws are biased towards forward edges,
    so that acyclic (finite-variation) automata show up regularly."""
    n = rng.randint(1, max_states)
    k = rng.randint(1, max_letters)
    alphabet = "abc"[:k]
    forward = rng.random() < 0.5
    trans = []
    for q in range(n):
        row = []
        for _ in alphabet:
            if forward and rng.random() < 0.9:
                row.append(rng.randint(q, n - 1))
            else:
                row.append(rng.randrange(n))
        trans.append(row)
    finals = {q for q in range(n) if rng.random() < 0.5}
    return Dfa(alphabet, trans, 0, finals)


def random_minimal_dfas(count: int, seed: int, max_states: int = 6, max_letters: int = 3) -> list[Dfa]:
    rng = random.Random(seed)
    return [minimize(random_dfa(rng, max_states, max_letters)) for _ in range(count)]
