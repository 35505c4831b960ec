"""Strongly connected components of small directed graphs."""

from __future__ import annotations

from typing import Sequence


def strongly_connected_components(succ: Sequence[Sequence[int]]) -> list[int]:
    """Iterative Tarjan. Returns a component id per vertex.

    Component ids are assigned in reverse topological order of the
    condensation: an edge u -> v between different components always has
    ``comp[u] > comp[v]``.
    """
    n = len(succ)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            edges = succ[v]
            if i < len(edges):
                work[-1] = (v, i + 1)
                u = edges[i]
                if index[u] < 0:
                    index[u] = low[u] = counter
                    counter += 1
                    stack.append(u)
                    on_stack[u] = True
                    work.append((u, 0))
                elif on_stack[u]:
                    low[v] = min(low[v], index[u])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                while True:
                    x = stack.pop()
                    on_stack[x] = False
                    comp[x] = ncomp
                    if x == v:
                        break
                ncomp += 1
    return comp


def components(succ: Sequence[Sequence[int]]) -> list[list[int]]:
    comp = strongly_connected_components(succ)
    groups: dict[int, list[int]] = {}
    for v, c in enumerate(comp):
        groups.setdefault(c, []).append(v)
    return [groups[c] for c in sorted(groups)]
