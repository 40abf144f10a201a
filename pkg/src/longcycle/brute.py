"""Exact longest cycle by exhaustive backtracking, for small graphs only."""

from __future__ import annotations

from typing import Optional

from .graph import HostGraph

GUARD_N = 16


class GraphTooLarge(ValueError):
    pass


def _check(graph: HostGraph, override: bool) -> None:
    if graph.n > GUARD_N and not override:
        raise GraphTooLarge(f"n={graph.n} exceeds the brute-force guard of {GUARD_N}")


def _search(graph: HostGraph, stop_at: Optional[int]):
    """Best ``(length, cycle)``; returns early once a cycle reaches ``stop_at``.

    Each cycle is enumerated from its minimum vertex, so paths only extend
    to larger vertices and close back on the start.
    """
    adj = graph.adjacency
    masks = [0] * graph.n
    for v, nbrs in enumerate(adj):
        for w in nbrs:
            masks[v] |= 1 << w
    best_len, best = 0, None
    cap = graph.n

    for s in range(graph.n):
        if cap - s < 3 or cap - s <= best_len:
            break
        path = [s]
        # frames of (vertex, iterator over candidate next vertices)
        stack = [iter([w for w in adj[s] if w > s])]
        visited = 1 << s
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                visited &= ~(1 << path.pop())
                continue
            if visited >> nxt & 1:
                continue
            path.append(nxt)
            visited |= 1 << nxt
            if len(path) >= 3 and masks[nxt] >> s & 1 and len(path) > best_len:
                best_len, best = len(path), tuple(path)
                if stop_at is not None and best_len >= stop_at:
                    return best_len, best
                if best_len == cap - s:
                    return best_len, best
            stack.append(iter([w for w in adj[nxt] if w > s and not visited >> w & 1]))
    return best_len, best


def longest_cycle_brute_force(graph: HostGraph, override: bool = False) -> tuple[int, Optional[tuple[int, ...]]]:
    """Length of a longest cycle and a witness vertex sequence; ``(0, None)`` if acyclic."""
    _check(graph, override)
    return _search(graph, None)


def cycle_exists_of_length_at_least(graph: HostGraph, L: int, override: bool = False) -> bool:
    _check(graph, override)
    if L > graph.n:
        return False
    length, _ = _search(graph, max(L, 3))
    return length >= max(L, 3)
