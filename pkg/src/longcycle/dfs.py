"""Depth-first exploration of G_p and the rooted spanning forest it reveals."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .graph import HostGraph
from .percolation import PercolationOracle

NO_PARENT = -1


class OracleNotFresh(RuntimeError):
    pass


@dataclass(frozen=True)
class RootedForest:
    """Rooted forest on ``0..n-1``; ``parent[v] == NO_PARENT`` marks a root.

    ``discovery_order`` is the preorder visiting roots and children in
    ascending order, so the subtree of ``v`` occupies the contiguous slice
    ``[tin[v], tin[v] + subtree_size[v])`` of it.
    """

    parent: tuple[int, ...]
    depth: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]
    roots: tuple[int, ...]
    discovery_order: tuple[int, ...]

    @classmethod
    def from_parents(cls, parent: Sequence[int]) -> "RootedForest":
        n = len(parent)
        kids: list[list[int]] = [[] for _ in range(n)]
        roots = []
        for v, u in enumerate(parent):
            if u == NO_PARENT:
                roots.append(v)
            elif 0 <= u < n and u != v:
                kids[u].append(v)
            else:
                raise ValueError(f"bad parent {u} for vertex {v}")
        depth = [0] * n
        order = []
        stack = list(reversed(roots))
        while stack:
            v = stack.pop()
            order.append(v)
            for c in reversed(kids[v]):
                depth[c] = depth[v] + 1
                stack.append(c)
        if len(order) != n:
            raise ValueError("parent array contains a cycle")
        return cls(tuple(parent), tuple(depth), tuple(tuple(c) for c in kids),
                   tuple(roots), tuple(order))

    @property
    def n(self) -> int:
        return len(self.parent)

    @cached_property
    def tin(self) -> tuple[int, ...]:
        tin = [0] * self.n
        for i, v in enumerate(self.discovery_order):
            tin[v] = i
        return tuple(tin)

    @cached_property
    def subtree_size(self) -> tuple[int, ...]:
        size = [1] * self.n
        parent = self.parent
        for v in reversed(self.discovery_order):
            if parent[v] != NO_PARENT:
                size[parent[v]] += size[v]
        return tuple(size)

    @cached_property
    def arrays(self) -> dict[str, np.ndarray]:
        tin = np.asarray(self.tin, dtype=np.int64)
        return {
            "parent": np.asarray(self.parent, dtype=np.int64),
            "depth": np.asarray(self.depth, dtype=np.int64),
            "tin": tin,
            "tout": tin + np.asarray(self.subtree_size, dtype=np.int64),
        }

    def is_ancestor(self, u: int, v: int) -> bool:
        """True iff ``u`` is a strict ancestor of ``v``."""
        tu, tv = self.tin[u], self.tin[v]
        return tu < tv < tu + self.subtree_size[u]

    def tree_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for v, u in enumerate(self.parent) if u != NO_PARENT]

    def is_tree_edge(self, u: int, v: int) -> bool:
        return self.parent[v] == u or self.parent[u] == v


@dataclass(frozen=True)
class ExplorationResult:
    forest: RootedForest
    tested_count: int
    component_count: int


StackHook = Callable[[tuple[int, ...]], None]
Tracer = Callable[[str], None]


def explore(
    host: HostGraph,
    oracle: PercolationOracle,
    on_stack: Optional[StackHook] = None,
    tracer: Optional[Tracer] = None,
) -> ExplorationResult:
    """Run the stack-based DFS over G_p, testing edges only toward unreached vertices.

    Roots and neighbor probes go in ascending vertex order. ``on_stack``
    receives a snapshot of the stack after every push and pop; ``tracer``
    receives ``PUSH v`` / ``POP v`` / ``TEST u v RESULT`` lines.
    """
    if oracle.tested_count:
        raise OracleNotFresh(f"oracle already has {oracle.tested_count} tested edges")
    if oracle.host is not host:
        raise ValueError("oracle belongs to a different host graph")
    n = host.n
    adj = host.adjacency
    reveal = oracle.reveal
    parent = [NO_PARENT] * n
    reached = bytearray(n)
    stack: list[int] = []
    iters: list = []
    components = 0
    next_root = 0
    observe = on_stack is not None or tracer is not None

    while True:
        if not stack:
            while next_root < n and reached[next_root]:
                next_root += 1
            if next_root == n:
                break
            v = next_root
            reached[v] = 1
            components += 1
            stack.append(v)
            iters.append(iter(adj[v]))
            if observe:
                _emit(on_stack, tracer, stack, f"PUSH {v}")
            continue
        u = stack[-1]
        it = iters[-1]
        for w in it:
            if reached[w]:
                continue
            hit = reveal(u, w)
            if tracer is not None:
                tracer(f"TEST {u} {w} {'PRESENT' if hit else 'ABSENT'}")
            if hit:
                reached[w] = 1
                parent[w] = u
                stack.append(w)
                iters.append(iter(adj[w]))
                if observe:
                    _emit(on_stack, tracer, stack, f"PUSH {w}")
                break
        else:
            stack.pop()
            iters.pop()
            if observe:
                _emit(on_stack, tracer, stack, f"POP {u}")

    if oracle.present_count != n - components:
        raise AssertionError(
            f"counting identity broken: {oracle.present_count} present, "
            f"{n} vertices, {components} components"
        )
    return ExplorationResult(RootedForest.from_parents(parent), oracle.tested_count, components)


def _emit(on_stack, tracer, stack, line):
    if tracer is not None:
        tracer(line)
    if on_stack is not None:
        on_stack(tuple(stack))


def verify_vertical_property(host: HostGraph, oracle: PercolationOracle, forest: RootedForest) -> bool:
    """Check that every untested host edge joins an ancestor-descendant pair."""
    n = host.n
    if n == 0:
        return True
    indptr, indices = host.csr
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    upper = rows < indices
    u, v = rows[upper], indices[upper]
    keys, _ = oracle.tested_key_array()
    untested = ~np.isin(u * n + v, keys)
    u, v = u[untested], v[untested]
    a = forest.arrays
    tin, tout = a["tin"], a["tout"]
    u_over_v = (tin[u] < tin[v]) & (tin[v] < tout[u])
    v_over_u = (tin[v] < tin[u]) & (tin[u] < tout[v])
    return bool(np.all(u_over_v | v_over_u))
