"""Immutable simple undirected host graphs, generators and edge-list I/O."""

from __future__ import annotations

import itertools
import random
from bisect import bisect_left
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

import numpy as np

MAX_HYPERCUBE_DIM = 24
REGULAR_RETRY_CAP = 1000


class GraphError(ValueError):
    pass


class IndexOutOfRange(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class DimensionTooLarge(GraphError):
    pass


class ParityViolation(GraphError):
    pass


class RejectionBudgetExhausted(GraphError):
    pass


class BadOffset(GraphError):
    pass


class ParseError(GraphError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class EdgeKey(NamedTuple):
    """Canonical unordered vertex pair, ``lo < hi``."""

    lo: int
    hi: int

    @classmethod
    def of(cls, u: int, v: int) -> "EdgeKey":
        return cls(u, v) if u < v else cls(v, u)


class HostGraph:
    """Simple undirected graph on vertices ``0..n-1``.

    Neighbor lists are strictly ascending tuples. Instances are never mutated
    after construction, so they can be shared freely between trials.
    """

    def __init__(self, n: int, adjacency: Sequence[tuple[int, ...]]):
        # trusted constructor: callers pass canonical adjacency
        self._n = n
        self._adj = tuple(adjacency)
        self._edge_count = sum(len(a) for a in self._adj) // 2
        self._min_degree = min((len(a) for a in self._adj), default=0)

    @property
    def n(self) -> int:
        return self._n

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @property
    def min_degree(self) -> int:
        return self._min_degree

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        if not (0 <= u < self._n and 0 <= v < self._n):
            return False
        nbrs = self._adj[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def edges(self) -> Iterator[EdgeKey]:
        """Edges as canonical pairs in lexicographic order."""
        for u, nbrs in enumerate(self._adj):
            for w in nbrs[bisect_left(nbrs, u + 1):]:
                yield EdgeKey(u, w)

    def edge_key(self, u: int, v: int) -> int:
        """Integer encoding ``lo * n + hi`` used as a dictionary key."""
        return u * self._n + v if u < v else v * self._n + u

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` of the symmetric adjacency structure."""
        degs = np.fromiter((len(a) for a in self._adj), dtype=np.int64, count=self._n)
        indptr = np.zeros(self._n + 1, dtype=np.int64)
        np.cumsum(degs, out=indptr[1:])
        indices = np.fromiter(
            (w for a in self._adj for w in a), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, indices

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.csr[0])

    def __eq__(self, other):
        if not isinstance(other, HostGraph):
            return NotImplemented
        return self._n == other._n and self._adj == other._adj

    def __hash__(self):
        return hash((self._n, self._adj))

    def __repr__(self):
        return f"HostGraph(n={self._n}, edges={self._edge_count}, min_degree={self._min_degree})"

    def __getstate__(self):
        return {"n": self._n, "adj": self._adj}

    def __setstate__(self, state):
        self.__init__(state["n"], state["adj"])


def _from_neighbor_sets(n: int, nbrs: Sequence[Iterable[int]]) -> HostGraph:
    pool = tuple(range(n))
    return HostGraph(n, [tuple(pool[w] for w in sorted(s)) for s in nbrs])


def build_from_edges(n: int, edges: Iterable[tuple[int, int]]) -> HostGraph:
    if n < 0:
        raise IndexOutOfRange(f"negative vertex count {n}")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise IndexOutOfRange(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        if v in nbrs[u]:
            raise DuplicateEdge(f"edge ({u}, {v}) listed twice")
        nbrs[u].add(v)
        nbrs[v].add(u)
    return _from_neighbor_sets(n, nbrs)


def gen_complete(n: int) -> HostGraph:
    if n < 1:
        raise GraphError("complete graph needs n >= 1")
    pool = tuple(range(n))
    return HostGraph(n, [pool[:v] + pool[v + 1:] for v in range(n)])


def gen_hypercube(d: int) -> HostGraph:
    if d < 1:
        raise GraphError("hypercube dimension must be >= 1")
    if d > MAX_HYPERCUBE_DIM:
        raise DimensionTooLarge(f"dimension {d} exceeds {MAX_HYPERCUBE_DIM}")
    n = 1 << d
    pool = tuple(range(n))
    adj = []
    for v in range(n):
        adj.append(tuple(pool[w] for w in sorted(v ^ (1 << b) for b in range(d))))
    return HostGraph(n, adj)


def gen_random_regular(n: int, d: int, seed: int) -> HostGraph:
    """Simple d-regular graph by pairing-model sampling with rejection.

    Points are paired at random; a pair forming a loop or a repeated edge is
    rejected and its points go back into the pool to be re-paired. When the
    leftover points admit no legal pair the attempt restarts from scratch, at
    most ``REGULAR_RETRY_CAP`` times.
    """
    if (n * d) % 2:
        raise ParityViolation(f"n*d = {n * d} is odd")
    if not 0 <= d < n:
        raise GraphError(f"need 0 <= d < n, got d={d}, n={n}")
    rng = random.Random(seed)
    for _ in range(REGULAR_RETRY_CAP):
        nbrs = _try_pairing(n, d, rng)
        if nbrs is not None:
            return _from_neighbor_sets(n, nbrs)
    raise RejectionBudgetExhausted(
        f"no simple pairing for n={n}, d={d} in {REGULAR_RETRY_CAP} attempts"
    )


def _try_pairing(n: int, d: int, rng: random.Random) -> Optional[list[set[int]]]:
    nbrs: list[set[int]] = [set() for _ in range(n)]
    stubs = [v for v in range(n) for _ in range(d)]
    while stubs:
        rng.shuffle(stubs)
        rejected = []
        for i in range(0, len(stubs), 2):
            u, v = stubs[i], stubs[i + 1]
            if u == v or v in nbrs[u]:
                rejected += (u, v)
            else:
                nbrs[u].add(v)
                nbrs[v].add(u)
        left = sorted(set(rejected))
        if rejected and not any(b not in nbrs[a] for a, b in itertools.combinations(left, 2)):
            return None
        stubs = rejected
    return nbrs


def gen_circulant(n: int, offsets: Iterable[int]) -> HostGraph:
    offsets = list(offsets)
    if len(set(offsets)) != len(offsets):
        raise BadOffset(f"repeated offset in {offsets}")
    for s in offsets:
        if not 1 <= s <= n // 2:
            raise BadOffset(f"offset {s} outside [1, {n // 2}]")
    nbrs = [set() for _ in range(n)]
    for v in range(n):
        for s in offsets:
            nbrs[v].add((v + s) % n)
            nbrs[v].add((v - s) % n)
    return _from_neighbor_sets(n, nbrs)


def parse_edge_list(text: str) -> HostGraph:
    """Parse the edge-list format: a vertex count line, then ``u v`` lines.

    Lines starting with ``#`` and blank lines are skipped. Pairs may be given
    in either orientation; the result is canonical.
    """
    n = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            nums = [int(x) for x in parts]
        except ValueError:
            raise ParseError(lineno, f"not an integer line: {raw!r}") from None
        if n is None:
            if len(nums) != 1 or nums[0] < 0:
                raise ParseError(lineno, "first line must be a single vertex count")
            n = nums[0]
            continue
        if len(nums) != 2:
            raise ParseError(lineno, f"expected 'u v', got {raw!r}")
        u, v = nums
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(lineno, f"vertex out of range [0, {n})")
        if u == v:
            raise ParseError(lineno, f"self-loop at vertex {u}")
        key = EdgeKey.of(u, v)
        if key in seen:
            raise ParseError(lineno, f"duplicate edge {key.lo} {key.hi}")
        seen.add(key)
        edges.append(key)
    if n is None:
        raise ParseError(0, "missing vertex count line")
    return build_from_edges(n, edges)


def serialize_edge_list(graph: HostGraph) -> str:
    lines = [str(graph.n)]
    lines.extend(f"{e.lo} {e.hi}" for e in graph.edges())
    return "\n".join(lines) + "\n"


def read_edge_list(path) -> HostGraph:
    with open(path, encoding="ascii") as fh:
        return parse_edge_list(fh.read())


def write_edge_list(graph: HostGraph, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(serialize_edge_list(graph))
