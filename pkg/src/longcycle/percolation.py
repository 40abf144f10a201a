"""Lazy Bernoulli(p) edge revelation over a host graph.

Each host edge gets its coin flipped the first time it is tested and never
again. Uniforms come from a Philox stream (counter-based), consumed in the
order edges are first tested, so a trial is reproducible from its seed and
its sequence of test calls alone.
"""

from __future__ import annotations

import enum
from typing import Iterator

import numpy as np

from .graph import EdgeKey, HostGraph

_MASK64 = (1 << 64) - 1
_BLOCK = 4096


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed.

    ``h = 0; for part in parts: h = splitmix64(h ^ (part mod 2**64))``.
    Used as ``mix_seed(base_seed, trial)`` for percolation streams and
    ``mix_seed(base_seed, trial, 1)`` for per-trial random hosts.
    """
    h = 0
    for part in parts:
        h = splitmix64(h ^ (part & _MASK64))
    return h


class EdgeStatus(enum.Enum):
    UNTESTED = "untested"
    PRESENT = "present"
    ABSENT = "absent"


class NotAHostEdge(KeyError):
    pass


class PercolationOracle:
    def __init__(self, host: HostGraph, p: float, seed: int):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        self.host = host
        self.p = float(p)
        self.seed = seed
        self._gen = np.random.Generator(np.random.Philox(key=seed & ((1 << 128) - 1)))
        self._buf: list[float] = []
        self._pos = 0
        self._state: dict[int, bool] = {}
        self.present_count = 0
        self.draws = 0

    @property
    def tested_count(self) -> int:
        return len(self._state)

    @property
    def absent_count(self) -> int:
        return len(self._state) - self.present_count

    def _uniform(self) -> float:
        if self._pos == len(self._buf):
            self._buf = self._gen.random(_BLOCK).tolist()
            self._pos = 0
        x = self._buf[self._pos]
        self._pos += 1
        self.draws += 1
        return x

    def reveal(self, u: int, v: int) -> bool:
        """``test_edge`` without the host-membership check.

        The caller guarantees ``uv`` is a host edge.
        """
        key = u * self.host.n + v if u < v else v * self.host.n + u
        hit = self._state.get(key)
        if hit is None:
            hit = self._uniform() < self.p
            self._state[key] = hit
            if hit:
                self.present_count += 1
        return hit

    def test_edge(self, u: int, v: int) -> bool:
        """Return True if ``uv`` is present in G_p, flipping its coin on first use."""
        if not self.host.has_edge(u, v):
            raise NotAHostEdge((u, v))
        return self.reveal(u, v)

    def status(self, u: int, v: int) -> EdgeStatus:
        if not self.host.has_edge(u, v):
            raise NotAHostEdge((u, v))
        hit = self._state.get(self.host.edge_key(u, v))
        if hit is None:
            return EdgeStatus.UNTESTED
        return EdgeStatus.PRESENT if hit else EdgeStatus.ABSENT

    def is_untested(self, u: int, v: int) -> bool:
        """True iff ``uv`` is a host edge whose coin has not been flipped."""
        return self.host.has_edge(u, v) and self.host.edge_key(u, v) not in self._state

    def is_present(self, u: int, v: int) -> bool:
        return self._state.get(self.host.edge_key(u, v), False) is True

    def untested_incident(self, v: int) -> list[int]:
        n = self.host.n
        state = self._state
        return [w for w in self.host.adjacency[v]
                if (v * n + w if v < w else w * n + v) not in state]

    def statuses(self) -> Iterator[tuple[EdgeKey, EdgeStatus]]:
        for e in self.host.edges():
            yield e, self.status(e.lo, e.hi)

    def tested_items(self) -> Iterator[tuple[EdgeKey, bool]]:
        n = self.host.n
        for key, hit in self._state.items():
            yield EdgeKey(key // n, key % n), hit

    def tested_key_array(self) -> tuple[np.ndarray, np.ndarray]:
        """Encoded keys of tested edges and a parallel presence mask."""
        keys = np.fromiter(self._state.keys(), dtype=np.int64, count=len(self._state))
        hits = np.fromiter(self._state.values(), dtype=bool, count=len(self._state))
        return keys, hits

    def tested_per_vertex(self) -> np.ndarray:
        n = self.host.n
        keys, _ = self.tested_key_array()
        return np.bincount(keys // n, minlength=n) + np.bincount(keys % n, minlength=n)

    def untested_degrees(self) -> np.ndarray:
        return self.host.degrees - self.tested_per_vertex()
