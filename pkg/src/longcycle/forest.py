"""Queries and classifications on the DFS forest."""

from __future__ import annotations

import enum
import math
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Collection, Iterator, Optional

import numpy as np

from .dfs import NO_PARENT, RootedForest
from .graph import HostGraph
from .percolation import PercolationOracle


class ThresholdError(ValueError):
    pass


class EpsOutOfRange(ThresholdError):
    pass


def _exact(x: float) -> Fraction:
    # shortest repr, so 0.05 becomes exactly 1/20
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class Thresholds:
    """Integer cutoffs derived once from ``(eps, k)``.

    Lower bounds on counts are rounded up, upper bounds down.
    """

    eps: float
    k: int
    t_full: int
    t_rich: int
    d_cut: int
    t_light: int
    len_path: int
    bad_max: int
    chord_min: int
    m_max: int
    long_cut: int

    @classmethod
    def from_eps(cls, eps: float, k: int) -> "Thresholds":
        e = _exact(eps)
        if not 0 < e <= Fraction(1, 10):
            raise EpsOutOfRange(f"eps must lie in (0, 1/10], got {eps}")
        if k < 1:
            raise ThresholdError(f"k must be positive, got {k}")
        th = cls(
            eps=float(eps),
            k=k,
            t_full=math.ceil((1 - e) * k),
            t_rich=math.ceil(e * k),
            d_cut=math.floor((1 - 5 * e) * k),
            t_light=math.floor((1 - 4 * e) * k),
            len_path=math.ceil(k / e**2),
            bad_max=math.floor(e**2 * k),
            chord_min=math.ceil(e * k),
            m_max=math.floor(10 / e),
            long_cut=math.ceil((1 - 5 * e) * k),
        )
        if th.chord_min > th.d_cut:
            raise ThresholdError(
                f"k={k} too small for eps={eps}: chord span range "
                f"[{th.chord_min}, {th.d_cut}] is empty"
            )
        return th


@dataclass(frozen=True, eq=False)
class ClassificationTable:
    """Per-vertex arrays; ``subtree_size`` counts the vertex itself."""

    untested_degree: np.ndarray
    is_full: np.ndarray
    subtree_size: np.ndarray
    is_rich: np.ndarray
    trunc_desc_count: np.ndarray
    is_light: np.ndarray
    height: np.ndarray

    @property
    def n(self) -> int:
        return len(self.height)

    @property
    def full_count(self) -> int:
        return int(self.is_full.sum())

    @property
    def poor_count(self) -> int:
        return int((~self.is_rich).sum())

    @property
    def heavy_count(self) -> int:
        return int((~self.is_light).sum())


def ancestors(forest: RootedForest, v: int) -> Iterator[int]:
    """Strict ancestors of ``v``, nearest first."""
    parent = forest.parent
    u = parent[v]
    while u != NO_PARENT:
        yield u
        u = parent[u]


def vertical_distance(forest: RootedForest, u: int, v: int) -> Optional[int]:
    """Depth difference of a comparable pair, or None if neither is an ancestor of the other."""
    if u == v:
        return 0
    if forest.is_ancestor(u, v):
        return forest.depth[v] - forest.depth[u]
    if forest.is_ancestor(v, u):
        return forest.depth[u] - forest.depth[v]
    return None


def trunc_desc_count(forest: RootedForest, v: int, m: int) -> int:
    """Number of descendants of ``v`` within distance ``m`` (breadth-first, stops at depth m)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    count = 0
    frontier = deque([(v, 0)])
    children = forest.children
    while frontier:
        u, d = frontier.popleft()
        if d == m:
            continue
        for c in children[u]:
            count += 1
            frontier.append((c, d + 1))
    return count


def _heights(forest: RootedForest) -> list[int]:
    height = [0] * forest.n
    parent = forest.parent
    for v in reversed(forest.discovery_order):
        u = parent[v]
        if u != NO_PARENT and height[v] + 1 > height[u]:
            height[u] = height[v] + 1
    return height


def _trunc_counts(forest: RootedForest, m: int) -> list[int]:
    """``trunc_desc_count(v, m)`` for every ``v`` in linear time.

    Each ``w`` adds one to its ancestors at distances ``1..m``: +1 at the
    parent, -1 at the ancestor ``m + 1`` levels up, then subtree sums.
    """
    n = forest.n
    diff = [0] * n
    parent, depth = forest.parent, forest.depth
    path: list[int] = []
    for w in forest.discovery_order:
        dw = depth[w]
        del path[dw:]
        path.append(w)
        if dw == 0:
            continue
        diff[parent[w]] += 1
        if dw >= m + 1:
            diff[path[dw - m - 1]] -= 1
    for w in reversed(forest.discovery_order):
        u = parent[w]
        if u != NO_PARENT:
            diff[u] += diff[w]
    return diff


def compute_classifications(
    host: HostGraph,
    oracle: PercolationOracle,
    forest: RootedForest,
    thresholds: Thresholds,
) -> ClassificationTable:
    untested = oracle.untested_degrees()
    size = np.asarray(forest.subtree_size, dtype=np.int64)
    trunc = np.asarray(_trunc_counts(forest, thresholds.d_cut), dtype=np.int64)
    return ClassificationTable(
        untested_degree=untested,
        is_full=untested >= thresholds.t_full,
        subtree_size=size,
        is_rich=(size - 1) >= thresholds.t_rich,
        trunc_desc_count=trunc,
        is_light=trunc <= thresholds.t_light,
        height=np.asarray(_heights(forest), dtype=np.int64),
    )


def height_histogram(forest: RootedForest) -> dict[int, int]:
    return dict(sorted(Counter(_heights(forest)).items()))


def fraction_height_at_least(forest: RootedForest, threshold: float) -> float:
    if forest.n == 0:
        return 0.0
    return sum(1 for h in _heights(forest) if h >= threshold) / forest.n


@dataclass(frozen=True)
class VerticalPath:
    """Parent chain listed top to bottom."""

    vertices: tuple[int, ...]
    top_depth: int

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    @property
    def top(self) -> int:
        return self.vertices[0]

    @property
    def bottom(self) -> int:
        return self.vertices[-1]

    def position(self, forest: RootedForest, v: int) -> int:
        """Index of ``v`` counted from the top; raises if ``v`` is off the path."""
        i = forest.depth[v] - self.top_depth
        if not 0 <= i < len(self.vertices) or self.vertices[i] != v:
            raise ValueError(f"vertex {v} is not on the path")
        return i

    def contains(self, forest: RootedForest, v: int) -> bool:
        i = forest.depth[v] - self.top_depth
        return 0 <= i < len(self.vertices) and self.vertices[i] == v

    def at_depth(self, depth: int) -> int:
        return self.vertices[depth - self.top_depth]

    @classmethod
    def between(cls, forest: RootedForest, top: int, bottom: int) -> "VerticalPath":
        chain = [bottom]
        while chain[-1] != top:
            u = forest.parent[chain[-1]]
            if u == NO_PARENT:
                raise ValueError(f"{top} is not an ancestor of {bottom}")
            chain.append(u)
        chain.reverse()
        return cls(tuple(chain), forest.depth[top])


class PathStatus(enum.Enum):
    FOUND = "found"
    NOT_FOUND = "not_found"
    BAD_COUNT_EXCEEDED = "bad_count_exceeded"


@dataclass(frozen=True)
class PathSearch:
    status: PathStatus
    path: Optional[VerticalPath] = None
    bad_count: Optional[int] = None

    @property
    def found(self) -> bool:
        return self.status is PathStatus.FOUND


def min_bad_window(forest: RootedForest, bad: Collection[int], length: int):
    """Vertical path with ``length`` edges minimizing the number of bad vertices.

    Every such path is a window of ``length + 1`` consecutive entries on some
    root-to-leaf chain; one preorder pass keeps the current root path and a
    prefix count of bad vertices along it. Returns ``(bottom, bad_count)``
    for the first minimizer in preorder, or None.
    """
    bad_flag = bytearray(forest.n)
    for v in bad:
        bad_flag[v] = 1
    depth = forest.depth
    prefix = [0]  # prefix[i] = bad vertices among the first i path entries
    best = None
    for w in forest.discovery_order:
        dw = depth[w]
        del prefix[dw + 1:]
        prefix.append(prefix[dw] + bad_flag[w])
        if dw >= length:
            count = prefix[dw + 1] - prefix[dw - length]
            if best is None or count < best[1]:
                best = (w, count)
                if count == 0:
                    break
    return best


def find_vertical_path(forest: RootedForest, bad_set: Collection[int], thresholds: Thresholds) -> PathSearch:
    best = min_bad_window(forest, bad_set, thresholds.len_path)
    if best is None:
        return PathSearch(PathStatus.NOT_FOUND)
    bottom, count = best
    top = bottom
    for _ in range(thresholds.len_path):
        top = forest.parent[top]
    path = VerticalPath.between(forest, top, bottom)
    status = PathStatus.FOUND if count <= thresholds.bad_max else PathStatus.BAD_COUNT_EXCEEDED
    return PathSearch(status, path, count)
