"""Long-cycle construction on top of a completed DFS exploration.

Two routes. If some vertex has at least ``chord_min`` untested partners at
vertical distance ``>= long_cut``, probing those edges closes a long cycle
with the tree path directly. Otherwise a low-defect vertical path is chosen
and overlapping chords climbing it are found one probe at a time; the
chords plus path segments form the cycle.
"""

from __future__ import annotations

import enum
from bisect import bisect_right
from dataclasses import dataclass
from typing import Collection, Optional

import numpy as np

from .dfs import ExplorationResult, RootedForest, explore
from .forest import (
    ClassificationTable,
    PathSearch,
    PathStatus,
    Thresholds,
    VerticalPath,
    compute_classifications,
    find_vertical_path,
    vertical_distance,
)
from .graph import HostGraph
from .percolation import PercolationOracle


class MalformedChain(ValueError):
    pass


class NotSingleCycle(AssertionError):
    pass


class Branch(enum.Enum):
    LONG_CONDITION = "LongCondition"
    CHORD_CHAIN = "ChordChain"


class FailureKind(enum.Enum):
    NO_FULL_VERTICES = "NoFullVertices"
    NO_VERTICAL_PATH = "NoVerticalPath"
    BAD_COUNT_EXCEEDED = "BadCountExceeded"
    CHORD_PROBE_FAILED = "ChordProbeFailed"
    TARGET_LENGTH_MISSED = "TargetLengthMissed"


@dataclass(frozen=True)
class Failure:
    kind: FailureKind
    detail: Optional[int] = None  # probe step or best length

    def __str__(self):
        if self.detail is None:
            return self.kind.value
        return f"{self.kind.value}({self.detail})"


@dataclass(frozen=True)
class Chord:
    lower: int
    upper: int
    span: int


@dataclass(frozen=True)
class ChordChain:
    chords: tuple[Chord, ...]
    path: VerticalPath
    failure: Optional[Failure] = None


@dataclass(frozen=True)
class Cycle:
    vertices: tuple[int, ...]

    def __len__(self):
        return len(self.vertices)

    @property
    def length(self) -> int:
        return len(self.vertices)

    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]


@dataclass
class CycleSearchOutcome:
    branch: Optional[Branch] = None
    cycle: Optional[Cycle] = None
    failure: Optional[Failure] = None
    best_length: int = 0
    exploration: Optional[ExplorationResult] = None
    table: Optional[ClassificationTable] = None
    path_search: Optional[PathSearch] = None
    chain: Optional[ChordChain] = None

    @property
    def success(self) -> bool:
        return self.cycle is not None


def _tree_cycle(forest: RootedForest, upper: int, lower: int) -> Cycle:
    chain = [lower]
    while chain[-1] != upper:
        chain.append(forest.parent[chain[-1]])
    return Cycle(tuple(chain))


def long_condition_candidates(oracle: PercolationOracle, forest: RootedForest, v: int,
                              thresholds: Thresholds) -> list[int]:
    """Untested partners of ``v`` at vertical distance >= ``long_cut``, farthest first."""
    found = []
    for u in oracle.untested_incident(v):
        d = vertical_distance(forest, u, v)
        if d is not None and d >= thresholds.long_cut:
            found.append((-d, u))
    found.sort()
    return [u for _, u in found]


def _long_condition_counts(oracle: PercolationOracle, forest: RootedForest, thresholds: Thresholds) -> np.ndarray:
    host = oracle.host
    n = host.n
    indptr, indices = host.csr
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    a = forest.arrays
    depth, tin, tout = a["depth"], a["tin"], a["tout"]
    far = np.abs(depth[rows] - depth[indices]) >= thresholds.long_cut
    rows, cols = rows[far], indices[far]
    comparable = ((tin[rows] < tin[cols]) & (tin[cols] < tout[rows])) | (
        (tin[cols] < tin[rows]) & (tin[rows] < tout[cols]))
    rows, cols = rows[comparable], cols[comparable]
    keys, _ = oracle.tested_key_array()
    lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
    untested = ~np.isin(lo * n + hi, keys)
    return np.bincount(rows[untested], minlength=n)


def try_long_condition(oracle: PercolationOracle, forest: RootedForest, table: ClassificationTable,
                       thresholds: Thresholds) -> Optional[Cycle]:
    """Probe far untested edges at vertices with enough of them; None if nothing closes.

    Vertices are tried in ascending order and each one's candidates farthest
    first; candidate lists are recomputed live since earlier probes consume
    shared edges.
    """
    need = thresholds.chord_min
    counts = _long_condition_counts(oracle, forest, thresholds)
    for v in np.flatnonzero((counts >= need) & (table.untested_degree >= need)).tolist():
        cands = long_condition_candidates(oracle, forest, v, thresholds)
        if len(cands) < need:
            continue
        for u in cands:
            if oracle.test_edge(u, v):
                if forest.is_ancestor(u, v):
                    return _tree_cycle(forest, u, v)
                return _tree_cycle(forest, v, u)
    return None


def candidate_set_U(oracle: PercolationOracle, forest: RootedForest, path: VerticalPath, v: int,
                    thresholds: Thresholds) -> list[int]:
    """Ancestors of ``v`` on ``path`` joined to it by untested edges of usable span, nearest first."""
    i = path.position(forest, v)
    out = []
    for d in range(thresholds.chord_min, min(thresholds.d_cut, i) + 1):
        u = path.vertices[i - d]
        if oracle.is_untested(u, v):
            out.append(u)
    return out


def chain_chords(oracle: PercolationOracle, forest: RootedForest, path: VerticalPath,
                 Z: Collection[int], thresholds: Thresholds) -> ChordChain:
    """Climb ``path`` with overlapping chords whose lower ends lie in ``Z``.

    Besides the step cap, the climb stops early when the last upper end is
    within ``d_cut`` of the path top or when no ``Z`` vertex sits strictly
    between the previous overlap and the last upper end. Later chords must
    reach above the previous upper end, which keeps the chain interleaved.
    """
    zpos = sorted(path.position(forest, z) for z in Z)
    if not zpos:
        return ChordChain((), path, Failure(FailureKind.NO_FULL_VERTICES))
    # positions count down from the path top; smaller means higher
    v = path.vertices[zpos[-1]]
    bound = zpos[-1]
    chords: list[Chord] = []
    for step in range(thresholds.m_max + 1):
        upper = None
        for u in reversed(candidate_set_U(oracle, forest, path, v, thresholds)):
            if path.position(forest, u) >= bound:
                break
            if oracle.test_edge(u, v):
                upper = u
                break
        if upper is None:
            return ChordChain(tuple(chords), path, Failure(FailureKind.CHORD_PROBE_FAILED, step))
        vpos, upos = path.position(forest, v), path.position(forest, upper)
        chords.append(Chord(lower=v, upper=upper, span=vpos - upos))
        if step == thresholds.m_max or upos <= thresholds.d_cut:
            break
        i = bisect_right(zpos, upos)
        # next lower end: first Z vertex below this upper end, above the previous one
        if i == len(zpos) or zpos[i] >= bound:
            break
        bound = upos
        v = path.vertices[zpos[i]]
    return ChordChain(tuple(chords), path)


def _endpoint_order(chain: ChordChain, forest: RootedForest) -> list[int]:
    """Chain endpoints bottom to top: v0, v1, u0, v2, u1, ..., vm, u(m-1), um."""
    path = chain.path
    try:
        lows = [path.position(forest, c.lower) for c in chain.chords]
        ups = [path.position(forest, c.upper) for c in chain.chords]
    except ValueError as exc:
        raise MalformedChain(str(exc)) from None
    m = len(chain.chords) - 1
    if m == 0:
        return [lows[0], ups[0]]
    order = [lows[0], lows[1]]
    for i in range(1, m):
        order += [ups[i - 1], lows[i + 1]]
    order += [ups[m - 1], ups[m]]
    return order


def chain_segments(chain: ChordChain, forest: RootedForest) -> list[tuple[int, int]]:
    """Path segments of the assembled cycle as ``(top_pos, bottom_pos)`` pairs.

    Raises MalformedChain unless the endpoints strictly alternate as
    ``v0 < v1 < u0 < v2 < u1 < ... < vm < u(m-1) < um`` going up the path.
    """
    if not chain.chords:
        raise MalformedChain("empty chain")
    order = _endpoint_order(chain, forest)
    if any(order[j + 1] >= order[j] for j in range(len(order) - 1)):
        raise MalformedChain(f"chord endpoints do not interleave: positions {order}")
    for c in chain.chords:
        span = chain.path.position(forest, c.lower) - chain.path.position(forest, c.upper)
        if span != c.span:
            raise MalformedChain(f"chord {c} records span {c.span}, path gives {span}")
    m = len(chain.chords) - 1
    if m == 0:
        if order[0] - order[1] < 2:
            raise MalformedChain("a lone chord of span 1 is a tree edge, not a cycle")
        return [(order[1], order[0])]
    segs = [(order[1], order[0])]
    for i in range(1, m):
        segs.append((order[2 * i + 1], order[2 * i]))
    segs.append((order[-1], order[-2]))
    return segs


def assemble_cycle(chain: ChordChain, forest: RootedForest) -> Cycle:
    """Join the chords with path segments into one cycle.

    Segments are ``[v0, v1]``, ``[u(i-1), v(i+1)]`` for ``1 <= i < m`` and
    ``[u(m-1), um]`` (just ``[v0, u0]`` for a single chord).
    """
    segs = chain_segments(chain, forest)
    vs = chain.path.vertices
    nbrs: dict[int, list[int]] = {}

    def link(a, b):
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)

    for top, bottom in segs:
        for j in range(top, bottom):
            link(vs[j], vs[j + 1])
    for c in chain.chords:
        link(c.lower, c.upper)
    if any(len(x) != 2 for x in nbrs.values()):
        raise NotSingleCycle("chord/segment union has a vertex of degree != 2")

    start = chain.chords[0].lower
    seq = [start]
    prev, cur = start, nbrs[start][0]
    while cur != start:
        seq.append(cur)
        a, b = nbrs[cur]
        prev, cur = cur, (b if a == prev else a)
    if len(seq) != len(nbrs):
        raise NotSingleCycle(f"union splits into several cycles ({len(seq)} of {len(nbrs)} vertices reached)")
    expected = sum(bottom - top for top, bottom in segs) + len(chain.chords)
    if len(seq) != expected:
        raise NotSingleCycle(f"cycle length {len(seq)} != segment total {expected}")
    return Cycle(tuple(seq))


def is_valid_cycle(cycle: Cycle, host: HostGraph, oracle: PercolationOracle, forest: RootedForest) -> bool:
    vs = cycle.vertices
    if len(vs) < 3 or len(set(vs)) != len(vs):
        return False
    for a, b in cycle.edges():
        if forest.is_tree_edge(a, b):
            continue
        if not host.has_edge(a, b) or not oracle.is_present(a, b):
            return False
    return True


def find_long_cycle(host: HostGraph, oracle: PercolationOracle, thresholds: Thresholds,
                    tracer=None) -> CycleSearchOutcome:
    """Explore G_p, then try the direct long-edge route and fall back to a chord chain.

    ``tracer`` is handed to :func:`explore`.
    """
    res = explore(host, oracle, tracer=tracer)
    forest = res.forest
    table = compute_classifications(host, oracle, forest, thresholds)
    out = CycleSearchOutcome(exploration=res, table=table)

    cycle = try_long_condition(oracle, forest, table, thresholds)
    if cycle is not None:
        out.branch = Branch.LONG_CONDITION
        out.best_length = cycle.length
        out.cycle = cycle
        return out

    if not table.is_full.any():
        out.failure = Failure(FailureKind.NO_FULL_VERTICES)
        return out
    bad = np.flatnonzero(~table.is_full | ~table.is_light).tolist()
    search = find_vertical_path(forest, bad, thresholds)
    out.path_search = search
    if search.status is PathStatus.NOT_FOUND:
        out.failure = Failure(FailureKind.NO_VERTICAL_PATH)
        return out
    if search.status is PathStatus.BAD_COUNT_EXCEEDED:
        out.failure = Failure(FailureKind.BAD_COUNT_EXCEEDED)
        return out

    path = search.path
    good = table.is_full & table.is_light
    Z = [v for v in path.vertices if good[v]]
    out.branch = Branch.CHORD_CHAIN
    chain = chain_chords(oracle, forest, path, Z, thresholds)
    out.chain = chain
    if not chain.chords:
        out.failure = chain.failure
        return out
    cycle = assemble_cycle(chain, forest)
    out.best_length = cycle.length
    if cycle.length >= thresholds.long_cut:
        out.cycle = cycle
    else:
        out.failure = chain.failure or Failure(FailureKind.TARGET_LENGTH_MISSED, cycle.length)
    return out
