import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from longcycle.dfs import NO_PARENT, RootedForest, explore, verify_vertical_property
from longcycle.forest import (
    EpsOutOfRange,
    PathStatus,
    ThresholdError,
    Thresholds,
    ancestors,
    compute_classifications,
    find_vertical_path,
    height_histogram,
    min_bad_window,
    trunc_desc_count,
    vertical_distance,
)
from longcycle.graph import gen_complete, gen_hypercube, gen_random_regular
from longcycle.percolation import EdgeStatus, PercolationOracle

from .strategies import brute_min_window, forests, path_forest


def brute_descendants(f: RootedForest, v: int) -> list[int]:
    return [w for w in range(f.n) if v in set(ancestors(f, w))]


def test_thresholds_k3():
    th = Thresholds.from_eps(0.05, 3)
    assert (th.t_full, th.t_rich, th.d_cut, th.t_light) == (3, 1, 2, 2)
    assert (th.chord_min, th.long_cut, th.bad_max, th.m_max, th.len_path) == (1, 3, 0, 200, 1200)


def test_thresholds_exact_decimal_rounding():
    # (1 - 0.1) * 10 must be exactly 9, not 9.000000000000002 rounded up to 10
    th = Thresholds.from_eps(0.1, 10)
    assert th.t_full == 9 and th.t_rich == 1 and th.d_cut == 5 and th.t_light == 6
    assert th.len_path == 1000 and th.m_max == 100 and th.bad_max == 0
    th = Thresholds.from_eps(0.05, 999)
    assert th.long_cut == 750 and th.d_cut == 749 and th.chord_min == 50


@pytest.mark.parametrize("eps", [0.0, -0.01, 0.11, 0.5])
def test_eps_out_of_range(eps):
    with pytest.raises(EpsOutOfRange):
        Thresholds.from_eps(eps, 100)


def test_k_too_small():
    with pytest.raises(ThresholdError):
        Thresholds.from_eps(0.09, 1)


def test_vertical_distance():
    f = RootedForest.from_parents([NO_PARENT, 0, 0, 1])
    assert vertical_distance(f, 0, 1) == 1
    assert vertical_distance(f, 3, 0) == 2
    assert vertical_distance(f, 2, 2) == 0
    assert vertical_distance(f, 1, 2) is None
    assert vertical_distance(f, 3, 2) is None


@given(forests())
@settings(max_examples=100, deadline=None)
def test_vertical_distance_matches_ancestor_walk(f):
    rng = random.Random(f.n)
    for _ in range(20):
        u, v = rng.randrange(f.n), rng.randrange(f.n)
        walk = list(ancestors(f, v))
        expected = 0 if u == v else (walk.index(u) + 1 if u in walk else None)
        if expected is None and u != v:
            up = list(ancestors(f, u))
            expected = up.index(v) + 1 if v in up else None
        assert vertical_distance(f, u, v) == expected
        # one ancestor per distance
        for i in range(len(walk) + 2):
            assert len(walk[:i]) <= i


def test_trunc_desc_count_examples():
    leaf_forest = path_forest(3)
    assert trunc_desc_count(leaf_forest, 2, 5) == 0
    binary = RootedForest.from_parents([NO_PARENT, 0, 0, 1, 1, 2, 2])
    assert trunc_desc_count(binary, 0, 1) == 2
    assert trunc_desc_count(binary, 0, 2) == 6
    assert trunc_desc_count(binary, 0, 0) == 0


@given(forests(), st.integers(0, 12))
@settings(max_examples=150, deadline=None)
def test_trunc_counts_two_routes(f, m):
    from longcycle.forest import _trunc_counts

    linear = _trunc_counts(f, m)
    for v in range(f.n):
        bfs = trunc_desc_count(f, v, m)
        assert linear[v] == bfs
        assert bfs <= trunc_desc_count(f, v, m + 1)
        brute = sum(1 for w in brute_descendants(f, v) if f.depth[w] - f.depth[v] <= m)
        assert bfs == brute
    for v in range(f.n):
        assert trunc_desc_count(f, v, f.n) == f.subtree_size[v] - 1


@given(forests())
@settings(max_examples=100, deadline=None)
def test_subtree_and_height_aggregation(f):
    assert sum(s - 1 for s in f.subtree_size) == sum(f.depth)
    hist = height_histogram(f)
    assert sum(hist.values()) == f.n
    from longcycle.forest import _heights

    heights = _heights(f)
    for v in range(f.n):
        desc = brute_descendants(f, v)
        assert f.subtree_size[v] - 1 == len(desc)
        assert heights[v] == max((f.depth[w] - f.depth[v] for w in desc), default=0)
        assert (heights[v] == 0) == (not f.children[v])


def test_height_histograms():
    assert height_histogram(path_forest(5)) == {h: 1 for h in range(5)}
    star = RootedForest.from_parents([NO_PARENT] + [0] * 6)
    assert height_histogram(star) == {0: 6, 1: 1}
    g = gen_complete(12)
    forest = explore(g, PercolationOracle(g, 1.0, 0)).forest
    assert height_histogram(forest) == {h: 1 for h in range(12)}


def classify(g, p, eps, seed=0, k=None):
    o = PercolationOracle(g, p, seed)
    res = explore(g, o)
    th = Thresholds.from_eps(eps, k or g.min_degree)
    return o, res.forest, compute_classifications(g, o, res.forest, th), th


def test_k4_classification():
    _, _, table, th = classify(gen_complete(4), 1.0, 0.05)
    assert th.t_full == 3
    assert list(table.untested_degree) == [2, 1, 1, 2]
    assert not table.is_full.any()
    assert list(table.height) == [3, 2, 1, 0]
    assert list(table.subtree_size) == [4, 3, 2, 1]


def test_p_zero_has_no_full_vertices():
    _, _, table, _ = classify(gen_hypercube(5), 0.0, 0.05)
    assert not table.untested_degree.any()
    assert table.full_count == 0


def test_single_path_heights():
    f = path_forest(9)
    from longcycle.forest import _heights

    assert _heights(f)[0] == 8 and _heights(f)[8] == 0
    assert f.subtree_size[0] - 1 == 8


@given(st.integers(0, 10**6), st.sampled_from([0.05, 0.2, 0.6]))
@settings(max_examples=25, deadline=None)
def test_table_definitions(seed, p):
    g = gen_random_regular(40, 4, seed)
    o, f, table, th = classify(g, p, 0.05, seed, k=40)
    for v in range(g.n):
        untested = sum(o.status(v, w) is EdgeStatus.UNTESTED for w in g.adjacency[v])
        assert table.untested_degree[v] == untested
        assert table.is_full[v] == (untested >= th.t_full)
        assert table.is_rich[v] == (table.subtree_size[v] - 1 >= th.t_rich)
        assert table.trunc_desc_count[v] == trunc_desc_count(f, v, th.d_cut)
        assert table.is_light[v] == (table.trunc_desc_count[v] <= th.t_light)


def test_full_set_shrinks_as_eps_grows():
    g = gen_complete(300)
    o = PercolationOracle(g, 0.05, 4)
    f = explore(g, o).forest
    eps_values = [0.01, 0.03, 0.05, 0.08, 0.1]
    fulls = [set(np.flatnonzero(compute_classifications(g, o, f, Thresholds.from_eps(e, 299)).is_full))
             for e in eps_values]
    # larger eps lowers the bar (1 - eps) k, so the full set can only grow
    for small, large in zip(fulls, fulls[1:]):
        assert small <= large


def test_path_search_top_window():
    th = Thresholds.from_eps(0.09, 2)  # len_path 247
    f = path_forest(300)
    got = find_vertical_path(f, [], th)
    assert got.status is PathStatus.FOUND and got.bad_count == 0
    assert got.path.vertices == tuple(range(248))
    for a, b in zip(got.path.vertices, got.path.vertices[1:]):
        assert f.parent[b] == a


def test_path_search_avoids_bad_half():
    th = Thresholds.from_eps(0.09, 2)
    L = th.len_path
    # a window of L edges has L + 1 vertices, so each half holds exactly one window
    f = path_forest(2 * (L + 1))
    got = find_vertical_path(f, range(L + 1), th)
    assert got.status is PathStatus.FOUND and got.bad_count == 0
    assert got.path.vertices == tuple(range(L + 1, 2 * (L + 1)))
    assert brute_min_window(f, range(L + 1), L) == 0
    assert brute_min_window(f, range(L + 2), L) == 1


def test_path_search_stars_not_found():
    th = Thresholds.from_eps(0.05, 20)
    stars = RootedForest.from_parents([NO_PARENT, 0, 0, 0, NO_PARENT, 4, 4])
    assert find_vertical_path(stars, [], th).status is PathStatus.NOT_FOUND


def test_path_search_bad_count_exceeded():
    th = Thresholds.from_eps(0.09, 2)
    f = path_forest(th.len_path + 1)
    got = find_vertical_path(f, [5], th)
    assert got.status is PathStatus.BAD_COUNT_EXCEEDED and got.bad_count == 1
    assert got.path is not None


@given(forests(max_n=120), st.integers(1, 6), st.floats(0, 0.6))
@settings(max_examples=150, deadline=None)
def test_window_search_matches_brute_force(f, length, density):
    rng = random.Random(f.n * 31 + length)
    bad = [v for v in range(f.n) if rng.random() < density]
    best = min_bad_window(f, bad, length)
    expected = brute_min_window(f, bad, length)
    if expected is None:
        assert best is None
    else:
        bottom, count = best
        assert count == expected
        assert f.depth[bottom] >= length


def test_vertical_property_agrees_with_python_check():
    for seed in range(30):
        g = gen_random_regular(24, 3, seed)
        o = PercolationOracle(g, 0.5, seed)
        f = explore(g, o).forest
        ok = all(vertical_distance(f, e.lo, e.hi) is not None
                 for e, s in o.statuses() if s is EdgeStatus.UNTESTED)
        assert ok and verify_vertical_property(g, o, f)
