from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import reference as ref
from bairesum.errors import CycleDetected, DanglingParent, InvalidTree, NotAChain, BudgetExceeded
from bairesum.generate import all_forests, full_binary_tree, random_tree
from bairesum.tree import (
    FullBinaryTree,
    Segment,
    bfs_enumeration,
    build_tree,
    comparable,
    convex_hull_segment,
    count_families,
    dfs_enumeration,
    enumerate_incomparable_families,
    is_segment,
    restrict_segment,
    support_forest,
)
from strategies import parent_lists


# -- construction -------------------------------------------------------------


def test_single_node():
    t = build_tree([None])
    assert t.n_nodes == 1
    assert t.depth_of(0) == 1
    assert t.minimal_nodes() == [0]


def test_root_with_two_children():
    t = build_tree([None, 0, 0])
    assert t.depth_of(1) == t.depth_of(2) == 2
    assert t.children_of(0) == [1, 2]


def test_two_minimal_nodes_are_incomparable():
    t = build_tree([None, None])
    assert t.minimal_nodes() == [0, 1]
    assert not comparable(t, 0, 1)


def test_children_keep_input_order():
    t = build_tree([None, 0, None, 0, 1, 0])
    assert t.children_of(0) == [1, 3, 5]
    assert list(bfs_enumeration(t).nodes) == [0, 2, 1, 3, 5, 4]


@pytest.mark.parametrize(
    "parents, error",
    [
        ([0], CycleDetected),
        ([1, 0], CycleDetected),
        ([None, 2, 1], CycleDetected),
        ([None, 5], DanglingParent),
        ([None, -3], DanglingParent),
        ([], InvalidTree),
        ([None, "0"], InvalidTree),
    ],
)
def test_bad_parent_lists(parents, error):
    with pytest.raises(error):
        build_tree(parents)


def test_numpy_parent_array():
    t = build_tree(np.array([-1, 0, 0, 1]))
    assert t.depth_of(3) == 3


@given(parent_lists(max_nodes=12))
def test_depths_match_parent_chains(parents):
    t = build_tree(parents)
    for v in range(len(parents)):
        assert t.depth_of(v) == ref.depth(parents, v)
        p = parents[v]
        assert t.parent_of(v) == p
        if p is not None:
            assert t.depth_of(v) == t.depth_of(p) + 1


# -- comparability ------------------------------------------------------------


def test_comparable_examples():
    t = build_tree([None, 0, 0, 1])
    assert comparable(t, 2, 2)
    assert not comparable(t, 1, 2)
    assert comparable(t, 0, 3)


@given(parent_lists(max_nodes=10))
def test_comparable_symmetric_and_matches_reference(parents):
    t = build_tree(parents)
    n = len(parents)
    for u in range(n):
        for v in range(n):
            c = comparable(t, u, v)
            assert c == comparable(t, v, u) == ref.comparable(parents, u, v)
            if u != v:
                assert c == (t.is_ancestor(u, v) != t.is_ancestor(v, u))


# -- enumerations -------------------------------------------------------------


def test_bfs_single_node():
    assert bfs_enumeration(build_tree([None])).position(0) == 0


def test_bfs_root_first():
    assert bfs_enumeration(build_tree([None, 0, 0])).position(0) == 0


def test_bfs_full_binary_depth_two_increases_with_depth():
    t = full_binary_tree(2)
    e = bfs_enumeration(t)
    for u in range(t.n_nodes):
        for v in range(t.n_nodes):
            if t.depth_of(u) < t.depth_of(v):
                assert e.position(u) < e.position(v)


@given(parent_lists(max_nodes=12))
def test_enumerations_are_order_compatible(parents):
    t = build_tree(parents)
    for e in (bfs_enumeration(t), dfs_enumeration(t)):
        assert sorted(e.nodes.tolist()) == list(range(len(parents)))
        assert e.is_compatible(t)


# -- segments -----------------------------------------------------------------


def test_convex_hull_examples():
    t = build_tree([None, 0, 1, 0])
    assert convex_hull_segment(t, {2}) == Segment((2,))
    assert convex_hull_segment(t, {0, 2}) == Segment((0, 1, 2))
    with pytest.raises(NotAChain):
        convex_hull_segment(t, {1, 3})


def test_restrict_segment_examples():
    t = build_tree([None, 0, 1])
    e = bfs_enumeration(t)
    seg = Segment((0, 1, 2))
    assert restrict_segment(seg, e, 0, 2) == seg
    assert restrict_segment(seg, e, 1, 2) == Segment((1, 2))
    t2 = build_tree([None, 0, 1, None])
    # positions of the chain are 0, 2, 3 once the second root takes position 1
    assert restrict_segment(Segment((0, 1, 2)), bfs_enumeration(t2), 1, 1) is None


@given(parent_lists(max_nodes=9))
def test_segment_restrictions_stay_segments(parents):
    t = build_tree(parents)
    e = bfs_enumeration(t)
    n = len(parents)
    for seg in ref.all_segments(parents):
        s = Segment(seg)
        for lo in range(n):
            for hi in range(lo, n):
                r = restrict_segment(s, e, lo, hi)
                assert r is None or is_segment(t, r.nodes)


@given(parent_lists(max_nodes=8))
def test_incomparable_iff_minima_incomparable(parents):
    t = build_tree(parents)
    segs = ref.all_segments(parents)
    for a, b in combinations(segs, 2):
        node_wise = ref.segments_incomparable(parents, a, b)
        assert node_wise == (not t.comparable(a[0], b[0]))


# -- family enumeration -------------------------------------------------------


def _fams(t, support):
    return [f.as_lists() for f in enumerate_incomparable_families(t, support)]


def test_singleton_support_has_one_family():
    t = build_tree([None, 0])
    assert _fams(t, [1]) == [[[1]]]


def test_two_siblings_have_three_families():
    t = build_tree([None, 0, 0])
    got = sorted(map(str, _fams(t, [1, 2])))
    assert got == sorted(map(str, [[[1]], [[2]], [[1], [2]]]))


def test_chain_support_only_single_segments():
    t = build_tree([None, 0])
    fams = _fams(t, [0, 1])
    assert all(len(f) == 1 for f in fams)
    assert sorted(map(str, fams)) == sorted(map(str, [[[0]], [[1]], [[0, 1]]]))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_antichain_support_gives_all_subsets(k):
    t = build_tree([None] * k)
    fams = _fams(t, range(k))
    assert len(fams) == 2**k - 1
    assert all(len(s) == 1 for f in fams for s in f)


def test_budget_is_checked_before_enumerating():
    t = build_tree([None] * 12)
    with pytest.raises(BudgetExceeded) as info:
        next(enumerate_incomparable_families(t, range(12), budget=100))
    assert info.value.count == 2**12 - 1


@given(parent_lists(max_nodes=7), st.data())
def test_families_match_reference(parents, data):
    t = build_tree(parents)
    n = len(parents)
    support = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
    got = {tuple(tuple(s) for s in f) for f in _fams(t, support)}
    assert len(got) == len(_fams(t, support))
    sup = set(support)
    segs = [s for s in ref.all_segments(parents) if s[0] in sup and s[-1] in sup]
    want = {tuple(sorted(f, key=lambda s: s[0])) for f in ref.families(parents, segs)}
    assert got == want
    assert count_families(support_forest(t, support)) == len(want)


# -- generators and the implicit full binary tree -----------------------------


def test_forest_counts():
    assert [sum(1 for _ in all_forests(n)) for n in range(1, 11)] == [
        1, 2, 4, 9, 20, 48, 115, 286, 719, 1842,
    ]


@pytest.mark.parametrize("d, n", [(1, 2), (2, 6), (3, 14)])
def test_full_binary_sizes(d, n):
    assert full_binary_tree(d).n_nodes == n
    assert full_binary_tree(d).full_binary_depth() == d


def test_implicit_full_binary_matches_materialized():
    imp = FullBinaryTree(6)
    mat = full_binary_tree(6)
    assert np.array_equal(imp.parent_array(), mat.parent_array())
    for v in range(mat.n_nodes):
        assert imp.depth_of(v) == mat.depth_of(v)
        assert imp.children_of(v) == mat.children_of(v)
        assert imp.parent_of(v) == mat.parent_of(v)
    assert np.array_equal(imp.bfs_order(), mat.bfs_order())
    nodes = np.array([0, 3, 9, 20, 41, 100])
    assert np.array_equal(imp.nearest_marked_ancestors(nodes), mat.nearest_marked_ancestors(nodes))
    for d in range(1, 7):
        assert np.array_equal(imp.level(d), mat.level(d))


def test_nearest_marked_ancestors_both_paths_agree():
    t = random_tree(3000, 5)
    rng = np.random.default_rng(0)
    nodes = np.sort(rng.choice(3000, 400, replace=False))
    assert np.array_equal(t._nearest_marked_py(nodes), t._nearest_marked_levels(nodes))


def test_random_tree_is_deterministic():
    a, b = random_tree(50, 3), random_tree(50, 3)
    assert np.array_equal(a.parent_array(), b.parent_array())
