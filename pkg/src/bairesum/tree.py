"""
Finite forests, order-compatible enumerations, segments and families of
pairwise incomparable segments.

Nodes are dense integers ``0 .. n_nodes - 1``.  A forest has no virtual
root: every node of depth 1 is minimal and all minimal nodes are pairwise
incomparable.  Two storage strategies share one interface:

``FiniteTree``
    flat numpy arrays (parent, depth, CSR children, BFS levels), built by
    :func:`build_tree` from a parent list.
``FullBinaryTree``
    the dyadic tree truncated at a given depth, held implicitly.  Node ids
    are BFS positions, so arbitrarily deep instances cost nothing until a
    vector is placed on them.

Algorithms that only need a handful of nodes use the scalar accessors
(``parent_of``, ``children_of``); bulk work goes through the vectorized ones
(``depths``, ``nearest_marked_ancestors``).
"""

import itertools
from dataclasses import dataclass, field
from math import prod

import numpy as np

from .errors import (
    BudgetExceeded,
    CycleDetected,
    DanglingParent,
    InvalidTree,
    NotAChain,
    NotASegment,
)

NO_PARENT = -1

# Trees above this size never build per-node Python lists.
_PY_LIST_LIMIT = 1 << 21


def _concat_ranges(starts, lengths):
    """Concatenation of ``arange(s, s + l)`` over paired entries."""
    total = int(lengths.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    before = np.cumsum(lengths) - lengths
    return np.repeat(starts - before, lengths) + np.arange(total, dtype=np.int64)


class FiniteTree:
    """A finite forest stored as parallel arrays.

    Attributes
    ----------
    parent : int64[n]   parent id, ``-1`` for minimal nodes
    depth  : int64[n]   1 for minimal nodes
    """

    def __init__(self, parent, depth, child_ptr, child_idx, levels):
        self.parent = parent
        self.depth = depth
        self._child_ptr = child_ptr
        self._child_idx = child_idx
        self._levels = levels
        self._py = None

    # -- size ---------------------------------------------------------------

    @property
    def n_nodes(self):
        return len(self.parent)

    @property
    def max_depth(self):
        return len(self._levels)

    def __len__(self):
        return self.n_nodes

    def __repr__(self):
        return f"{type(self).__name__}(n_nodes={self.n_nodes}, max_depth={self.max_depth})"

    def check_node(self, v):
        if not 0 <= v < self.n_nodes:
            raise IndexError(f"node {v} not in tree of {self.n_nodes} nodes")
        return int(v)

    # -- scalar accessors ---------------------------------------------------

    def _lists(self):
        if self._py is None:
            parents = self.parent.tolist()
            children = [[] for _ in parents]
            for v, p in enumerate(parents):
                if p >= 0:
                    children[p].append(v)
            self._py = (parents, self.depth.tolist(), children)
        return self._py

    def parent_of(self, v):
        """Parent id, or None for a minimal node."""
        p = self._lists()[0][v] if self.n_nodes <= _PY_LIST_LIMIT else int(self.parent[v])
        return None if p < 0 else p

    def depth_of(self, v):
        if self.n_nodes <= _PY_LIST_LIMIT:
            return self._lists()[1][v]
        return int(self.depth[v])

    def children_of(self, v):
        if self.n_nodes <= _PY_LIST_LIMIT:
            return self._lists()[2][v]
        return self._child_idx[self._child_ptr[v] : self._child_ptr[v + 1]].tolist()

    def minimal_nodes(self):
        return self._levels[0].tolist()

    # -- vectorized accessors -----------------------------------------------

    def parents(self, nodes):
        return self.parent[np.asarray(nodes, dtype=np.int64)]

    def depths(self, nodes):
        return self.depth[np.asarray(nodes, dtype=np.int64)]

    def level(self, d):
        """Nodes of depth ``d`` in BFS order."""
        if not 1 <= d <= self.max_depth:
            return np.empty(0, dtype=np.int64)
        return self._levels[d - 1]

    def bfs_order(self):
        return np.concatenate(self._levels)

    def child_counts(self):
        return np.diff(self._child_ptr)

    def leaves(self):
        """Leaves in BFS order."""
        order = self.bfs_order()
        return order[self.child_counts()[order] == 0]

    def parent_array(self):
        return self.parent

    # -- order relations ----------------------------------------------------

    def is_ancestor(self, u, v):
        """True iff ``u`` is an ancestor of ``v`` or equal to it."""
        du, dv = self.depth_of(u), self.depth_of(v)
        if du > dv:
            return False
        while dv > du:
            v = self.parent_of(v)
            dv -= 1
        return u == v

    def comparable(self, u, v):
        return self.is_ancestor(u, v) or self.is_ancestor(v, u)

    def path(self, top, bottom):
        """Nodes from ``top`` down to ``bottom``; ``top`` must be an ancestor."""
        out = [bottom]
        d, dt = self.depth_of(bottom), self.depth_of(top)
        v = bottom
        while d > dt:
            v = self.parent_of(v)
            out.append(v)
            d -= 1
        if v != top:
            raise NotAChain(f"{top} is not an ancestor of {bottom}")
        out.reverse()
        return out

    def nearest_marked_ancestors(self, nodes):
        """For each node, its nearest strict ancestor inside ``nodes`` (or -1)."""
        nodes = np.asarray(nodes, dtype=np.int64)
        if self.n_nodes <= _PY_LIST_LIMIT:
            return self._nearest_marked_py(nodes)
        return self._nearest_marked_levels(nodes)

    def _nearest_marked_py(self, nodes):
        parents = self._lists()[0]
        marked = set(nodes.tolist())
        memo = {}
        out = []
        for v in nodes.tolist():
            trail = []
            u = parents[v]
            while u >= 0 and u not in marked:
                if u in memo:
                    break
                trail.append(u)
                u = parents[u]
            if u >= 0 and u not in marked:
                u = memo[u]
            for t in trail:
                memo[t] = u
            out.append(u)
        return np.array(out, dtype=np.int64)

    def _nearest_marked_levels(self, nodes):
        mark = np.zeros(self.n_nodes, dtype=bool)
        mark[nodes] = True
        near = np.full(self.n_nodes, NO_PARENT, dtype=np.int64)
        for lev in self._levels[1:]:
            p = self.parent[lev]
            near[lev] = np.where(mark[p], p, near[p])
        return near[nodes]

    # -- enumerations -------------------------------------------------------

    def bfs_enumeration(self):
        return NodeEnumeration(self.bfs_order())

    def full_binary_depth(self):
        """Depth ``D`` if this is the full binary forest of depth ``D``, else None."""
        d = self.max_depth
        if len(self._levels[0]) != 2 or self.n_nodes != (1 << (d + 1)) - 2:
            return None
        counts = self.child_counts()
        inner = np.concatenate(self._levels[:-1]) if d > 1 else np.empty(0, np.int64)
        if (counts[inner] != 2).any() or (counts[self._levels[-1]] != 0).any():
            return None
        return d


class FullBinaryTree(FiniteTree):
    """The dyadic forest truncated at ``depth``, stored implicitly.

    Node ids are BFS positions: the minimal nodes are 0 and 1, node ``v`` has
    children ``2v + 2`` (first) and ``2v + 3``.  Level ``d`` is the id range
    ``[2**d - 2, 2**(d+1) - 2)``.
    """

    def __init__(self, depth):
        if depth < 1:
            raise InvalidTree("full binary depth must be at least 1")
        self._depth_limit = int(depth)
        self._py = None

    @property
    def n_nodes(self):
        return (1 << (self._depth_limit + 1)) - 2

    @property
    def max_depth(self):
        return self._depth_limit

    @property
    def parent(self):
        return self.parent_array()

    @property
    def depth(self):
        return self.depths(np.arange(self.n_nodes, dtype=np.int64))

    def parent_of(self, v):
        return (v - 2) >> 1 if v >= 2 else None

    def depth_of(self, v):
        return (v + 2).bit_length() - 1

    def children_of(self, v):
        if self.depth_of(v) >= self._depth_limit:
            return []
        return [2 * v + 2, 2 * v + 3]

    def minimal_nodes(self):
        return [0, 1]

    def parents(self, nodes):
        nodes = np.asarray(nodes, dtype=np.int64)
        return np.where(nodes >= 2, (nodes - 2) >> 1, NO_PARENT)

    def depths(self, nodes):
        shifted = np.asarray(nodes, dtype=np.int64) + 2
        d = np.floor(np.log2(shifted)).astype(np.int64)
        d += (np.left_shift(1, d + 1) <= shifted).astype(np.int64)
        d -= (np.left_shift(1, d) > shifted).astype(np.int64)
        return d

    def level(self, d):
        if not 1 <= d <= self._depth_limit:
            return np.empty(0, dtype=np.int64)
        return np.arange((1 << d) - 2, (1 << (d + 1)) - 2, dtype=np.int64)

    def bfs_order(self):
        return np.arange(self.n_nodes, dtype=np.int64)

    def child_counts(self):
        counts = np.full(self.n_nodes, 2, dtype=np.int64)
        counts[self.level(self._depth_limit)] = 0
        return counts

    def leaves(self):
        return self.level(self._depth_limit)

    def parent_array(self):
        return self.parents(np.arange(self.n_nodes, dtype=np.int64))

    def is_ancestor(self, u, v):
        du, dv = self.depth_of(u), self.depth_of(v)
        return du <= dv and ((v + 2) >> (dv - du)) - 2 == u

    def descendants_at_depth(self, v, d):
        """Id range of the depth-``d`` descendants of ``v`` (contiguous)."""
        dv = self.depth_of(v)
        if d < dv:
            return range(0)
        lo = ((v + 2) << (d - dv)) - 2
        return range(lo, lo + (1 << (d - dv)))

    def nearest_marked_ancestors(self, nodes):
        nodes = np.asarray(nodes, dtype=np.int64)
        depths = self.depths(nodes)
        marked = np.sort(nodes)
        out = np.full(len(nodes), NO_PARENT, dtype=np.int64)
        for dd in np.unique(depths).tolist():
            deeper = np.flatnonzero(depths > dd)
            if deeper.size == 0:
                break
            anc = ((nodes[deeper] + 2) >> (depths[deeper] - dd)) - 2
            k = np.searchsorted(marked, anc)
            k[k == len(marked)] = 0
            hit = marked[k] == anc
            out[deeper[hit]] = anc[hit]
        return out

    def bfs_enumeration(self):
        return IdentityEnumeration(self.n_nodes)

    def full_binary_depth(self):
        return self._depth_limit

    def materialize(self):
        return build_tree(self.parent_array())


def build_tree(parent_list):
    """Validate a parent list and build a :class:`FiniteTree`.

    ``parent_list[v]`` is the parent of ``v`` or ``None`` (``-1`` is accepted
    in integer arrays).  Children keep input order, and so does BFS.
    """
    if isinstance(parent_list, np.ndarray):
        par = parent_list.astype(np.int64, copy=True)
    else:
        raw = []
        for v, p in enumerate(parent_list):
            if p is None:
                raw.append(NO_PARENT)
            elif isinstance(p, (int, np.integer)) and not isinstance(p, bool):
                if p < 0:
                    raise DanglingParent(f"node {v}: parent {p} out of range")
                raw.append(int(p))
            else:
                raise InvalidTree(f"node {v}: parent must be an integer or None")
        par = np.array(raw, dtype=np.int64)
    n = len(par)
    if n == 0:
        raise InvalidTree("a tree needs at least one node")
    bad = np.flatnonzero((par < NO_PARENT) | (par >= n))
    if bad.size:
        v = int(bad[0])
        raise DanglingParent(f"node {v}: parent {int(par[v])} out of range")
    ids = np.arange(n, dtype=np.int64)
    selfish = np.flatnonzero(par == ids)
    if selfish.size:
        raise CycleDetected(f"node {int(selfish[0])} is its own parent")

    order = np.argsort(par, kind="stable")
    n_roots = int(np.count_nonzero(par == NO_PARENT))
    if n_roots == 0:
        raise CycleDetected("no minimal node: every node has a parent")
    counts = np.bincount(par[par >= 0], minlength=n)
    child_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=child_ptr[1:])
    child_idx = order[n_roots:]

    depth = np.zeros(n, dtype=np.int64)
    levels = []
    frontier = order[:n_roots]
    d = 1
    while frontier.size:
        depth[frontier] = d
        levels.append(frontier)
        starts = child_ptr[frontier]
        frontier = child_idx[_concat_ranges(starts, child_ptr[frontier + 1] - starts)]
        d += 1
    reached = sum(len(lev) for lev in levels)
    if reached < n:
        v = int(np.flatnonzero(depth == 0)[0])
        raise CycleDetected(f"node {v} lies on or below a parent cycle")
    return FiniteTree(par, depth, child_ptr, child_idx, levels)


def comparable(tree, u, v):
    """True iff ``u`` and ``v`` are equal or one is an ancestor of the other."""
    return tree.comparable(tree.check_node(u), tree.check_node(v))


# -- enumerations -------------------------------------------------------------


class NodeEnumeration:
    """A bijection between nodes and positions ``0 .. n-1``.

    ``nodes[p]`` is the node at position ``p``; ``order[v]`` the position of
    node ``v``.
    """

    def __init__(self, nodes_in_order):
        self.nodes = np.asarray(nodes_in_order, dtype=np.int64)
        self.order = np.empty_like(self.nodes)
        self.order[self.nodes] = np.arange(len(self.nodes), dtype=np.int64)
        self._order_list = None

    def __len__(self):
        return len(self.nodes)

    def position(self, v):
        if self._order_list is None:
            self._order_list = self.order.tolist()
        return self._order_list[v]

    def positions(self, nodes):
        return self.order[np.asarray(nodes, dtype=np.int64)]

    def node_at(self, p):
        return int(self.nodes[p])

    def nodes_at(self, positions):
        return self.nodes[np.asarray(positions, dtype=np.int64)]

    def is_compatible(self, tree):
        """Ancestors come strictly before descendants."""
        par = tree.parent_array()
        child = np.flatnonzero(par >= 0)
        return bool((self.order[par[child]] < self.order[child]).all())


class IdentityEnumeration(NodeEnumeration):
    """Position equals node id; used by :class:`FullBinaryTree`."""

    def __init__(self, n):
        self._n = n

    def __len__(self):
        return self._n

    @property
    def nodes(self):
        return np.arange(self._n, dtype=np.int64)

    @property
    def order(self):
        return self.nodes

    def position(self, v):
        return v

    def positions(self, nodes):
        return np.asarray(nodes, dtype=np.int64)

    def node_at(self, p):
        return int(p)

    def nodes_at(self, positions):
        return np.asarray(positions, dtype=np.int64)

    def is_compatible(self, tree):
        return isinstance(tree, FullBinaryTree) and tree.n_nodes == self._n


def bfs_enumeration(tree):
    return tree.bfs_enumeration()


def dfs_enumeration(tree):
    """Preorder enumeration; another order-compatible choice."""
    out = []
    stack = list(reversed(tree.minimal_nodes()))
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(reversed(tree.children_of(v)))
    return NodeEnumeration(out)


# -- segments -----------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """A downward path ``nodes[0] -> ... -> nodes[-1]`` (ancestor first)."""

    nodes: tuple

    def __post_init__(self):
        if not self.nodes:
            raise NotASegment("a segment is nonempty")

    @property
    def min(self):
        return self.nodes[0]

    @property
    def max(self):
        return self.nodes[-1]

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)

    def __contains__(self, v):
        return v in self.nodes


def is_segment(tree, nodes):
    nodes = list(nodes)
    if not nodes:
        return False
    for v in nodes:
        if not 0 <= v < tree.n_nodes:
            return False
    return all(tree.parent_of(b) == a for a, b in zip(nodes, nodes[1:]))


def validate_segment(tree, seg):
    if not is_segment(tree, seg.nodes):
        raise NotASegment(f"{list(seg.nodes)} is not a downward path")
    return seg


def segment_between(tree, top, bottom):
    return Segment(tuple(tree.path(top, bottom)))


def convex_hull_segment(tree, chain):
    """Smallest segment containing a nonempty set of pairwise comparable nodes."""
    chain = sorted({tree.check_node(v) for v in chain}, key=tree.depth_of)
    if not chain:
        raise NotAChain("empty chain")
    for a, b in zip(chain, chain[1:]):
        if tree.depth_of(a) == tree.depth_of(b) or not tree.is_ancestor(a, b):
            raise NotAChain(f"nodes {a} and {b} are incomparable")
    return segment_between(tree, chain[0], chain[-1])


def restrict_segment(seg, enumeration, lo, hi):
    """``seg`` intersected with the nodes at positions ``lo..hi``.

    Returns None when the intersection is empty.  The intersection is always
    a contiguous run of ``seg`` because positions increase along it.
    """
    if lo > hi:
        raise ValueError("empty interval")
    keep = [i for i, v in enumerate(seg.nodes) if lo <= enumeration.position(v) <= hi]
    if not keep:
        return None
    if keep[-1] - keep[0] + 1 != len(keep):
        raise AssertionError(f"restriction of {seg.nodes} to [{lo}, {hi}] is not convex")
    return Segment(seg.nodes[keep[0] : keep[-1] + 1])


@dataclass(frozen=True)
class SegmentFamily:
    """Segments with pairwise incomparable minima, sorted by min id."""

    segments: tuple

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    @property
    def mins(self):
        return tuple(s.min for s in self.segments)

    def as_lists(self):
        return [list(s.nodes) for s in self.segments]


def segments_incomparable(tree, a, b):
    return not tree.comparable(a.min, b.min)


def is_incomparable_family(tree, segments):
    segs = list(segments)
    return all(segments_incomparable(tree, a, b) for a, b in itertools.combinations(segs, 2))


# -- support forests and family enumeration ----------------------------------


@dataclass
class SupportForest:
    """A node set compressed to its induced ancestor relation.

    Entries are sorted by (depth, id) so parents precede children;
    ``cparent[i]`` is the index of the nearest ancestor of ``nodes[i]`` inside
    the set, or -1.
    """

    nodes: np.ndarray
    depths: np.ndarray
    cparent: np.ndarray
    _children: list = field(default=None, repr=False)
    _levels: list = field(default=None, repr=False)

    def __len__(self):
        return len(self.nodes)

    @property
    def children(self):
        if self._children is None:
            ch = [[] for _ in range(len(self.nodes))]
            for i, p in enumerate(self.cparent.tolist()):
                if p >= 0:
                    ch[p].append(i)
            self._children = ch
        return self._children

    @property
    def roots(self):
        return np.flatnonzero(self.cparent < 0).tolist()

    @property
    def levels(self):
        """Index arrays by compressed depth (roots first)."""
        if self._levels is None:
            m = len(self.nodes)
            lev = np.zeros(m, dtype=np.int64)
            if m:
                bounds = np.flatnonzero(np.diff(self.depths)) + 1
                for group in np.split(np.arange(m), bounds):
                    p = self.cparent[group]
                    has = p >= 0
                    lev[group[has]] = lev[p[has]] + 1
            order = np.argsort(lev, kind="stable")
            cuts = np.flatnonzero(np.diff(lev[order])) + 1
            self._levels = np.split(order, cuts) if m else []
        return self._levels

    def subtree_members(self):
        """For each index, the indices of its compressed subtree (itself first)."""
        ch = self.children
        sub = [None] * len(self.nodes)
        for i in range(len(self.nodes) - 1, -1, -1):
            members = [i]
            for c in ch[i]:
                members.extend(sub[c])
            sub[i] = members
        return sub


def support_forest(tree, nodes):
    nodes = np.unique(np.asarray(nodes, dtype=np.int64))
    if nodes.size and (nodes[0] < 0 or nodes[-1] >= tree.n_nodes):
        raise IndexError("support node outside the tree")
    depths = tree.depths(nodes)
    order = np.lexsort((nodes, depths))
    nodes, depths = nodes[order], depths[order]
    anc = tree.nearest_marked_ancestors(nodes)
    cparent = np.full(len(nodes), -1, dtype=np.int64)
    has = anc >= 0
    if has.any():
        by_id = np.argsort(nodes)
        cparent[has] = by_id[np.searchsorted(nodes[by_id], anc[has])]
    return SupportForest(nodes, depths, cparent)


def _selection_counts(sf):
    sizes = [len(s) for s in sf.subtree_members()]
    ch = sf.children
    g = [0] * len(sf)
    for i in range(len(sf) - 1, -1, -1):
        g[i] = prod(g[c] for c in ch[i]) + sizes[i]
    return g


def count_families(sf):
    """Number of nonempty incomparable families with endpoints in the set."""
    g = _selection_counts(sf)
    return prod(g[r] for r in sf.roots) - 1


def family_index_tuples(sf, budget):
    """All families as tuples of ``(start, end)`` index pairs.

    A selection inside the subtree of ``i`` either takes one segment starting
    at ``i`` (which excludes everything else below ``i``) or combines
    selections of the children.
    """
    count = count_families(sf)
    if count > budget:
        raise BudgetExceeded(count, budget)
    ch = sf.children
    sub = sf.subtree_members()
    sel = [None] * len(sf)
    for i in range(len(sf) - 1, -1, -1):
        own = [((i, j),) for j in sub[i]]
        if ch[i]:
            own.extend(_combine([sel[c] for c in ch[i]]))
            for c in ch[i]:
                sel[c] = None
        sel[i] = own
    return _combine([sel[r] for r in sf.roots])


def _combine(option_lists):
    out = []
    for parts in itertools.product(*[[()] + opts for opts in option_lists]):
        fam = tuple(itertools.chain.from_iterable(parts))
        if fam:
            out.append(fam)
    return out


def enumerate_incomparable_families(tree, support, budget=10**6):
    """Yield every family of pairwise incomparable segments whose segments
    start and end at nodes of ``support``.

    Raises :class:`BudgetExceeded` before yielding anything if the number of
    families is larger than ``budget``.
    """
    sf = support_forest(tree, support)
    if len(sf) == 0:
        raise ValueError("support must be nonempty")
    tuples = family_index_tuples(sf, budget)
    nodes = sf.nodes.tolist()
    cache = {}

    def seg(pair):
        if pair not in cache:
            cache[pair] = segment_between(tree, nodes[pair[0]], nodes[pair[1]])
        return cache[pair]

    for fam in tuples:
        segs = sorted((seg(p) for p in fam), key=lambda s: s.min)
        yield SegmentFamily(tuple(segs))
