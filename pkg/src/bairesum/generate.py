"""Standard tree instances: full binary, random recursive, and exhaustive."""

import numpy as np

from .errors import InvalidParameter
from .tree import FullBinaryTree, build_tree


def full_binary_tree(depth, implicit=False):
    """The dyadic forest of the given depth: ``2**(depth+1) - 2`` nodes.

    With ``implicit=True`` the tree is held arithmetically; otherwise the
    arrays are materialized (ids are identical either way).
    """
    tree = FullBinaryTree(depth)
    return tree if implicit else tree.materialize()


def random_tree(n, seed):
    """Random recursive forest: node ``i`` picks its parent uniformly from
    ``{None, 0, ..., i-1}``."""
    if n < 1:
        raise InvalidParameter("random tree needs n >= 1")
    rng = np.random.default_rng(seed)
    picks = np.floor(rng.random(n) * np.arange(1, n + 1)).astype(np.int64)
    # pick == i means "no parent"; otherwise the parent is pick itself
    parents = np.where(picks == np.arange(n), -1, picks)
    return build_tree(parents)


def _level_sequences(n):
    """Canonical level sequences of all rooted trees on ``n`` nodes."""
    seq = list(range(1, n + 1))
    while True:
        yield seq
        p = n - 1
        while p > 0 and seq[p] <= 2:
            p -= 1
        if p == 0:
            return
        q = p - 1
        while seq[q] != seq[p] - 1:
            q -= 1
        nxt = seq[:p]
        for i in range(p, n):
            nxt.append(nxt[i - (p - q)])
        seq = nxt


def all_forests(n):
    """Every forest on exactly ``n`` nodes, one per isomorphism class.

    Uses rooted trees on ``n + 1`` nodes with the root removed; parents are
    listed as Python ints or None, ready for :func:`build_tree`.
    """
    if n < 1:
        return
    for seq in _level_sequences(n + 1):
        parents = []
        last_at_level = {}
        for i, lev in enumerate(seq):
            if i > 0:
                p = last_at_level[lev - 1]
                parents.append(None if p == 0 else p - 1)
            last_at_level[lev] = i
        yield parents


def parse_tree_kind(kind):
    """Build a tree from ``"full-binary:d"`` or ``"random:n:seed"``."""
    parts = kind.split(":")
    try:
        if parts[0] == "full-binary" and len(parts) == 2:
            d = int(parts[1])
            if d < 1:
                raise InvalidParameter("full-binary depth must be >= 1")
            return full_binary_tree(d)
        if parts[0] == "random" and len(parts) == 3:
            return random_tree(int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise InvalidParameter(f"bad tree kind {kind!r}: {exc}") from None
    raise InvalidParameter(f"unknown tree kind {kind!r}")
