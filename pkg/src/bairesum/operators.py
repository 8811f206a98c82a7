"""Coordinate projections on tree vectors and the T2 to T0 comparison."""

from dataclasses import dataclass

import numpy as np

from .engine import t0_norm_auto, t2_norm
from .errors import EmptyVector, InvalidParameter
from .tree import Segment, validate_segment


@dataclass(frozen=True)
class Branch:
    """A finite branch, stored as its deepest node.

    The path runs from the minimal node above ``end`` down to ``end``.
    """

    tree: object
    end: int

    def __post_init__(self):
        self.tree.check_node(self.end)

    @property
    def path(self):
        tree = self.tree
        nodes = [self.end]
        p = tree.parent_of(self.end)
        while p is not None:
            nodes.append(p)
            p = tree.parent_of(p)
        nodes.reverse()
        return Segment(tuple(nodes))


@dataclass(frozen=True)
class RangeInterval:
    """Closed interval ``[lo, hi]`` of enumeration positions."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise InvalidParameter(f"empty interval [{self.lo}, {self.hi}]")

    def __contains__(self, position):
        return self.lo <= position <= self.hi

    def __iter__(self):
        yield self.lo
        yield self.hi

    @classmethod
    def parse(cls, text):
        """``"lo:hi"``."""
        try:
            lo, hi = (int(x) for x in text.split(":"))
        except ValueError:
            raise InvalidParameter(f"interval must look like lo:hi, got {text!r}") from None
        return cls(lo, hi)


def project_nodes(z, nodes):
    """Keep the coefficients of ``z`` on ``nodes``."""
    return z.restricted(np.isin(z.nodes, np.fromiter(nodes, dtype=np.int64)))


def project_segment(z, seg, tree=None):
    if tree is not None:
        validate_segment(tree, seg)
    return project_nodes(z, seg.nodes)


def project_branch(z, branch):
    return project_nodes(z, branch.path.nodes)


def project_interval(z, enumeration, interval):
    lo, hi = interval
    pos = enumeration.positions(z.nodes)
    return z.restricted((pos >= lo) & (pos <= hi))


def range_of(z, enumeration):
    """Smallest position interval covering the support of ``z``."""
    if z.is_zero:
        raise EmptyVector("the zero vector has no range")
    pos = enumeration.positions(z.nodes)
    return RangeInterval(int(pos.min()), int(pos.max()))


def norm_pair(basis, z):
    """``(T0 result, T2 result)`` for ``z``; the first never exceeds the second."""
    return t0_norm_auto(basis, z), t2_norm(basis, z)
