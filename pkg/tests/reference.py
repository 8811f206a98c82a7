"""Naive reference implementations used as test oracles.

Everything here works from plain parent lists and dicts of Fractions and
shares no code with the package.
"""

from fractions import Fraction
from itertools import combinations


def ancestors(parents, v):
    out = []
    p = parents[v]
    while p is not None:
        out.append(p)
        p = parents[p]
    return out


def depth(parents, v):
    return len(ancestors(parents, v)) + 1


def comparable(parents, u, v):
    return u == v or u in ancestors(parents, v) or v in ancestors(parents, u)


def all_segments(parents):
    """Every downward path, as a tuple of nodes from top to bottom."""
    out = []
    for bottom in range(len(parents)):
        chain = [bottom] + ancestors(parents, bottom)
        for i in range(len(chain)):
            out.append(tuple(reversed(chain[: i + 1])))
    return out


def segments_incomparable(parents, a, b):
    return all(not comparable(parents, s, t) for s in a for t in b)


def families(parents, segments):
    """All nonempty families of pairwise node-incomparable segments."""
    out = []

    def grow(start, chosen):
        for i in range(start, len(segments)):
            seg = segments[i]
            if all(segments_incomparable(parents, seg, c) for c in chosen):
                fam = chosen + [seg]
                out.append(fam)
                grow(i + 1, fam)

    grow(0, [])
    return out


def sup_sq(values):
    return max((abs(c) for c in values), default=Fraction(0)) ** 2


def l2_sq(values):
    return sum((c * c for c in values), Fraction(0))


def t2_sq(parents, coeffs, branch_sq, segments=None):
    """Max over families of the sum of squared segment norms."""
    segs = all_segments(parents) if segments is None else segments
    best = Fraction(0)
    for fam in families(parents, segs):
        total = sum(branch_sq([coeffs.get(t, Fraction(0)) for t in s]) for s in fam)
        best = max(best, total)
    return best


def t0_sq(parents, coeffs, branch_sq):
    return max(
        (branch_sq([coeffs.get(t, Fraction(0)) for t in s]) for s in all_segments(parents)),
        default=Fraction(0),
    )


def antichain_sq(parents, coeffs):
    """Largest sum of squared coefficients over an antichain."""
    nodes = range(len(parents))
    best = Fraction(0)
    for r in range(1, len(parents) + 1):
        for subset in combinations(nodes, r):
            if all(not comparable(parents, a, b) for a, b in combinations(subset, 2)):
                best = max(best, sum((coeffs.get(t, Fraction(0)) ** 2 for t in subset), Fraction(0)))
    return best
