"""
Norm evaluation in the l2 and c0 Baire sums of a tree basis.

For a finitely supported ``z``:

* the T2 norm is the largest l2 aggregate of segment norms over families of
  pairwise incomparable segments;
* the T0 norm is the largest single segment norm.

Only segments whose two endpoints carry nonzero coefficients need to be
considered: interior zeros do not change a segment's norm, and trimming a
segment to its support only relaxes incomparability.  All evaluators work on
the support compressed to its induced ancestor relation
(:class:`~bairesum.tree.SupportForest`).

Evaluators
----------
``t2_norm_bruteforce``  enumerate every family (the reference)
``t2_norm_dp``          bottom-up recurrence with streamed path norms
``t0_norm``             best single path from each support node
``t2_norm``             dispatcher; large vectors with a sup or l2 oracle
                        go to the vectorized kernel in :mod:`bairesum.kernel`
"""

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from . import numeric
from .errors import AccumulatorMissing
from .numeric import MP, approx_str, fraction_str, rational_sqrt, to_mpf
from .tree import Segment, SegmentFamily, family_index_tuples, support_forest

KERNEL_THRESHOLD = 256

_ZERO = Fraction(0)


@dataclass(frozen=True)
class NormResult:
    """A norm value with the segments that attain it.

    ``value_sq`` is a Fraction when ``exact`` and an mpf otherwise.
    ``witness`` is a SegmentFamily for T2 norms, a Segment for T0 norms, and
    None for the zero vector or when witness tracking was switched off.
    """

    value_sq: object
    exact: bool
    witness: object = None
    kind: str = "t2"

    @property
    def value(self):
        return MP.sqrt(to_mpf(self.value_sq))

    @property
    def value_exact(self):
        """The norm as a Fraction when it happens to be rational."""
        return rational_sqrt(self.value_sq) if self.exact else None

    def witness_lists(self):
        if self.witness is None:
            return []
        if isinstance(self.witness, Segment):
            return [list(self.witness.nodes)]
        return self.witness.as_lists()

    def to_json(self):
        return {
            "value_sq": fraction_str(self.value_sq) if self.exact else None,
            "value_approx": approx_str(self.value),
            "exact": self.exact,
            "witness": self.witness_lists(),
        }


def _zero_result(exact, kind):
    if kind == "t0":
        return NormResult(numeric.zero(exact), exact, None, "t0")
    return NormResult(numeric.zero(exact), exact, SegmentFamily(()), "t2")


def _entries(basis, z, seg, explicit_zeros):
    tree = basis.tree
    out = []
    for t in seg.nodes:
        c = z.coeff(t)
        if explicit_zeros or c != 0:
            out.append((tree.depth_of(t), c))
    return out


def segment_value_sq(basis, z, seg, explicit_zeros=False):
    """Squared branch norm of ``z`` restricted to ``seg``."""
    return basis.oracle.sq(_entries(basis, z, seg, explicit_zeros))


def segment_value(basis, z, seg, explicit_zeros=False):
    """Branch norm of ``z`` restricted to ``seg``."""
    return basis.oracle.norm(_entries(basis, z, seg, explicit_zeros))


def family_value_sq(basis, z, family):
    total = numeric.zero(basis.oracle.exact)
    for seg in family:
        total += segment_value_sq(basis, z, seg)
    return total


# -- shared preparation -------------------------------------------------------


def _coefficients(z, nodes):
    """Fractions of ``z`` at ``nodes`` (zero off the support)."""
    k = np.searchsorted(z.nodes, nodes)
    k[k == len(z.nodes)] = 0
    hit = z.nodes[k] == nodes if len(z.nodes) else np.zeros(len(nodes), bool)
    nums = z.nums.tolist()
    den = z.den
    return [
        Fraction(nums[kk], den) if h else _ZERO for kk, h in zip(k.tolist(), hit.tolist())
    ]


def _chain(sf, top, bottom):
    """Indices from ``top`` down to ``bottom`` along compressed parents."""
    out = [bottom]
    cp = sf.cparent
    while out[-1] != top:
        out.append(int(cp[out[-1]]))
    out.reverse()
    return out


def _path_bests(oracle, sf, coeffs, explicit_zeros):
    """For each index, the largest squared norm of a path starting there,
    and the index where that path ends."""
    m = len(sf)
    depths = sf.depths.tolist()
    children = sf.children
    best = [None] * m
    end = [0] * m
    if not oracle.has_accumulator:
        sub = sf.subtree_members()
        for i in range(m):
            b, e = None, i
            for j in sub[i]:
                chain = _chain(sf, i, j)
                v = oracle.sq([(depths[k], coeffs[k]) for k in chain if coeffs[k] != 0])
                if b is None or v > b:
                    b, e = v, j
            best[i], end[i] = b, e
        return best, end

    push, state_sq = oracle.push, oracle.state_sq
    for i in range(m):
        st = push(oracle.init(), depths[i], coeffs[i])
        b, e = state_sq(st), i
        stack = [(c, st, depths[i]) for c in reversed(children[i])]
        while stack:
            c, s, above = stack.pop()
            dc = depths[c]
            if explicit_zeros:
                for d in range(above + 1, dc):
                    s = push(s, d, _ZERO)
            s = push(s, dc, coeffs[c])
            v = state_sq(s)
            if v > b:
                b, e = v, c
            for cc in reversed(children[c]):
                stack.append((cc, s, dc))
        best[i], end[i] = b, e
    return best, end


def _segment(basis, sf, i, j):
    nodes = sf.nodes
    return Segment(tuple(basis.tree.path(int(nodes[i]), int(nodes[j]))))


def _family(basis, sf, pairs):
    segs = sorted((_segment(basis, sf, i, j) for i, j in pairs), key=lambda s: s.min)
    return SegmentFamily(tuple(segs))


# -- T2: brute force ----------------------------------------------------------


def t2_norm_bruteforce(basis, z, budget=10**6, restrict_to_support=True):
    """Maximize over every family of pairwise incomparable segments.

    With ``restrict_to_support=False`` segment endpoints range over all tree
    nodes, which is the literal definition; the default restricts them to
    the support.  Ties are broken towards fewer segments, then smaller
    sorted minimum ids.
    """
    oracle = basis.oracle
    exact = oracle.exact
    if z.is_zero:
        return _zero_result(exact, "t2")
    tree = basis.tree
    candidates = z.nodes if restrict_to_support else np.arange(tree.n_nodes, dtype=np.int64)
    sf = support_forest(tree, candidates)
    families = family_index_tuples(sf, budget)
    coeffs = _coefficients(z, sf.nodes)
    depths = sf.depths.tolist()

    values = {}
    for i, members in enumerate(sf.subtree_members()):
        for j in members:
            chain = _chain(sf, i, j)
            values[(i, j)] = oracle.sq([(depths[k], coeffs[k]) for k in chain if coeffs[k] != 0])
    if exact:
        scale = lcm(*(v.denominator for v in values.values()))
        weight = {p: v.numerator * (scale // v.denominator) for p, v in values.items()}
    else:
        weight = values

    node_ids = sf.nodes.tolist()

    def key(fam):
        return (len(fam), sorted(node_ids[i] for i, _ in fam))

    get = weight.__getitem__
    best, best_fam = None, None
    for fam in families:
        v = sum(map(get, fam))
        if best is None or v > best:
            best, best_fam = v, fam
        elif v == best and key(fam) < key(best_fam):
            best_fam = fam
    value = Fraction(best, scale) if exact else best
    return NormResult(value, exact, _family(basis, sf, best_fam), "t2")


def t2_norm_unrestricted(basis, z, budget=10**6):
    """Brute force over all segments of the tree, not only support-bounded ones."""
    return t2_norm_bruteforce(basis, z, budget, restrict_to_support=False)


# -- T2: dynamic program ------------------------------------------------------


def t2_norm_dp(basis, z, explicit_zeros=True):
    """Bottom-up evaluation of the T2 norm.

    ``closed(v)`` is the best squared aggregate using only segments inside
    the subtree of ``v``: either one segment starting at ``v`` (which
    excludes everything else below it) or the children's values added up.
    The path norms are streamed through the oracle's accumulator; with
    ``explicit_zeros`` the nodes skipped by the compression are pushed as
    zero coefficients.
    """
    oracle = basis.oracle
    if not oracle.has_accumulator:
        raise AccumulatorMissing(f"oracle {oracle.name} has no accumulator")
    exact = oracle.exact
    if z.is_zero:
        return _zero_result(exact, "t2")
    sf = support_forest(basis.tree, z.nodes)
    coeffs = _coefficients(z, sf.nodes)
    best, end = _path_bests(oracle, sf, coeffs, explicit_zeros)

    m = len(sf)
    children = sf.children
    zero = numeric.zero(exact)
    closed = [zero] * m
    take = [False] * m
    for i in range(m - 1, -1, -1):
        below = zero
        for c in children[i]:
            below = below + closed[c]
        if best[i] >= below:
            closed[i], take[i] = best[i], True
        else:
            closed[i] = below
    total = zero
    roots = sf.roots
    for r in roots:
        total = total + closed[r]

    pairs = []
    stack = list(roots)
    while stack:
        i = stack.pop()
        if take[i]:
            pairs.append((i, end[i]))
        else:
            stack.extend(children[i])
    return NormResult(total, exact, _family(basis, sf, pairs), "t2")


# -- T0 -----------------------------------------------------------------------


def t0_norm(basis, z, explicit_zeros=True):
    """Largest norm of ``z`` on a single segment."""
    oracle = basis.oracle
    exact = oracle.exact
    if z.is_zero:
        return _zero_result(exact, "t0")
    sf = support_forest(basis.tree, z.nodes)
    coeffs = _coefficients(z, sf.nodes)
    best, end = _path_bests(oracle, sf, coeffs, explicit_zeros)
    i = max(range(len(sf)), key=lambda k: (best[k], -k))
    return NormResult(best[i], exact, _segment(basis, sf, i, end[i]), "t0")


# -- dispatch -----------------------------------------------------------------


def t2_norm(basis, z, method="auto", witness=True):
    """T2 norm by the requested method (``auto``, ``dp``, ``brute``, ``kernel``)."""
    if method == "auto":
        from .kernel import kernel_supported

        if len(z) > KERNEL_THRESHOLD and kernel_supported(basis.oracle):
            method = "kernel"
        elif basis.oracle.has_accumulator:
            method = "dp"
        else:
            method = "brute"
    if method == "dp":
        return t2_norm_dp(basis, z)
    if method == "brute":
        return t2_norm_bruteforce(basis, z)
    if method == "kernel":
        from .kernel import BatchEvaluator

        return BatchEvaluator(basis, z.nodes).evaluate(z, witness=witness)[0]
    raise ValueError(f"unknown method {method!r}")


def t0_norm_auto(basis, z, witness=True):
    from .kernel import BatchEvaluator, kernel_supported

    if len(z) > KERNEL_THRESHOLD and kernel_supported(basis.oracle):
        return BatchEvaluator(basis, z.nodes).evaluate(z, witness=witness)[1]
    return t0_norm(basis, z)
