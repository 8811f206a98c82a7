"""Vectorized exact evaluation for the sup and l2 branch norms.

Both norms have squared values that combine along a path by ``max`` or by
``+`` on squared coefficients, so the T2/T0 recurrences can run level by
level over the compressed support with integer arithmetic.  Coefficients of
one batch share a denominator ``den``; everything below is in units of
``1 / den**2``.

Several coefficient rows over the same node set can be evaluated together:
arrays have shape ``(m, r)`` with one column per row.
"""

from fractions import Fraction

import numpy as np

from .engine import NormResult, _family, _segment
from .tree import SegmentFamily, support_forest

_INT64_SAFE = 1 << 62


def kernel_supported(oracle):
    return bool(oracle.exact) and getattr(oracle, "kernel", None) in ("max", "sum_sq")


def _group_argmax(parents, values):
    """For each distinct parent, the position in ``values`` of its largest
    value (first position on ties)."""
    by_value = np.argsort(-values, kind="stable")
    by_parent = by_value[np.argsort(parents[by_value], kind="stable")]
    p = parents[by_parent]
    first = np.ones(len(p), dtype=bool)
    first[1:] = p[1:] != p[:-1]
    return p[first], by_parent[first]


class BatchEvaluator:
    """T2 and T0 norms for vectors supported inside a fixed node set."""

    def __init__(self, basis, nodes):
        self.basis = basis
        self.mode = basis.oracle.kernel
        if not kernel_supported(basis.oracle):
            raise TypeError(f"oracle {basis.oracle.name} is not kernel-compatible")
        self.sf = support_forest(basis.tree, nodes)
        self.levels = self.sf.levels
        self.cparent = self.sf.cparent
        # per level: children grouped by parent, for reduceat
        self._groups = [None]
        for idx in self.levels[1:]:
            par = self.cparent[idx]
            order = np.argsort(par, kind="stable")
            sorted_par = par[order]
            starts = np.flatnonzero(np.r_[True, sorted_par[1:] != sorted_par[:-1]])
            self._groups.append((idx[order], sorted_par[starts], starts))

    @property
    def nodes(self):
        """The node order expected by :meth:`squared_rows`."""
        return self.sf.nodes

    def align(self, z):
        """Numerators of ``z`` in the evaluator's node order (zeros elsewhere)."""
        k = np.searchsorted(z.nodes, self.sf.nodes)
        k[k == len(z.nodes)] = 0
        if len(z.nodes):
            hit = z.nodes[k] == self.sf.nodes
            if hit.sum() != len(z.nodes):
                raise ValueError("vector support not contained in the evaluator's node set")
            return np.where(hit, z.nums[k], 0)
        return np.zeros(len(self.sf.nodes), dtype=np.int64)

    def _squares(self, nums):
        nums = np.asarray(nums)
        if nums.ndim == 1:
            nums = nums[:, None]
        if nums.size == 0:
            return nums.astype(np.int64)
        if nums.dtype == object:
            peak = max(abs(int(x)) for x in nums.ravel().tolist())
        else:
            peak = int(np.abs(nums).max())
        budget = peak * peak * max(len(nums), 1)
        if nums.dtype != object and budget < _INT64_SAFE:
            nums = nums.astype(np.int64, copy=False)
        else:
            nums = nums.astype(object)
        return nums * nums

    def _run(self, sq, track):
        m = sq.shape[0]
        pb = np.empty_like(sq)
        closed = np.empty_like(sq)
        bc = np.zeros_like(sq)
        cc = np.zeros_like(sq)
        if track:
            end = np.arange(m)
            take = np.zeros(m, dtype=bool)
            best_child = np.full(m, -1, dtype=np.int64)
        for depth in range(len(self.levels) - 1, -1, -1):
            idx = self.levels[depth]
            if self.mode == "max":
                pb[idx] = np.maximum(sq[idx], bc[idx])
            else:
                pb[idx] = sq[idx] + bc[idx]
            closed[idx] = np.maximum(cc[idx], pb[idx])
            if track:
                bch = best_child[idx]
                extend = bch >= 0
                if self.mode == "max":
                    extend &= bc[idx, 0] > sq[idx, 0]
                end[idx[extend]] = end[bch[extend]]
                take[idx] = pb[idx, 0] >= cc[idx, 0]
            if depth:
                par = self.cparent[idx]
                if track:
                    pars, pos = _group_argmax(par, pb[idx, 0])
                    best_child[pars] = idx[pos]
                    bc[pars, 0] = pb[idx[pos], 0]
                    np.add.at(cc, par, closed[idx])
                else:
                    members, pars, starts = self._groups[depth]
                    bc[pars] = np.maximum.reduceat(pb[members], starts, axis=0)
                    cc[pars] = np.add.reduceat(closed[members], starts, axis=0)
        roots = self.levels[0] if self.levels else np.empty(0, dtype=np.int64)
        t2 = closed[roots].sum(axis=0)
        t0 = pb.max(axis=0) if m else np.zeros(sq.shape[1], dtype=sq.dtype)
        if not track:
            return t2, t0, None
        return t2, t0, (pb[:, 0], end, take)

    def squared_rows(self, nums):
        """Integer squared T2 and T0 norms for each column of ``nums``.

        ``nums`` is ``(m,)`` or ``(m, r)`` in the order of :attr:`nodes`;
        divide by ``den**2`` to get the squared norms.
        """
        if len(self.sf) == 0:
            r = 1 if np.ndim(nums) < 2 else np.shape(nums)[1]
            return np.zeros(r, dtype=np.int64), np.zeros(r, dtype=np.int64)
        sq = self._squares(nums)
        if len(self.levels) == 1:
            return sq.sum(axis=0), sq.max(axis=0)
        t2, t0, _ = self._run(sq, track=False)
        return t2, t0

    def evaluate(self, z, witness=True):
        """``(T2 result, T0 result)`` for one vector."""
        if z.is_zero:
            return (
                NormResult(Fraction(0), True, SegmentFamily(()), "t2"),
                NormResult(Fraction(0), True, None, "t0"),
            )
        sq = self._squares(self.align(z))
        den2 = z.den * z.den
        t2, t0, info = self._run(sq, track=witness)
        t2_sq = Fraction(int(t2[0]), den2)
        t0_sq = Fraction(int(t0[0]), den2)
        if not witness:
            return NormResult(t2_sq, True, None, "t2"), NormResult(t0_sq, True, None, "t0")
        pb, end, take = info
        blocked = np.zeros(len(self.sf), dtype=bool)
        for depth in range(1, len(self.levels)):
            idx = self.levels[depth]
            par = self.cparent[idx]
            blocked[idx] = blocked[par] | take[par]
        chosen = np.flatnonzero(take & ~blocked)
        fam = _family(self.basis, self.sf, [(int(i), int(end[i])) for i in chosen])
        i0 = int(np.argmax(pb)) if pb.dtype != object else max(range(len(pb)), key=lambda k: (pb[k], -k))
        seg = _segment(self.basis, self.sf, i0, int(end[i0]))
        return NormResult(t2_sq, True, fam, "t2"), NormResult(t0_sq, True, seg, "t0")
