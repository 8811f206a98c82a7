"""Finitely supported tree vectors with exact rational coefficients.

Coefficients are stored as integer numerators over one shared positive
denominator, so bulk arithmetic stays vectorized and exact.  Numerators live
in an int64 array when they fit and in an object array of Python ints
otherwise.
"""

from fractions import Fraction
from math import gcd, lcm

import numpy as np

_INT64_SAFE = 1 << 62


def _int_array(values):
    """int64 array when every value fits comfortably, object array otherwise."""
    arr = np.asarray(values)
    if arr.dtype == object:
        if arr.size == 0 or max(abs(int(x)) for x in arr.tolist()) < _INT64_SAFE:
            return arr.astype(np.int64)
        return arr
    return arr.astype(np.int64, copy=False)


def _array_gcd(nums):
    if nums.size == 0:
        return 0
    if nums.dtype != object:
        return int(np.gcd.reduce(np.abs(nums)))
    g = 0
    for x in nums.tolist():
        g = gcd(g, x)
    return g


def _scale(nums, factor):
    """Multiply numerators by a Python int without silent overflow."""
    if factor == 1:
        return nums
    if nums.dtype != object:
        peak = int(np.abs(nums).max()) if nums.size else 0
        if peak * abs(factor) < _INT64_SAFE:
            return nums * factor
        nums = nums.astype(object)
    return _int_array(nums * factor)


class TreeVector:
    """An element of c00(T): finitely many nonzero rational coefficients.

    ``nodes`` is sorted and duplicate-free; ``nums[i] / den`` is the
    coefficient of ``nodes[i]``; no stored coefficient is zero and the
    fraction is fully reduced.
    """

    __slots__ = ("nodes", "nums", "den", "_items")

    def __init__(self, nodes, nums, den):
        self.nodes = nodes
        self.nums = nums
        self.den = den
        self._items = None

    @classmethod
    def from_arrays(cls, nodes, nums, den=1):
        """Normalize raw arrays: merge duplicates, drop zeros, reduce."""
        nodes = np.asarray(nodes, dtype=np.int64)
        nums = _int_array(nums)
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            den, nums = -den, -nums
        if nodes.size and (np.diff(nodes) <= 0).any():
            uniq, inverse = np.unique(nodes, return_inverse=True)
            merged = np.zeros(len(uniq), dtype=nums.dtype)
            np.add.at(merged, inverse, nums)
            nodes, nums = uniq, merged
        keep = nums != 0
        if not keep.all():
            nodes, nums = nodes[keep], nums[keep]
        g = gcd(_array_gcd(nums), den)
        if g > 1:
            nums = nums // g
            den //= g
        if nums.size == 0:
            den = 1
        return cls(nodes, _int_array(nums), den)

    @classmethod
    def from_mapping(cls, mapping):
        """Build from ``{node: rational}``; ints, Fractions and "p/q" strings."""
        items = sorted((int(k), Fraction(v)) for k, v in mapping.items())
        den = lcm(*(c.denominator for _, c in items)) if items else 1
        nodes = [k for k, _ in items]
        nums = [c.numerator * (den // c.denominator) for _, c in items]
        return cls.from_arrays(np.array(nodes, dtype=np.int64), np.array(nums, dtype=object), den)

    @classmethod
    def uniform(cls, nodes, coeff):
        """Every node in ``nodes`` gets the same coefficient."""
        coeff = Fraction(coeff)
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        if coeff == 0:
            return cls.zero()
        nums = np.full(len(nodes), coeff.numerator, dtype=np.int64)
        return cls(nodes, nums, coeff.denominator)

    @classmethod
    def zero(cls):
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), 1)

    # -- inspection ---------------------------------------------------------

    def __len__(self):
        return len(self.nodes)

    @property
    def is_zero(self):
        return len(self.nodes) == 0

    @property
    def support(self):
        return self.nodes

    def coeff(self, node):
        k = int(np.searchsorted(self.nodes, node))
        if k < len(self.nodes) and self.nodes[k] == node:
            return Fraction(int(self.nums[k]), self.den)
        return Fraction(0)

    def items(self):
        """``[(node, Fraction), ...]`` in node order (cached)."""
        if self._items is None:
            den = self.den
            self._items = [
                (v, Fraction(n, den)) for v, n in zip(self.nodes.tolist(), self.nums.tolist())
            ]
        return self._items

    def to_dict(self):
        return dict(self.items())

    def __eq__(self, other):
        if not isinstance(other, TreeVector):
            return NotImplemented
        return (
            self.den == other.den
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.nums, other.nums)
        )

    def __hash__(self):
        return hash((self.den, self.nodes.tobytes(), tuple(self.nums.tolist())))

    def __repr__(self):
        if len(self) <= 8:
            body = ", ".join(f"{v}: {c}" for v, c in self.items())
            return f"TreeVector({{{body}}})"
        return f"TreeVector(<{len(self)} nodes>, den={self.den})"

    # -- arithmetic ---------------------------------------------------------

    def scaled(self, factor):
        factor = Fraction(factor)
        if factor == 0 or self.is_zero:
            return TreeVector.zero()
        nums = _scale(self.nums, factor.numerator)
        return TreeVector.from_arrays(self.nodes, nums, self.den * factor.denominator)

    def __neg__(self):
        return TreeVector(self.nodes, -self.nums, self.den)

    def __mul__(self, factor):
        return self.scaled(factor)

    __rmul__ = __mul__

    def __add__(self, other):
        return combine([(1, self), (1, other)])

    def __sub__(self, other):
        return combine([(1, self), (-1, other)])

    def restricted(self, mask):
        """Keep the coefficients where ``mask`` (aligned with ``nodes``) holds."""
        mask = np.asarray(mask, dtype=bool)
        return TreeVector(self.nodes[mask], self.nums[mask], self.den).normalized()

    def restricted_to(self, nodes):
        return self.restricted(np.isin(self.nodes, np.asarray(list(nodes), dtype=np.int64)))

    def normalized(self):
        return TreeVector.from_arrays(self.nodes, self.nums, self.den)


def combine(terms):
    """Exact linear combination ``sum(c * v for c, v in terms)``."""
    terms = [(Fraction(c), v) for c, v in terms if c != 0 and not v.is_zero]
    if not terms:
        return TreeVector.zero()
    den = lcm(*(c.denominator * v.den for c, v in terms))
    nodes, nums = [], []
    for c, v in terms:
        factor = c.numerator * (den // (c.denominator * v.den))
        nodes.append(v.nodes)
        nums.append(_scale(v.nums, factor))
    if any(n.dtype == object for n in nums):
        nums = [n.astype(object) for n in nums]
    return TreeVector.from_arrays(np.concatenate(nodes), np.concatenate(nums), den)
