"""
Finite certificates for block sequences in the l2 Baire sum.

* :func:`check_block` validates normalization and successive ranges.
* :func:`check_decay` checks the segment decay condition
  ``||w_n||_T0 <= 1 / ((sum_{i<n} |supp w_i|^(1/2)) * 2^(n+2))`` for ``n >= 1``.
* :func:`forge_decaying_sequence` builds sequences meeting that condition on
  a full binary forest.
* :func:`unconditionality_sample` and :func:`upper_l2_sample` estimate
  ratios by seeded sampling; :func:`l1_probe` compares ``||sum w_n||`` with
  ``sum ||w_n||``.
* :func:`singular_witness` gives a unit vector whose segment projections are
  all at most ``epsilon``.

Samplers can refute a bound but never prove it; every report says so.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt, lcm

import mpmath
import numpy as np

from . import numeric
from .engine import t0_norm_auto, t2_norm
from .errors import (
    BudgetExceeded,
    EmptyVector,
    InfeasibleRequest,
    InvalidParameter,
    NotBlock,
    NotNormalized,
    TreeTooSmall,
)
from .kernel import BatchEvaluator, kernel_supported
from .numeric import MP, TOL, approx_str, fraction_str, rational_sqrt, to_mpf
from .operators import range_of
from .oracles import SchauderTreeBasis, c0_spreading
from .tree import FullBinaryTree
from .vector import TreeVector, combine

SAMPLING_NOTE = (
    "sampled coefficients and subsets only: a violation refutes the bound, "
    "the absence of one does not prove it"
)

GRID_DEN = 8
FORGE_SUPPORT_CAP = 1 << 25
DEFAULT_THREADS = 1


def default_threads():
    try:
        return max(1, int(os.environ.get("BAIRESUM_THREADS", DEFAULT_THREADS)))
    except ValueError:
        return DEFAULT_THREADS


# -- block sequences ----------------------------------------------------------


@dataclass(frozen=True)
class BlockSequence:
    vectors: tuple
    enumeration: object
    basis: object = None

    def __len__(self):
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    @property
    def support_sizes(self):
        return [len(w) for w in self.vectors]


def _is_unit(basis, z):
    res = t2_norm(basis, z, witness=False)
    if res.exact:
        return res.value_sq == 1, res
    return abs(res.value - 1) <= TOL, res


def check_block(seq, enumeration, basis):
    """Validate a normalized block sequence (ranges relative to ``enumeration``)."""
    vectors = tuple(seq)
    if not vectors:
        raise InvalidParameter("a block sequence needs at least one vector")
    for i, w in enumerate(vectors):
        if w.is_zero:
            raise NotNormalized(i, "zero vector")
        ok, res = _is_unit(basis, w)
        if not ok:
            shown = fraction_str(res.value_sq) if res.exact else approx_str(res.value_sq)
            raise NotNormalized(i, f"squared norm {shown}")
    ranges = [range_of(w, enumeration) for w in vectors]
    for i in range(len(ranges) - 1):
        if not ranges[i].hi < ranges[i + 1].lo:
            raise NotBlock(
                i, i + 1, f"[{ranges[i].lo}, {ranges[i].hi}] then [{ranges[i + 1].lo}, {ranges[i + 1].hi}]"
            )
    return BlockSequence(vectors, enumeration, basis)


# -- decay --------------------------------------------------------------------


@dataclass
class DecayRecord:
    n: int
    t0_sq: object
    exact: bool
    root_sum: object  # sum of sqrt|supp w_i| for i < n; an int when every size is a square
    root_sum_approx: object
    holds: bool
    mode: str

    @property
    def bound(self):
        """1 / (S * 2^(n+2)) as a Fraction when S is an integer."""
        if self.root_sum is None:
            return None
        return Fraction(1, self.root_sum * 2 ** (self.n + 2))

    def to_json(self):
        bound_approx = 1 / (to_mpf(self.root_sum_approx) * MP.mpf(2) ** (self.n + 2))
        return {
            "n": self.n,
            "t0_sq": fraction_str(self.t0_sq) if self.exact else None,
            "t0_approx": approx_str(MP.sqrt(to_mpf(self.t0_sq))),
            "bound": fraction_str(self.bound) if self.bound is not None else None,
            "bound_approx": approx_str(bound_approx),
            "holds": self.holds,
            "mode": self.mode,
        }


@dataclass
class DecayCertificate:
    records: list
    support_sizes: list

    @property
    def overall(self):
        return all(r.holds for r in self.records)

    def to_json(self):
        return {
            "support_sizes": self.support_sizes,
            "records": [r.to_json() for r in self.records],
            "overall": self.overall,
        }


def _decide(n, t0_sq, exact, sizes):
    """Decide ``t0^2 * (sum sqrt k_i)^2 * 4^(n+2) <= 1`` and say how."""
    roots = [isqrt(k) for k in sizes]
    scale = 4 ** (n + 2)
    all_square = all(r * r == k for r, k in zip(roots, sizes))
    root_sum = sum(roots) if all_square else None
    if not exact:
        s = sum(MP.sqrt(k) for k in sizes)
        holds = to_mpf(t0_sq) * s * s * scale <= 1 + TOL
        return holds, "float", root_sum, s
    if all_square:
        return t0_sq * root_sum**2 * scale <= 1, "exact", root_sum, MP.mpf(root_sum)
    ceil_sum = sum(r if r * r == k else r + 1 for r, k in zip(roots, sizes))
    if t0_sq * ceil_sum**2 * scale <= 1:
        return True, "conservative", None, sum(MP.sqrt(k) for k in sizes)
    iv = mpmath.iv
    old = iv.prec
    iv.prec = 128
    try:
        s = sum((iv.sqrt(iv.mpf(k)) for k in sizes), iv.mpf(0))
        lhs = iv.mpf(t0_sq.numerator) / t0_sq.denominator * s * s * scale
        if lhs.b <= 1:
            verdict, mode = True, "interval"
        elif lhs.a > 1:
            verdict, mode = False, "interval"
        else:
            verdict, mode = False, "interval-inconclusive"
    finally:
        iv.prec = old
    return verdict, mode, None, sum(MP.sqrt(k) for k in sizes)


def check_decay(seq, basis):
    """Per-index decay records; T0 norms come from the engine."""
    vectors = list(seq)
    sizes = [len(w) for w in vectors]
    records = []
    for n in range(1, len(vectors)):
        t0 = t0_norm_auto(basis, vectors[n], witness=False)
        holds, mode, root_sum, root_mp = _decide(n, t0.value_sq, t0.exact, sizes[:n])
        records.append(DecayRecord(n, t0.value_sq, t0.exact, root_sum, root_mp, bool(holds), mode))
    return DecayCertificate(records, sizes)


# -- forge --------------------------------------------------------------------


def forge_plan(length, k0=4):
    """Support sizes and depths of a minimal decaying sequence.

    ``k_n = s_n**2`` with ``s_0**2 = k0`` (rounded up to a square) and
    ``s_n = (s_0 + ... + s_{n-1}) * 2**(n+2)``, the least integer root
    meeting the decay bound.  Vector ``n`` sits below the node ``1^n 0`` of
    depth ``n + 1``, at the first depth that is deep enough and strictly
    below the previous vector.
    """
    if length < 1:
        raise InvalidParameter("length must be >= 1")
    if k0 < 1:
        raise InvalidParameter("k0 must be >= 1")
    s = isqrt(k0 - 1) + 1
    plan = []
    total = 0
    prev_depth = 0
    for n in range(length):
        if n:
            s = total * 2 ** (n + 2)
        k = s * s
        depth = max(prev_depth + 1, n + 1 + (k - 1).bit_length())
        plan.append({"n": n, "k": k, "root": s, "depth": depth})
        total += s
        prev_depth = depth
    return plan


def _subtree_root(n):
    """Heap id of the node ``1^n 0`` (``0`` for ``n == 0``)."""
    if n == 0:
        return 0
    r = 1
    for _ in range(n - 1):
        r = 2 * r + 3
    return 2 * r + 2


def forge_decaying_sequence(tree, length, seed=0, k0=4):
    """Normalized block sequence on a full binary forest that meets the decay
    condition with the c0 branch oracle.

    Vector ``n`` has coefficient ``1/s_n`` on ``k_n = s_n**2`` nodes of one
    level inside its own subtree.  ``seed`` picks where the window of
    ``k_n`` nodes starts within that level.
    """
    plan = forge_plan(length, k0)
    depth = tree.full_binary_depth()
    if depth is None:
        raise InvalidParameter("the forge needs a full binary forest")
    need = plan[-1]["depth"]
    ks = [p["k"] for p in plan]
    if depth < need:
        raise TreeTooSmall(
            f"length {length} needs full binary depth {need}, tree has depth {depth}",
            required_depth=need,
            support_sizes=ks,
        )
    total = sum(ks)
    if total > FORGE_SUPPORT_CAP:
        raise InfeasibleRequest(
            f"length {length} needs {total} support nodes in total; the cap is {FORGE_SUPPORT_CAP}"
        )
    fb = tree if isinstance(tree, FullBinaryTree) else FullBinaryTree(depth)
    rng = np.random.default_rng(seed)
    vectors = []
    for p in plan:
        below = fb.descendants_at_depth(_subtree_root(p["n"]), p["depth"])
        spare = len(below) - p["k"]
        start = below.start + (int(rng.integers(0, spare + 1)) if spare else 0)
        nodes = np.arange(start, start + p["k"], dtype=np.int64)
        vectors.append(TreeVector(nodes, np.ones(p["k"], dtype=np.int64), p["root"]))
    basis = SchauderTreeBasis(tree, c0_spreading())
    return BlockSequence(tuple(vectors), tree.bfs_enumeration(), basis)


# -- sampled ratios -----------------------------------------------------------


class _Combiner:
    """Norms of linear combinations ``sum a_n w_n`` for many coefficient rows.

    Rows are integer numerators over ``GRID_DEN``.
    """

    def __init__(self, basis, vectors, threads=None):
        self.basis = basis
        self.vectors = list(vectors)
        self.exact = basis.oracle.exact
        self.threads = threads or default_threads()
        self.fast = kernel_supported(basis.oracle) and self._disjoint()
        if self.fast:
            wden = lcm(*(w.den for w in self.vectors))
            self.den = wden * GRID_DEN
            union = np.concatenate([w.nodes for w in self.vectors])
            owner = np.concatenate([np.full(len(w), n, dtype=np.int64) for n, w in enumerate(self.vectors)])
            nums = np.concatenate([w.nums * (wden // w.den) for w in self.vectors])
            self.evaluator = BatchEvaluator(basis, union)
            pos = np.searchsorted(self.evaluator.nodes, union) if _sorted(self.evaluator.nodes) else None
            if pos is None:
                order = np.argsort(self.evaluator.nodes)
                pos = order[np.searchsorted(self.evaluator.nodes[order], union)]
            self.owner = np.empty(len(union), dtype=np.int64)
            self.wnum = np.empty(len(union), dtype=nums.dtype)
            self.owner[pos] = owner
            self.wnum[pos] = nums
            self.chunk = max(1, 4_000_000 // max(len(union), 1))

    def _disjoint(self):
        sizes = sum(len(w) for w in self.vectors)
        if sizes == 0:
            return False
        union = np.unique(np.concatenate([w.nodes for w in self.vectors]))
        return len(union) == sizes

    def _rows_kernel(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        out = []
        for lo in range(0, len(rows), self.chunk):
            block = rows[lo : lo + self.chunk]
            nums = self.wnum[:, None] * block.T[self.owner]
            t2, _ = self.evaluator.squared_rows(nums)
            out.extend(int(v) for v in t2.tolist())
        return out

    def norms_sq(self, rows):
        """Squared T2 norms, as Fractions (exact oracle) or mpf values."""
        if not rows:
            return []
        if self.fast:
            chunks = [rows[i : i + self.chunk] for i in range(0, len(rows), self.chunk)]
            if self.threads > 1 and len(chunks) > 1:
                with ThreadPoolExecutor(self.threads) as pool:
                    parts = list(pool.map(self._rows_kernel, chunks))
            else:
                parts = [self._rows_kernel(c) for c in chunks]
            den2 = self.den * self.den
            return [Fraction(v, den2) for part in parts for v in part]
        out = []
        for row in rows:
            z = combine([(Fraction(a, GRID_DEN), w) for a, w in zip(row, self.vectors)])
            out.append(t2_norm(self.basis, z, witness=False).value_sq)
        return out


def _sorted(arr):
    return len(arr) < 2 or bool((np.diff(arr) > 0).all())


def _structured_rows(length):
    full = GRID_DEN
    rows = [[full] * length, [full if i % 2 == 0 else -full for i in range(length)]]
    for i in range(length):
        spike = [0] * length
        spike[i] = full
        rows.append(spike)
    return rows


def _coefficient_rows(length, trials, rng):
    rows = _structured_rows(length)[:trials]
    extra = trials - len(rows)
    if extra > 0:
        rows.extend(rng.integers(-GRID_DEN, GRID_DEN + 1, size=(extra, length)).tolist())
    return rows


def _ratio_str(value_sq, exact):
    return fraction_str(value_sq) if exact else None


@dataclass
class UnconditionalityReport:
    trials: int
    evaluated: int
    degenerate: int
    max_ratio_sq: object
    exact: bool
    attaining: dict
    violations: int
    endpoint_checks: int
    threshold_sq: int = 3

    @property
    def max_ratio(self):
        return MP.sqrt(to_mpf(self.max_ratio_sq))

    @property
    def holds(self):
        return self.violations == 0

    def to_json(self):
        return {
            "trials": self.trials,
            "evaluated": self.evaluated,
            "degenerate": self.degenerate,
            "max_ratio_sq": _ratio_str(self.max_ratio_sq, self.exact),
            "max_ratio_approx": approx_str(self.max_ratio),
            "threshold": "sqrt(3)",
            "threshold_sq": str(self.threshold_sq),
            "attaining": self.attaining,
            "violations": self.violations,
            "endpoint_checks": self.endpoint_checks,
            "holds": self.holds,
            "exact": self.exact,
            "note": SAMPLING_NOTE,
        }


def _row_json(row):
    return [fraction_str(Fraction(a, GRID_DEN)) for a in row]


def unconditionality_sample(seq, basis, trials, seed=0, threads=None):
    """Largest sampled ``||sum_F a_n w_n|| / ||sum a_n w_n||``.

    Coefficients are multiples of 1/8 in [-1, 1]; the first trials use
    all-ones, alternating signs and single spikes.  Each trial draws a random
    subset ``F``.  The bound ``sqrt(3)`` is tested as
    ``3 * ||sum||^2 - ||sum_F||^2 >= 0`` (exactly for exact oracles).
    """
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    vectors = list(seq)
    length = len(vectors)
    rng = np.random.default_rng(seed)
    rows = _coefficient_rows(length, trials, rng)
    masks = rng.integers(0, 2, size=(trials, length)).astype(bool).tolist()
    sub_rows = [[a if m else 0 for a, m in zip(row, mask)] for row, mask in zip(rows, masks)]
    comb = _Combiner(basis, vectors, threads)
    full = comb.norms_sq(rows)
    sub = comb.norms_sq(sub_rows)
    exact = comb.exact
    empty = comb.norms_sq([[0] * length])[0]

    best, attaining = None, {}
    degenerate = violations = endpoints = 0
    for row, mask, f, s in zip(rows, masks, full, sub):
        if f == 0:
            degenerate += 1
            continue
        ratio = s / f
        # F empty must give ratio 0 (the zero combination is evaluated, not
        # assumed); F everything is this row itself, so its ratio is 1
        if empty == 0:
            endpoints += 1
        slack = 3 * f - s
        if (slack < 0) if exact else (slack < -TOL):
            violations += 1
        if best is None or ratio > best:
            best = ratio
            attaining = {
                "coeffs": _row_json(row),
                "subset": [i for i, m in enumerate(mask) if m],
            }
    if best is None:
        best = numeric.zero(exact)
    return UnconditionalityReport(
        trials, trials - degenerate, degenerate, best, exact, attaining, violations, endpoints
    )


@dataclass
class UpperL2Report:
    trials: int
    evaluated: int
    max_ratio_sq: object
    exact: bool
    attaining: list

    @property
    def max_ratio(self):
        return MP.sqrt(to_mpf(self.max_ratio_sq))

    @property
    def finite(self):
        return bool(MP.isfinite(self.max_ratio))

    def to_json(self):
        return {
            "trials": self.trials,
            "evaluated": self.evaluated,
            "max_ratio_sq": _ratio_str(self.max_ratio_sq, self.exact),
            "max_ratio_approx": approx_str(self.max_ratio),
            "attaining": self.attaining,
            "finite": self.finite,
            "exact": self.exact,
            "note": SAMPLING_NOTE,
        }


def upper_l2_sample(seq, basis, trials, seed=0, threads=None):
    """Largest sampled ``||sum a_n w_n|| / (sum a_n^2)^(1/2)``."""
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    vectors = list(seq)
    rng = np.random.default_rng(seed)
    rows = _coefficient_rows(len(vectors), trials, rng)
    comb = _Combiner(basis, vectors, threads)
    norms = comb.norms_sq(rows)
    best, attaining, evaluated = None, [], 0
    for row, v in zip(rows, norms):
        l2 = Fraction(sum(a * a for a in row), GRID_DEN * GRID_DEN)
        if l2 == 0:
            continue
        evaluated += 1
        ratio = v / l2 if comb.exact else v / to_mpf(l2)
        if best is None or ratio > best:
            best, attaining = ratio, _row_json(row)
    if best is None:
        best = numeric.zero(comb.exact)
    return UpperL2Report(trials, evaluated, best, comb.exact, attaining)


@dataclass
class L1Probe:
    sum_norm_sq: object
    norms_sq: list
    exact: bool

    @property
    def value(self):
        """``||sum w_n|| / sum ||w_n||`` as an mpf."""
        total = sum((MP.sqrt(to_mpf(v)) for v in self.norms_sq), MP.mpf(0))
        return MP.sqrt(to_mpf(self.sum_norm_sq)) / total

    @property
    def value_exact(self):
        if not self.exact:
            return None
        roots = [rational_sqrt(v) for v in self.norms_sq]
        top = rational_sqrt(self.sum_norm_sq)
        if top is None or any(r is None for r in roots):
            return None
        return top / sum(roots)

    @property
    def below_one(self):
        exact = self.value_exact
        if exact is not None:
            return exact < 1
        return self.value < 1 - TOL

    def to_json(self):
        exact = self.value_exact
        return {
            "value": fraction_str(exact) if exact is not None else None,
            "value_approx": approx_str(self.value),
            "below_one": self.below_one,
            "length": len(self.norms_sq),
        }


def l1_probe(seq, basis):
    """Compare ``||sum w_n||`` with ``sum ||w_n||``."""
    vectors = list(seq)
    if not vectors:
        raise EmptyVector("empty sequence")
    norms = [t2_norm(basis, w, witness=False) for w in vectors]
    total = t2_norm(basis, combine([(1, w) for w in vectors]), witness=False)
    return L1Probe(total.value_sq, [r.value_sq for r in norms], total.exact)


# -- singular witness ---------------------------------------------------------


def _antichain(tree, k):
    for d in range(1, tree.max_depth + 1):
        level = tree.level(d)
        if len(level) >= k:
            return np.asarray(level[:k], dtype=np.int64)
    leaves = np.asarray(tree.leaves(), dtype=np.int64)
    if len(leaves) >= k:
        return np.sort(leaves)[:k]
    raise TreeTooSmall(
        f"no antichain of {k} nodes: the tree has only {len(leaves)} leaves",
        required_width=k,
        available_width=len(leaves),
    )


def singular_witness(basis, epsilon, budget=10**6):
    """Unit vector with every segment projection of norm at most ``epsilon``.

    Uses ``s = ceil(1/epsilon)`` and puts ``1/s`` on an antichain of ``s**2``
    nodes (the shallowest level that is wide enough, else the leaves).
    ``budget`` caps the support size.
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= 1:
        raise InvalidParameter("epsilon must lie in (0, 1]")
    s = -((-epsilon.denominator) // epsilon.numerator)
    k = s * s
    if k > budget:
        raise BudgetExceeded(k, budget)
    nodes = _antichain(basis.tree, k)
    return TreeVector(np.sort(nodes), np.ones(k, dtype=np.int64), s)
