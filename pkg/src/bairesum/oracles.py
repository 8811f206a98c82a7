"""
Branch norm oracles: the norm of coefficients placed along one branch.

An oracle sees a branch as ``(depth, coeff)`` pairs with strictly increasing
depth; node identity never reaches it.  Every oracle implements ``norm``;
exact oracles also return rational squared norms from ``sq``.  Oracles that
can stream expose ``init`` / ``push`` / ``state_sq`` so a path can be
extended one node at a time.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import AccumulatorMissing, InvalidParameter
from .numeric import MP, TOL, to_mpf


class BranchNormOracle:
    """Base class for branch norms.

    Subclasses set ``exact`` when squared norms are rational, ``kernel`` to
    ``"max"`` or ``"sum_sq"`` when the vectorized evaluator applies, and
    ``has_accumulator`` when the streaming methods are implemented.
    """

    name = "custom"
    exact = False
    kernel = None
    has_accumulator = False

    def norm(self, entries):
        raise NotImplementedError

    def exact_sq(self, entries):
        raise TypeError(f"oracle {self.name} has no exact squared norm")

    def sq(self, entries):
        """Squared norm: a Fraction for exact oracles, an mpf otherwise."""
        if self.exact:
            return self.exact_sq(entries)
        v = to_mpf(self.norm(entries))
        return v * v

    def init(self):
        raise AccumulatorMissing(f"oracle {self.name} cannot stream")

    def push(self, state, depth, coeff):
        raise AccumulatorMissing(f"oracle {self.name} cannot stream")

    def state_sq(self, state):
        raise AccumulatorMissing(f"oracle {self.name} cannot stream")

    def state_norm(self, state):
        return MP.sqrt(to_mpf(self.state_sq(state)))


@dataclass(frozen=True)
class C0Spreading(BranchNormOracle):
    """Unit vector basis of c0 spread along branches: the sup norm."""

    name: str = field(default="c0", init=False)
    exact = True
    kernel = "max"
    has_accumulator = True

    def norm(self, entries):
        return max((abs(Fraction(c)) for _, c in entries), default=Fraction(0))

    def exact_sq(self, entries):
        m = self.norm(entries)
        return m * m

    def init(self):
        return Fraction(0)

    def push(self, state, depth, coeff):
        c = abs(coeff)
        return c if c > state else state

    def state_sq(self, state):
        return state * state

    def state_norm(self, state):
        return state


@dataclass(frozen=True)
class LpSpreading(BranchNormOracle):
    """Unit vector basis of l_p spread along branches, ``p >= 1`` rational."""

    p: Fraction = Fraction(2)

    def __post_init__(self):
        p = Fraction(self.p)
        if p < 1:
            raise InvalidParameter(f"l_p needs p >= 1, got {p}")
        object.__setattr__(self, "p", p)

    @property
    def name(self):
        if self.p.denominator == 1:
            return f"l{self.p.numerator}"
        return f"lp:{self.p.numerator}/{self.p.denominator}"

    @property
    def exact(self):
        return self.p == 2

    @property
    def kernel(self):
        return "sum_sq" if self.p == 2 else None

    has_accumulator = True

    def _power(self, c):
        c = abs(Fraction(c))
        if self.p.denominator == 1:
            return c ** self.p.numerator
        return MP.power(to_mpf(c), to_mpf(self.p))

    def _root(self, s, power):
        if s == 0:
            return MP.mpf(0)
        return MP.power(to_mpf(s), to_mpf(Fraction(power) / self.p))

    def norm(self, entries):
        s = self.init()
        for d, c in entries:
            s = self.push(s, d, c)
        return self.state_norm(s)

    def exact_sq(self, entries):
        if self.p != 2:
            return super().exact_sq(entries)
        return sum((Fraction(c) ** 2 for _, c in entries), Fraction(0))

    def init(self):
        return Fraction(0) if self.p.denominator == 1 else MP.mpf(0)

    def push(self, state, depth, coeff):
        if coeff == 0:
            return state
        return state + self._power(coeff)

    def state_sq(self, state):
        if self.p == 2:
            return state
        return self._root(state, 2)

    def state_norm(self, state):
        if self.p == 1:
            return state
        return self._root(state, 1)


class FunctionOracle(BranchNormOracle):
    """Adapter for a user-supplied norm function.

    ``accumulator`` is an optional ``(init, push, state_sq)`` triple.
    """

    def __init__(self, norm, exact_sq=None, accumulator=None, name="custom"):
        self._norm = norm
        self._exact_sq = exact_sq
        self._acc = accumulator
        self.name = name
        self.exact = exact_sq is not None
        self.has_accumulator = accumulator is not None

    def norm(self, entries):
        return self._norm(list(entries))

    def exact_sq(self, entries):
        if self._exact_sq is None:
            return super().exact_sq(entries)
        return self._exact_sq(list(entries))

    def init(self):
        if self._acc is None:
            return super().init()
        return self._acc[0]()

    def push(self, state, depth, coeff):
        if self._acc is None:
            return super().push(state, depth, coeff)
        return self._acc[1](state, depth, coeff)

    def state_sq(self, state):
        if self._acc is None:
            return super().state_sq(state)
        return self._acc[2](state)


def c0_spreading():
    return C0Spreading()


def lp_spreading(p):
    return LpSpreading(Fraction(p))


def parse_basis(selector):
    """``"c0"``, ``"l1"``, ``"l2"`` or ``"lp:<num>/<den>"``."""
    if selector == "c0":
        return c0_spreading()
    if selector == "l1":
        return lp_spreading(1)
    if selector == "l2":
        return lp_spreading(2)
    if selector.startswith("lp:"):
        try:
            p = Fraction(selector[3:])
        except (ValueError, ZeroDivisionError):
            raise InvalidParameter(f"bad exponent in {selector!r}") from None
        return lp_spreading(p)
    raise InvalidParameter(f"unknown basis {selector!r}")


# -- validation ---------------------------------------------------------------


@dataclass
class ValidationReport:
    oracle: str
    max_depth: int
    samples: int
    seed: int
    checks: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {
            "oracle": self.oracle,
            "max_depth": self.max_depth,
            "samples": self.samples,
            "seed": self.seed,
            "checks": self.checks,
            "violations": self.violations,
            "ok": self.ok,
        }


def _random_entries(rng, max_depth, max_len=6):
    length = int(rng.integers(0, min(max_depth, max_len) + 1))
    depths = np.sort(rng.choice(max_depth, size=length, replace=False)) + 1
    out = []
    for d in depths.tolist():
        num = int(rng.integers(-20, 21))
        den = int(rng.integers(1, 13))
        out.append((d, Fraction(num, den)))
    return out


def _merge(a, b):
    acc = {}
    for d, c in itertools.chain(a, b):
        acc[d] = acc.get(d, Fraction(0)) + c
    return sorted(acc.items())


def validate_oracle(oracle, max_depth, samples, seed=0):
    """Sample random branches and check the branch-basis axioms.

    Checks normalization, homogeneity, the triangle inequality, projection
    onto every depth interval (bi-monotonicity) and, when the oracle
    streams, agreement of the accumulator with ``norm`` on every prefix.
    """
    if samples < 1:
        raise InvalidParameter("samples must be >= 1")
    rng = np.random.default_rng(seed)
    report = ValidationReport(oracle.name, max_depth, samples, seed)
    exact = oracle.exact

    def fail(check, detail):
        report.violations.append({"check": check, "detail": detail})

    def le(a, b):
        return a <= b if exact else to_mpf(a) <= to_mpf(b) + TOL

    def eq(a, b):
        return a == b if exact else abs(to_mpf(a) - to_mpf(b)) <= TOL

    for _ in range(samples):
        d = int(rng.integers(1, max_depth + 1))
        report.checks += 1
        unit = oracle.norm([(d, Fraction(1))])
        if unit != 1:
            fail("normalization", f"unit vector at depth {d} has norm {unit}")

        b = _random_entries(rng, max_depth)
        other = _random_entries(rng, max_depth)
        lam = Fraction(int(rng.integers(-9, 10)) or 1, int(rng.integers(1, 8)))
        scaled = [(dd, lam * c) for dd, c in b]

        report.checks += 1
        if exact:
            if oracle.sq(scaled) != lam * lam * oracle.sq(b):
                fail("homogeneity", f"scale {lam} on {b}")
        elif abs(to_mpf(oracle.norm(scaled)) - abs(to_mpf(lam)) * to_mpf(oracle.norm(b))) > TOL:
            fail("homogeneity", f"scale {lam} on {b}")

        report.checks += 1
        lhs = to_mpf(oracle.norm(_merge(b, other)))
        rhs = to_mpf(oracle.norm(b)) + to_mpf(oracle.norm(other))
        if lhs > rhs + TOL:
            fail("triangle", f"{b} + {other}")

        full = oracle.sq(b)
        for i in range(len(b)):
            for j in range(i, len(b)):
                report.checks += 1
                if not le(oracle.sq(b[i : j + 1]), full):
                    fail("bimonotone", f"interval {i}..{j} of {b}")

        if oracle.has_accumulator:
            state = oracle.init()
            zstate = oracle.init()
            last = 0
            for k, (dd, c) in enumerate(b):
                state = oracle.push(state, dd, c)
                for gap in range(last + 1, min(dd, last + 4)):
                    zstate = oracle.push(zstate, gap, Fraction(0))
                zstate = oracle.push(zstate, dd, c)
                last = dd
                report.checks += 1
                expect = oracle.sq(b[: k + 1])
                if not eq(oracle.state_sq(state), expect):
                    fail("accumulator", f"prefix {k} of {b}")
                elif not eq(oracle.state_sq(zstate), expect):
                    fail("accumulator-zeros", f"prefix {k} of {b}")
    return report


@lru_cache(maxsize=256)
def _cached_validation(oracle, max_depth):
    return validate_oracle(oracle, max_depth, samples=24, seed=0)


@dataclass(frozen=True)
class SchauderTreeBasis:
    """A tree together with the branch oracle attached to it."""

    tree: object
    oracle: BranchNormOracle
    validate: bool = True

    def __post_init__(self):
        if self.validate:
            try:
                report = _cached_validation(self.oracle, self.tree.max_depth)
            except TypeError:  # unhashable oracle
                report = validate_oracle(self.oracle, self.tree.max_depth, 24, 0)
            if not report.ok:
                first = report.violations[0]
                raise InvalidParameter(
                    f"oracle {self.oracle.name} fails validation: {first['check']}: {first['detail']}"
                )
