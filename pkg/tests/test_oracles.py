from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bairesum.errors import AccumulatorMissing, InvalidParameter
from bairesum.generate import full_binary_tree
from bairesum.numeric import MP, to_mpf
from bairesum.oracles import (
    FunctionOracle,
    SchauderTreeBasis,
    c0_spreading,
    lp_spreading,
    parse_basis,
    validate_oracle,
)
from strategies import rationals

F = Fraction


@st.composite
def branches(draw, max_len=6):
    depths = sorted(draw(st.sets(st.integers(1, 30), max_size=max_len)))
    return [(d, draw(rationals)) for d in depths]


BUILTINS = [c0_spreading(), lp_spreading(1), lp_spreading(2), lp_spreading(F(3, 2)), lp_spreading(3)]


def test_c0_examples():
    o = c0_spreading()
    assert o.norm([(1, 3), (2, -4)]) == 4
    assert o.norm([(5, 1)]) == 1
    assert o.norm([]) == 0


def test_lp_examples():
    assert lp_spreading(2).norm([(1, 3), (2, 4)]) == 5
    assert lp_spreading(1).norm([(1, 1), (2, 1), (3, 1)]) == 3
    assert lp_spreading(2).norm([(7, -1)]) == 1


def test_lp_rejects_small_exponent():
    with pytest.raises(InvalidParameter):
        lp_spreading(F(1, 2))


def test_exactness_flags():
    assert c0_spreading().exact and lp_spreading(2).exact
    assert not lp_spreading(1).exact and not lp_spreading(3).exact
    with pytest.raises(TypeError):
        lp_spreading(1).exact_sq([(1, 1)])


@pytest.mark.parametrize("selector, name", [("c0", "c0"), ("l1", "l1"), ("l2", "l2"), ("lp:3/2", "lp:3/2")])
def test_parse_basis(selector, name):
    assert parse_basis(selector).name == name


@pytest.mark.parametrize("selector", ["c1", "lp:x", "lp:1/0", "lp:1/3"])
def test_parse_basis_rejects(selector):
    with pytest.raises(InvalidParameter):
        parse_basis(selector)


@pytest.mark.parametrize("oracle", BUILTINS, ids=lambda o: o.name)
def test_builtins_validate_cleanly(oracle):
    report = validate_oracle(oracle, max_depth=10, samples=150, seed=3)
    assert report.ok, report.violations
    assert report.checks > 150


def test_broken_oracle_is_reported():
    broken = FunctionOracle(lambda e: 2 * max((abs(c) for _, c in e), default=F(0)), name="double")
    report = validate_oracle(broken, 5, 10, 0)
    assert any(v["check"] == "normalization" for v in report.violations)
    with pytest.raises(InvalidParameter):
        SchauderTreeBasis(full_binary_tree(2), broken)


def test_summing_basis_fails_bimonotonicity():
    def summing(entries):
        best, run = F(0), F(0)
        for _, c in entries:
            run += c
            best = max(best, abs(run))
        return best

    report = validate_oracle(FunctionOracle(summing, name="summing"), 6, 300, 1)
    assert any(v["check"] == "bimonotone" for v in report.violations)
    # the two-coefficient counterexample
    assert summing([(1, 1), (2, -2)]) == 1 and summing([(2, -2)]) == 2


def test_function_oracle_without_accumulator():
    o = FunctionOracle(lambda e: max((abs(c) for _, c in e), default=F(0)))
    with pytest.raises(AccumulatorMissing):
        o.init()


@pytest.mark.parametrize("oracle", BUILTINS, ids=lambda o: o.name)
@given(b=branches())
def test_dropping_entries_never_increases_norm(oracle, b):
    full = to_mpf(oracle.norm(b))
    for i in range(len(b)):
        assert to_mpf(oracle.norm(b[:i] + b[i + 1 :])) <= full + MP.mpf("1e-25")


@pytest.mark.parametrize("oracle", [c0_spreading(), lp_spreading(2)], ids=lambda o: o.name)
@given(b=branches())
def test_exact_sq_is_norm_squared(oracle, b):
    n = oracle.norm(b)
    sq = oracle.exact_sq(b)
    assert isinstance(sq, Fraction)
    if isinstance(n, Fraction):
        assert sq == n * n
    else:
        assert abs(to_mpf(sq) - n * n) < MP.mpf("1e-28")


@pytest.mark.parametrize("oracle", BUILTINS, ids=lambda o: o.name)
@given(b=branches())
def test_accumulator_agrees_with_zeros_interleaved(oracle, b):
    plain = oracle.init()
    padded = oracle.init()
    last = 0
    for d, c in b:
        plain = oracle.push(plain, d, c)
        for gap in range(last + 1, d):
            padded = oracle.push(padded, gap, F(0))
        padded = oracle.push(padded, d, c)
        last = d
    assert oracle.state_sq(plain) == oracle.state_sq(padded)
    assert abs(to_mpf(oracle.state_sq(plain)) - to_mpf(oracle.sq(b))) < MP.mpf("1e-28")


def test_oracle_ignores_tree():
    # norms depend only on (depth, coeff) pairs
    o = lp_spreading(2)
    assert o.norm([(1, 3), (4, 4)]) == o.norm([(1, 3), (4, 4)])
    assert SchauderTreeBasis(full_binary_tree(2), o).oracle is o
