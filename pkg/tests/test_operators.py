from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import reference as ref
from bairesum.engine import segment_value_sq, t2_norm_dp
from bairesum.errors import EmptyVector, InvalidParameter, NotASegment
from bairesum.numeric import TOL, to_mpf
from bairesum.operators import (
    Branch,
    RangeInterval,
    norm_pair,
    project_branch,
    project_interval,
    project_segment,
    range_of,
)
from bairesum.oracles import SchauderTreeBasis, c0_spreading, lp_spreading
from bairesum.tree import Segment, bfs_enumeration, build_tree, restrict_segment
from bairesum.vector import TreeVector
from strategies import forest_and_coeffs

F = Fraction
C0, L1, L2 = c0_spreading(), lp_spreading(1), lp_spreading(2)


def vec(coeffs):
    return TreeVector.from_mapping(coeffs)


def le(a, b):
    return to_mpf(a) <= to_mpf(b) + TOL


# -- examples -----------------------------------------------------------------


def test_project_segment_examples():
    tree = build_tree([None, 0, 0])
    z = vec({0: 1, 1: 2, 2: 3})
    assert project_segment(z, Segment((0, 1))).to_dict() == {0: 1, 1: 2}
    chain = vec({0: 1, 1: 2})
    assert project_segment(chain, Segment((0, 1)), tree) == chain
    assert project_segment(vec({2: 5}), Segment((0, 1))).is_zero
    with pytest.raises(NotASegment):
        project_segment(z, Segment((1, 2)), tree)


def test_branch_examples():
    tree = build_tree([None, 0, 1, 1])
    assert Branch(tree, 2).path.nodes == (0, 1, 2)
    z = vec({0: 1, 1: 1, 2: 1})
    assert project_branch(z, Branch(tree, 2)) == z
    assert project_branch(vec({3: 4}), Branch(tree, 2)).is_zero
    half = vec({0: 1, 2: 2, 3: 3})
    assert project_branch(half, Branch(tree, 3)).to_dict() == {0: 1, 3: 3}
    with pytest.raises(IndexError):
        Branch(tree, 9)


def test_interval_examples():
    tree = build_tree([None, 0, 0, 1, 1])
    e = bfs_enumeration(tree)
    z = vec({v: v + 1 for v in range(5)})
    assert project_interval(z, e, RangeInterval(0, 4)) == z
    assert project_interval(vec({3: 1}), e, RangeInterval(0, 1)).is_zero
    k = 2
    assert set(project_interval(z, e, RangeInterval(0, k)).to_dict()) == set(e.nodes[: k + 1].tolist())


def test_range_examples():
    tree = build_tree([None] * 8)
    e = bfs_enumeration(tree)
    assert range_of(vec({5: 1}), e) == RangeInterval(5, 5)
    assert range_of(vec({2: 1, 7: -1}), e) == RangeInterval(2, 7)
    assert range_of(vec({v: 1 for v in range(8)}), e) == RangeInterval(0, 7)
    with pytest.raises(EmptyVector):
        range_of(vec({}), e)


def test_range_interval_parse():
    assert RangeInterval.parse("2:5") == RangeInterval(2, 5)
    with pytest.raises(InvalidParameter):
        RangeInterval.parse("5:2")
    with pytest.raises(InvalidParameter):
        RangeInterval.parse("a")


def test_norm_pair_examples():
    sib = SchauderTreeBasis(build_tree([None, 0, 0]), C0)
    t0, t2 = norm_pair(sib, vec({1: 3, 2: 4}))
    assert (t0.value_exact, t2.value_exact) == (4, 5)
    chain = SchauderTreeBasis(build_tree([None, 0]), C0)
    t0, t2 = norm_pair(chain, vec({0: 1, 1: 1}))
    assert (t0.value_exact, t2.value_exact) == (1, 1)
    t0, t2 = norm_pair(chain, vec({}))
    assert t0.value_sq == t2.value_sq == 0


# -- properties ---------------------------------------------------------------


@st.composite
def vector_and_segment(draw, max_nodes=9):
    parents, coeffs = draw(forest_and_coeffs(max_nodes=max_nodes))
    seg = draw(st.sampled_from(ref.all_segments(parents)))
    return parents, coeffs, Segment(seg)


@pytest.mark.parametrize("oracle", [C0, L2, L1], ids=lambda o: o.name)
@given(data=vector_and_segment())
def test_segment_projection_contracts_and_is_isometric(oracle, data):
    parents, coeffs, seg = data
    b = SchauderTreeBasis(build_tree(parents), oracle)
    z = vec(coeffs)
    p = project_segment(z, seg, b.tree)
    assert le(t2_norm_dp(b, p).value_sq, t2_norm_dp(b, z).value_sq)
    # a vector living on one segment has the segment's branch norm
    got, want = t2_norm_dp(b, p).value_sq, segment_value_sq(b, p, seg)
    assert abs(to_mpf(got) - to_mpf(want)) <= TOL


@given(data=vector_and_segment(), other=st.data(), c=st.fractions(-3, 3, max_denominator=4))
def test_projections_idempotent_and_linear(data, other, c):
    parents, coeffs, seg = data
    tree = build_tree(parents)
    e = bfs_enumeration(tree)
    n = len(parents)
    lo = other.draw(st.integers(0, n - 1))
    iv = RangeInterval(lo, other.draw(st.integers(lo, n - 1)))
    w = vec(other.draw(st.dictionaries(st.integers(0, n - 1), st.fractions(-4, 4, max_denominator=3))))
    z = vec(coeffs)
    for proj in (lambda x: project_segment(x, seg), lambda x: project_interval(x, e, iv)):
        assert proj(proj(z)) == proj(z)
        assert proj(z * c + w) == proj(z) * c + proj(w)


@given(data=vector_and_segment(), bounds=st.data())
def test_segment_and_interval_projections_commute(data, bounds):
    parents, coeffs, seg = data
    tree = build_tree(parents)
    e = bfs_enumeration(tree)
    n = len(parents)
    lo = bounds.draw(st.integers(0, n - 1))
    hi = bounds.draw(st.integers(lo, n - 1))
    z = vec(coeffs)
    both = project_segment(project_interval(z, e, RangeInterval(lo, hi)), seg)
    assert both == project_interval(project_segment(z, seg), e, RangeInterval(lo, hi))
    r = restrict_segment(seg, e, lo, hi)
    assert both == (project_segment(z, r) if r is not None else vec({}))


@pytest.mark.parametrize("oracle", [C0, L2], ids=lambda o: o.name)
@given(data=forest_and_coeffs(max_nodes=12))
def test_norm_pair_ordered(oracle, data):
    parents, coeffs = data
    t0, t2 = norm_pair(SchauderTreeBasis(build_tree(parents), oracle), vec(coeffs))
    assert t0.value_sq <= t2.value_sq
