"""Hypothesis strategies for forests and rational vectors."""

from fractions import Fraction

from hypothesis import strategies as st


@st.composite
def parent_lists(draw, min_nodes=1, max_nodes=8):
    n = draw(st.integers(min_nodes, max_nodes))
    parents = []
    for i in range(n):
        choice = draw(st.integers(-1, i - 1))
        parents.append(None if choice < 0 else choice)
    return parents


rationals = st.builds(
    Fraction, st.integers(-12, 12), st.integers(1, 6)
)


@st.composite
def coefficient_maps(draw, n, min_size=0):
    nodes = draw(st.lists(st.integers(0, n - 1), min_size=min_size, max_size=n, unique=True))
    return {v: draw(rationals.filter(lambda c: c != 0)) for v in nodes}


@st.composite
def forest_and_coeffs(draw, max_nodes=8, min_support=0):
    parents = draw(parent_lists(max_nodes=max_nodes))
    coeffs = draw(coefficient_maps(len(parents), min_size=min(min_support, len(parents))))
    return parents, coeffs
