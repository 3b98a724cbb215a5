"""Hypothesis strategies for carriers, subsets, closure operators and algebras."""

import hypothesis.strategies as st

from manysorted.closure import closure_from_family
from manysorted.core import Carrier, MSSubset
from manysorted.corpus import GenParams, random_algebra

NAMES = "stu"


@st.composite
def carriers(draw, max_sorts=3, max_size=3, max_total=6):
    k = draw(st.integers(1, max_sorts))
    sizes = draw(st.lists(st.integers(1, max_size), min_size=k, max_size=k).filter(lambda s: sum(s) <= max_total))
    return Carrier.of(dict(zip(NAMES, sizes)))


@st.composite
def subsets(draw, carrier):
    return MSSubset(carrier, draw(st.integers(0, carrier.full_mask)))


@st.composite
def closure_tables(draw, max_total=6):
    c = draw(carriers(max_total=max_total))
    family = draw(st.lists(st.integers(0, c.full_mask), max_size=8))
    return closure_from_family(c, family)


@st.composite
def algebras(draw, max_total=6, max_arity=3):
    seed = draw(st.integers(0, 2**32))
    k = draw(st.integers(1, 3))
    p = GenParams(
        seed=seed,
        num_sorts=k,
        max_size=3,
        max_total=max(max_total, k),
        max_ops=4,
        max_arity=draw(st.integers(0, max_arity)),
        nullary_prob=0.2,
        projection_prob=draw(st.sampled_from([0.0, 0.5])),
    )
    return random_algebra(p)
