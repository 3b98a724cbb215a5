import numpy as np
import pytest
from hypothesis import given

from manysorted.algebra import as_closure_operator, max_arity
from manysorted.bases import (
    check_tarski_gaps,
    irredundant_bases,
    irredundant_basis_flags,
    is_basis,
    is_irredundant,
    is_minimal_basis,
    minimal_basis_flags,
)
from manysorted.closure import ClosureTable, NotNaryError, constant_closure, identity_closure
from manysorted.core import Carrier, ManySortedError, delta
from manysorted.corpus import binary_not_unary_algebra, gap_algebra, unary_f_algebra
from strategies import algebras, closure_tables

ST = Carrier.of({"s": 2, "t": 1})


def test_basis_examples():
    ident, const = identity_closure(ST), constant_closure(ST)
    assert [X for X in ST.all_subsets() if is_basis(ident, X)] == [ST.full()]
    assert is_basis(const, ST.empty())
    assert is_basis(as_closure_operator(unary_f_algebra()), ST.subset(s=[0, 1]))


def test_irredundant_examples():
    ident, const = identity_closure(ST), constant_closure(ST)
    assert is_irredundant(const, ST.empty())
    assert all(is_irredundant(ident, X) for X in ST.all_subsets())
    r = is_irredundant(const, delta(ST, "s", 0))
    assert not r and r.witness == (0, 0)


def test_minimal_basis_examples():
    assert is_minimal_basis(identity_closure(ST), ST.full())
    assert is_minimal_basis(constant_closure(ST), ST.empty())
    assert not is_minimal_basis(constant_closure(ST), ST.full())


def test_irb_examples(backend):
    assert irredundant_bases(identity_closure(ST)).irb == [3]
    assert irredundant_bases(constant_closure(ST)).irb == [0]
    r = irredundant_bases(as_closure_operator(unary_f_algebra()))
    assert r.irb == [2]
    assert r.bases_by_size[2] == [ST.subset(s=[0, 1])]


def test_tarski_on_binary_instance(backend):
    r = check_tarski_gaps(as_closure_operator(binary_not_unary_algebra()), 2)
    assert r.verdict and r.convex


def test_tarski_gap_fixture(backend):
    J = as_closure_operator(gap_algebra())
    r = check_tarski_gaps(J, 3)
    assert r.irb == [1, 3] and r.gaps == [(1, 3)] and r.verdict
    with pytest.raises(NotNaryError):
        check_tarski_gaps(J, 2)


def test_tarski_needs_n_at_least_two():
    with pytest.raises(ManySortedError):
        check_tarski_gaps(identity_closure(ST), 1)


def test_witness_cap_keeps_counts_exact():
    c = Carrier.of({"s": 4})
    r = irredundant_bases(constant_closure(c), max_witnesses=0)
    assert r.counts == {0: 1} and r.bases_by_size[0] == []
    J = closure_from_points(c)
    r = irredundant_bases(J, max_witnesses=2)
    assert r.counts[1] == 4 and len(r.bases_by_size[1]) == 2


def closure_from_points(c):
    # every nonempty subset generates everything; each singleton is a basis
    T = np.full(c.num_subsets, c.full_mask)
    T[0] = 0
    return ClosureTable(c, T)


@given(closure_tables())
def test_minimal_iff_irredundant_basis(J):
    assert np.array_equal(minimal_basis_flags(J), irredundant_basis_flags(J))
    for X in J.carrier.all_subsets():
        assert is_minimal_basis(J, X) == (is_basis(J, X) and bool(is_irredundant(J, X)))


@given(closure_tables())
def test_bases_are_upward_closed(J):
    full = J.carrier.full_mask
    for X in range(J.carrier.num_subsets):
        if J.closure_mask(X) == full:
            for b in range(J.carrier.total):
                assert J.closure_mask(X | (1 << b)) == full


@given(algebras(max_total=7, max_arity=4))
def test_gaps_bounded_by_arity(A):
    J = as_closure_operator(A)
    n = max(max_arity(A), 2)
    r = check_tarski_gaps(J, n)
    assert r.verdict
    assert all(j - i <= n - 1 for i, j in zip(r.irb, r.irb[1:]))
