import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from manysorted.algebra import (
    Algebra,
    OpDecl,
    Signature,
    apply_op,
    as_closure_operator,
    e_stages,
    e_step,
    is_subalgebra,
    make_algebra,
    max_arity,
    sg_table_via_e,
    sg_table_via_intersection,
    sg_via_e,
    sg_via_intersection,
)
from manysorted.closure import check_closure_axioms, is_algebraic, is_n_ary, is_uniform
from manysorted.core import Carrier, ManySortedError, support
from manysorted.corpus import binary_not_unary_algebra, constant_algebra, unary_f_algebra
from manysorted.bases import irredundant_bases, smallest_generating_subset, prune_to_minimal
from strategies import algebras, subsets

UF = unary_f_algebra()
C = UF.carrier


def empty_signature_algebra():
    return make_algebra({"s": 2, "t": 1}, [], {})


def test_apply_op_examples():
    assert apply_op(UF, "f", (1,)) == 0
    assert apply_op(constant_algebra(), "c", ()) == 1
    assert apply_op(binary_not_unary_algebra(), "g", (0, 1)) == 2
    with pytest.raises(ManySortedError):
        apply_op(UF, "f", (2,))


def test_tables_are_validated():
    with pytest.raises(ManySortedError):
        make_algebra({"s": 2}, [("f", ["s"], "s")], {"f": np.array([0, 5])})
    with pytest.raises(ManySortedError):
        make_algebra({"s": 2}, [("f", ["s"], "s")], {"f": np.array([[0, 1], [1, 0]])})
    with pytest.raises(ManySortedError):
        make_algebra({"s": 2}, [("f", ["s"], "s"), ("f", [], "s")], {"f": np.array(0)})


def test_is_subalgebra_examples():
    assert is_subalgebra(UF, C.full())
    assert not is_subalgebra(constant_algebra(), C.empty())
    r = is_subalgebra(UF, C.subset(s=[0, 1]))
    assert not r and r.witness == ("f", (0,))


def test_e_step_examples():
    E = empty_signature_algebra()
    for X in C.all_subsets():
        assert e_step(E, X) == X
        assert X <= e_step(UF, X)
    assert e_step(UF, C.subset(s=[1])) == C.subset(s=[1], t=[0])


def test_sg_examples(backend):
    assert sg_via_e(UF, C.full()) == C.full()
    assert sg_via_e(constant_algebra(), C.empty()) == C.subset(s=[1])
    assert sg_via_e(UF, C.subset(s=[0])) == C.subset(s=[0], t=[0])
    assert sg_via_intersection(UF, C.full()) == C.full()
    E = empty_signature_algebra()
    for X in C.all_subsets():
        assert sg_via_intersection(E, X) == X


def test_max_arity_examples():
    assert max_arity(empty_signature_algebra()) == 0
    mixed = make_algebra(
        {"s": 2}, [("c", [], "s"), ("u", ["s"], "s")], {"c": np.array(0), "u": np.array([1, 0])}
    )
    assert max_arity(mixed) == 1
    assert max_arity(binary_not_unary_algebra()) == 2


def test_operator_of_unary_f(backend):
    J = as_closure_operator(UF)
    assert check_closure_axioms(J).ok
    assert is_uniform(J)
    assert is_n_ary(J, 1)
    assert J(C.subset(s=[0, 1])) == C.full()


def test_signature_lookup():
    sig = Signature(C.sorts, (OpDecl("f", (0,), 1), OpDecl("g", (0, 0), 1)))
    assert sig.op("g").arity == (0, 0)
    assert [o.name for o in sig.of_rank((0,), 1)] == ["f"]
    with pytest.raises(ManySortedError):
        sig.op("h")


# --------------------------------------------------------------------------
# properties


@given(algebras())
def test_two_sg_computations_agree(A):
    assert np.array_equal(sg_table_via_e(A), sg_table_via_intersection(A))


@given(algebras(), st.data())
def test_sg_is_the_least_subalgebra_above(A, data):
    X = data.draw(subsets(A.carrier))
    Y = sg_via_e(A, X)
    assert X <= Y
    assert is_subalgebra(A, Y)
    assert Y == sg_via_intersection(A, X)


@given(algebras(), st.data())
def test_stage_supports_depend_only_on_support(A, data):
    X, Y = data.draw(subsets(A.carrier)), data.draw(subsets(A.carrier))
    if support(X) != support(Y):
        return
    sx, sy = e_stages(A, X), e_stages(A, Y)
    for k in range(max(len(sx), len(sy))):
        a = sx[min(k, len(sx) - 1)]
        b = sy[min(k, len(sy) - 1)]
        assert support(a) == support(b)
    union = frozenset().union(*(support(s) for s in sx))
    assert support(sx[-1]) == union


@given(algebras())
def test_operator_is_uniform_algebraic_and_bounded(A):
    J = as_closure_operator(A)
    assert check_closure_axioms(J).ok
    assert is_uniform(J)
    assert is_algebraic(J)
    assert is_n_ary(J, max(max_arity(A), 1))


@given(algebras(), st.data())
def test_generating_subsets_shrink_to_minimum(A, data):
    X = data.draw(subsets(A.carrier))
    J = as_closure_operator(A)
    K = smallest_generating_subset(J, X)
    if K is None:
        assert J(X) != A.carrier.full()
        return
    assert K <= X and J(K) == A.carrier.full()
    for Y in A.carrier.all_subsets():
        if Y <= X and J(Y) == A.carrier.full():
            assert len(Y) >= len(K)
    P = prune_to_minimal(J, X)
    assert P <= X and J(P) == A.carrier.full()


@given(algebras())
def test_irredundant_bases_exist(A):
    assert irredundant_bases(as_closure_operator(A)).irb


def test_carrier_mismatch():
    other = Algebra(Carrier.of({"s": 1}), Signature(Carrier.of({"s": 1}).sorts, ()), {})
    with pytest.raises(ManySortedError):
        sg_via_e(other, C.full())
