"""Finite many-sorted closure spaces and algebras, checked by exhaustive enumeration."""

from .algebra import (
    Algebra,
    AlgebraClosure,
    OpDecl,
    Signature,
    apply_op,
    as_closure_operator,
    e_step,
    is_subalgebra,
    max_arity,
    sg_table_via_e,
    sg_table_via_intersection,
    sg_via_e,
    sg_via_intersection,
)
from .bases import (
    IrBReport,
    check_tarski_gaps,
    irredundant_bases,
    is_basis,
    is_irredundant,
    is_minimal_basis,
)
from .closure import (
    ClosureOperator,
    ClosureTable,
    NaryMinorant,
    NotClosureError,
    NotNaryError,
    NotUniformError,
    check_closure_axioms,
    closure_le_n,
    closure_le_n_omega,
    is_algebraic,
    is_n_ary,
    is_n_ary_via_fixed_points,
    is_uniform,
    leq,
)
from .core import (
    Carrier,
    ManySortedError,
    MSSubset,
    Sorts,
    SubsetRelation,
    Word,
    cardinal,
    concat,
    delta,
    enumerate_subsets_le,
    is_subset,
    support,
)
from .synthesis import (
    SynthesizedAlgebra,
    canonical_word,
    choose,
    m_of,
    synthesize,
    synthesize_bounded,
)

__version__ = "0.1.0"
