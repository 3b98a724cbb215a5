"""Build an algebra whose subalgebra generation reproduces a uniform closure operator.

For every subset ``X`` of the carrier, every sort ``s`` and every ``b`` in
``J(X)_s`` there is one operation ``F[X|s:b]`` whose arity is the canonical
word of ``X``.  On an argument tuple ``a`` it returns ``b`` when the entries
of ``a`` make up exactly ``X``, and otherwise the least element of sort ``s``
in the closure of those entries.  Uniformity of ``J`` guarantees that this
least element exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .algebra import Algebra, OpDecl, Signature, sg_table_via_e
from .closure import (
    ClosureOperator,
    NotUniformError,
    is_uniform,
    require_closure,
    require_n_ary,
)
from .core import (
    Carrier,
    ManySortedError,
    MSSubset,
    Word,
    format_spec,
    popcount,
)

MAX_TABLE_ENTRIES = 20_000_000


class SynthesisError(ManySortedError):
    pass


@dataclass(frozen=True)
class OpOrigin:
    """Where a synthesized operation comes from: the pair ``(X, b)`` plus its word."""

    subset: MSSubset
    sort: int
    element: int
    word: Word


@dataclass
class SynthesizedAlgebra:
    algebra: Algebra
    provenance: dict[str, OpOrigin]

    @property
    def num_ops(self) -> int:
        return len(self.algebra.signature.ops)

    @property
    def num_entries(self) -> int:
        return sum(int(t.size) for t in self.algebra.tables.values())


def canonical_word(X: MSSubset) -> Word:
    """Sorts of ``X`` in index order, each repeated as often as ``X`` has elements there."""
    c = X.carrier
    seq = []
    for s in range(len(c.sorts)):
        seq.extend([s] * len(X.coord(s)))
    return Word(c.sorts, tuple(seq))


def canonical_tuple(X: MSSubset) -> tuple[int, ...]:
    """The argument tuple listing ``X`` in the order of :func:`canonical_word`."""
    return tuple(x for _, x in X.elements())


def m_of(carrier: Carrier, w: Word | Sequence[int], a: Sequence[int]) -> MSSubset:
    """The subset made of the entries of ``a``, entry ``i`` read in sort ``w[i]``."""
    seq = tuple(w.seq if isinstance(w, Word) else w)
    if len(seq) != len(a):
        raise ManySortedError(f"tuple of length {len(a)} does not match word of length {len(seq)}")
    mask = 0
    for s, x in zip(seq, a):
        mask |= carrier.bit(s, int(x))
    return MSSubset(carrier, mask)


def choose(Y: MSSubset, s: int) -> int:
    """Least element of ``Y_s``."""
    m = Y.coord_mask(s)
    if not m:
        raise ManySortedError(f"cannot choose from empty coordinate {Y.carrier.sorts.names[s]!r} of {Y}")
    return (m & -m).bit_length() - 1


def op_name(X: MSSubset, s: int, b: int) -> str:
    return f"F[{format_spec(X)}|{X.carrier.sorts.names[s]}:{b}]"


def _arg_masks(c: Carrier, seq: tuple[int, ...]) -> np.ndarray:
    """For every tuple over ``A_w``, the mask of its entries (shape ``A_w``)."""
    k = len(seq)
    out = np.zeros(tuple(c.sizes[s] for s in seq), dtype=np.int64)
    for i, s in enumerate(seq):
        bits = np.int64(1) << (c.offsets[s] + np.arange(c.sizes[s], dtype=np.int64))
        out = out | bits.reshape([-1 if j == i else 1 for j in range(k)])
    return out


def _least_in_sort(c: Carrier, masks: np.ndarray, s: int) -> np.ndarray:
    """Least element of sort ``s`` in each mask, ``-1`` where the coordinate is empty."""
    coord = (masks >> c.offsets[s]) & ((1 << c.sizes[s]) - 1)
    low = coord & -coord
    out = np.full(coord.shape, -1, dtype=np.int64)
    nz = low != 0
    out[nz] = np.log2(low[nz]).astype(np.int64)
    return out


def estimate_entries(J: ClosureOperator, bound: int | None = None) -> int:
    """Total table entries the construction would produce."""
    c = J.carrier
    T = J.table()
    total = 0
    for X in range(c.num_subsets):
        if bound is not None and popcount(X) > bound:
            continue
        sub = MSSubset(c, X)
        width = 1
        for s in range(len(c.sorts)):
            width *= c.sizes[s] ** len(sub.coord(s))
        total += width * popcount(int(T[X]))
    return total


def _build(J: ClosureOperator, bound: int | None) -> SynthesizedAlgebra:
    c = J.carrier
    T = J.table()
    entries = estimate_entries(J, bound)
    if entries > MAX_TABLE_ENTRIES:
        raise SynthesisError(
            f"synthesized tables would hold {entries} entries (limit {MAX_TABLE_ENTRIES})"
        )
    decls: list[OpDecl] = []
    tables: dict[str, np.ndarray] = {}
    provenance: dict[str, OpOrigin] = {}
    for X in kernels.canonical_order(c.total).tolist():
        if bound is not None and popcount(X) > bound:
            continue
        sub = MSSubset(c, X)
        w = canonical_word(sub)
        args = _arg_masks(c, w.seq)
        closed_args = T[args]
        hit = args == X
        closure = MSSubset(c, int(T[X]))
        for s in range(len(c.sorts)):
            members = sorted(closure.coord(s))
            if not members:
                continue
            fallback = _least_in_sort(c, closed_args, s)
            if np.any(fallback[~hit] < 0):
                raise SynthesisError(
                    f"empty coordinate while building ops for {sub}; operator is not uniform"
                )
            for b in members:
                name = op_name(sub, s, b)
                decls.append(OpDecl(name, w.seq, s))
                tables[name] = np.where(hit, b, fallback)
                provenance[name] = OpOrigin(sub, s, b, w)
    sig = Signature(c.sorts, tuple(decls))
    algebra = Algebra(c, sig, tables)
    if not np.array_equal(sg_table_via_e(algebra), T):
        raise SynthesisError("synthesized algebra does not reproduce the operator")
    return SynthesizedAlgebra(algebra, provenance)


def _require_uniform(J: ClosureOperator) -> None:
    report = is_uniform(J)
    if not report:
        raise NotUniformError(report.witness)


def synthesize(J: ClosureOperator) -> SynthesizedAlgebra:
    """An algebra ``A`` with ``Sg_A == J``; raises :class:`NotUniformError` if
    no such algebra exists.  The result is checked on every subset before it
    is returned."""
    require_closure(J)
    _require_uniform(J)
    return _build(J, None)


def synthesize_bounded(J: ClosureOperator, n: int) -> SynthesizedAlgebra:
    """Like :func:`synthesize`, keeping only operations of arity at most ``n``.

    Requires ``J`` to be ``n``-ary; otherwise raises :class:`NotNaryError`
    carrying a subset where the tower and ``J`` disagree.
    """
    if n < 0:
        raise ManySortedError("n must be a natural number")
    require_closure(J)
    _require_uniform(J)
    require_n_ary(J, n)
    return _build(J, n)
