"""Many-sorted signatures and algebras with fully tabulated operations."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from . import kernels
from .closure import ClosureOperator
from .core import (
    Carrier,
    CarrierMismatchError,
    ManySortedError,
    MSSubset,
    Sorts,
    Word,
)


@dataclass(frozen=True)
class OpDecl:
    name: str
    arity: tuple[int, ...]
    coarity: int


@dataclass(frozen=True)
class Signature:
    sorts: Sorts
    ops: tuple[OpDecl, ...] = ()

    def __post_init__(self):
        ops = []
        seen = set()
        for op in self.ops:
            if op.name in seen:
                raise ManySortedError(f"duplicate operation name {op.name!r}")
            seen.add(op.name)
            arity = tuple(self.sorts.resolve(s) for s in op.arity)
            ops.append(OpDecl(op.name, arity, self.sorts.resolve(op.coarity)))
        object.__setattr__(self, "ops", tuple(ops))

    def op(self, name: str) -> OpDecl:
        for op in self.ops:
            if op.name == name:
                return op
        raise ManySortedError(f"unknown operation {name!r}")

    def word(self, name: str) -> Word:
        return Word(self.sorts, self.op(name).arity)

    def of_rank(self, w: Sequence[int], s: int) -> list[OpDecl]:
        """The declarations with arity ``w`` and coarity ``s``."""
        w = tuple(w)
        return [op for op in self.ops if op.arity == w and op.coarity == s]


class Algebra:
    """A carrier with one total table per operation of the signature.

    ``tables[name]`` is an integer array of shape ``(sizes[w_0], ...,
    sizes[w_k])`` for arity ``w``; a constant has shape ``()``.
    """

    def __init__(self, carrier: Carrier, signature: Signature, tables: Mapping[str, object]):
        if carrier.sorts != signature.sorts:
            raise ManySortedError("carrier and signature use different sorts")
        self.carrier = carrier
        self.signature = signature
        checked = {}
        for op in signature.ops:
            if op.name not in tables:
                raise ManySortedError(f"missing table for operation {op.name!r}")
            t = np.asarray(tables[op.name])
            shape = tuple(carrier.sizes[s] for s in op.arity)
            if t.shape != shape:
                raise ManySortedError(
                    f"table of {op.name!r} has shape {t.shape}, expected {shape}"
                )
            if t.size and not np.issubdtype(t.dtype, np.integer):
                raise ManySortedError(f"table of {op.name!r} is not integer valued")
            t = t.astype(np.int64)
            if t.size and (t.min() < 0 or t.max() >= carrier.sizes[op.coarity]):
                raise ManySortedError(f"table of {op.name!r} has values outside its coarity sort")
            t.setflags(write=False)
            checked[op.name] = t
        extra = set(tables) - set(checked)
        if extra:
            raise ManySortedError(f"tables for undeclared operations: {sorted(extra)}")
        self.tables = checked
        self._rules = None

    def __repr__(self):
        return f"Algebra(sizes={self.carrier.sizes}, ops={[o.name for o in self.signature.ops]})"

    def __eq__(self, other):
        if not isinstance(other, Algebra):
            return NotImplemented
        return (
            self.carrier == other.carrier
            and self.signature == other.signature
            and all(np.array_equal(self.tables[k], other.tables[k]) for k in self.tables)
        )

    __hash__ = None

    def rules(self) -> tuple[np.ndarray, np.ndarray]:
        """Every operation entry as ``(argument mask, output bit)``.

        A tuple ``a`` lies in ``X_w`` exactly when its argument mask is inside
        ``X``, so one application of all operations to ``X`` is the union of
        the outputs of rules whose argument mask ``X`` contains.  Rules whose
        output already lies in the argument mask are dropped.
        """
        if self._rules is None:
            c = self.carrier
            pairs = []
            for op in self.signature.ops:
                t = self.tables[op.name]
                if t.size == 0:
                    continue
                k = len(op.arity)
                arg = np.zeros(t.shape, dtype=np.int64)
                for i, s in enumerate(op.arity):
                    bits = np.int64(1) << (c.offsets[s] + np.arange(c.sizes[s], dtype=np.int64))
                    arg = arg | bits.reshape([-1 if j == i else 1 for j in range(k)])
                out = np.int64(1) << (c.offsets[op.coarity] + t)
                pairs.append(np.stack([arg.ravel(), out.ravel()], axis=1))
            if pairs:
                allp = np.concatenate(pairs)
                allp = allp[(allp[:, 1] & ~allp[:, 0]) != 0]
                allp = np.unique(allp, axis=0)
            else:
                allp = np.zeros((0, 2), dtype=np.int64)
            self._rules = (np.ascontiguousarray(allp[:, 0]), np.ascontiguousarray(allp[:, 1]))
        return self._rules


def apply_op(A: Algebra, name: str, a: Sequence[int]) -> int:
    op = A.signature.op(name)
    a = tuple(int(x) for x in a)
    if len(a) != len(op.arity):
        raise ManySortedError(f"{name!r} takes {len(op.arity)} arguments, got {len(a)}")
    for i, (x, s) in enumerate(zip(a, op.arity)):
        if not 0 <= x < A.carrier.sizes[s]:
            raise ManySortedError(f"argument {i} of {name!r} out of range: {x}")
    return int(A.tables[name][a])


def _check(A: Algebra, X: MSSubset) -> None:
    if X.carrier != A.carrier:
        raise CarrierMismatchError("subset is not over the algebra's carrier")


@dataclass(frozen=True)
class SubalgebraCheck:
    closed: bool
    witness: tuple[str, tuple[int, ...]] | None = None

    def __bool__(self):
        return self.closed


def _tuples_in(A: Algebra, op: OpDecl, X: MSSubset):
    coords = [sorted(X.coord(s)) for s in op.arity]
    return product(*coords)


def is_subalgebra(A: Algebra, X: MSSubset) -> SubalgebraCheck:
    """Is ``X`` closed under every operation?  On failure the witness is the
    first ``(operation, argument tuple)`` whose value escapes ``X``."""
    _check(A, X)
    for op in A.signature.ops:
        t = A.tables[op.name]
        for a in _tuples_in(A, op, X):
            if (op.coarity, int(t[a])) not in X:
                return SubalgebraCheck(False, (op.name, a))
    return SubalgebraCheck(True)


def e_step(A: Algebra, X: MSSubset) -> MSSubset:
    """``X`` together with the value of every operation on every tuple from ``X``."""
    _check(A, X)
    c = A.carrier
    mask = X.mask
    for op in A.signature.ops:
        t = A.tables[op.name]
        for a in _tuples_in(A, op, X):
            mask |= c.bit(op.coarity, int(t[a]))
    return MSSubset(c, mask)


def e_stages(A: Algebra, X: MSSubset) -> list[MSSubset]:
    """``X, E(X), E(E(X)), ...`` up to the first repeat."""
    stages = [X]
    while True:
        nxt = e_step(A, stages[-1])
        if nxt == stages[-1]:
            return stages
        stages.append(nxt)


def sg_via_e(A: Algebra, X: MSSubset) -> MSSubset:
    return e_stages(A, X)[-1]


def subalgebra_flags(A: Algebra) -> np.ndarray:
    """Boolean array over subset masks: is the subset closed under all operations.

    Computed straight from the operation tables, one tuple at a time.
    """
    c = A.carrier
    c.check_cap()
    masks = np.arange(c.num_subsets, dtype=np.int64)
    closed = np.ones(masks.size, dtype=bool)
    for op in A.signature.ops:
        t = A.tables[op.name]
        for a in np.ndindex(*t.shape):
            inside = np.ones(masks.size, dtype=bool)
            for x, s in zip(a, op.arity):
                inside &= ((masks >> (c.offsets[s] + x)) & 1).astype(bool)
            hit = ((masks >> (c.offsets[op.coarity] + int(t[a]))) & 1).astype(bool)
            closed &= ~inside | hit
    return closed


def subalgebras(A: Algebra) -> np.ndarray:
    """Masks of all subalgebras, ascending."""
    return np.nonzero(subalgebra_flags(A))[0].astype(np.int64)


def sg_table_via_intersection(A: Algebra) -> np.ndarray:
    return kernels.meet_above(subalgebras(A), A.carrier.total)


def sg_table_via_e(A: Algebra) -> np.ndarray:
    A.carrier.check_cap()
    argm, outm = A.rules()
    return kernels.sg_table(argm, outm, A.carrier.total)


def sg_via_intersection(A: Algebra, X: MSSubset) -> MSSubset:
    """Meet of all subalgebras containing ``X``."""
    _check(A, X)
    acc = A.carrier.full_mask
    for C in subalgebras(A).tolist():
        if X.mask & ~C == 0:
            acc &= C
    return MSSubset(A.carrier, acc)


def max_arity(A: Algebra | Signature) -> int:
    sig = A.signature if isinstance(A, Algebra) else A
    return max((len(op.arity) for op in sig.ops), default=0)


class AlgebraClosure(ClosureOperator):
    """Subalgebra generation ``X -> Sg(X)`` as a closure operator."""

    def __init__(self, algebra: Algebra):
        super().__init__(algebra.carrier)
        self.algebra = algebra
        self._memo: dict[int, int] = {}

    def closure_mask(self, mask: int) -> int:
        if self._table is not None:
            return int(self._table[mask])
        hit = self._memo.get(mask)
        if hit is None:
            hit = sg_via_e(self.algebra, MSSubset(self.carrier, mask)).mask
            hit = self._memo.setdefault(mask, hit)
        return hit

    def _build_table(self) -> np.ndarray:
        return sg_table_via_e(self.algebra)


def as_closure_operator(A: Algebra) -> AlgebraClosure:
    return AlgebraClosure(A)


def make_algebra(sizes: Mapping[str, int], ops: Sequence[tuple], tables: Mapping[str, object]) -> Algebra:
    """Convenience constructor: ``ops`` holds ``(name, arity_names, coarity_name)``."""
    carrier = Carrier.of(sizes)
    sig = Signature(carrier.sorts, tuple(OpDecl(n, tuple(w), s) for n, w, s in ops))
    return Algebra(carrier, sig, tables)
