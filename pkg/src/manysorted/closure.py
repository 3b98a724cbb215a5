"""Many-sorted closure operators and the arity tower built from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import kernels
from .core import (
    Carrier,
    CarrierMismatchError,
    ManySortedError,
    MSSubset,
    enumerate_subsets_le,
    submasks_le,
)


class NotClosureError(ManySortedError):
    pass


class NotNaryError(ManySortedError):
    def __init__(self, n: int, witness: MSSubset):
        super().__init__(f"not {n}-ary: tower and closure differ at {witness}")
        self.n = n
        self.witness = witness


class NotUniformError(ManySortedError):
    def __init__(self, witness: tuple[MSSubset, MSSubset]):
        x, y = witness
        super().__init__(f"not uniform: {x} and {y} share a support but their closures do not")
        self.witness = witness


class ClosureOperator:
    """A map Sub(A) -> Sub(A) evaluated through :meth:`closure`.

    Subclasses implement :meth:`closure_mask`; :meth:`table` materializes the
    whole map as an ``int64`` array indexed by subset mask and is cached.
    """

    carrier: Carrier

    def __init__(self, carrier: Carrier):
        self.carrier = carrier
        self._table: np.ndarray | None = None

    def closure_mask(self, mask: int) -> int:
        raise NotImplementedError

    def closure(self, X: MSSubset) -> MSSubset:
        if X.carrier != self.carrier:
            raise CarrierMismatchError("subset is not over this operator's carrier")
        return MSSubset(self.carrier, self.closure_mask(X.mask))

    __call__ = closure

    def _build_table(self) -> np.ndarray:
        return np.fromiter(
            (self.closure_mask(m) for m in range(self.carrier.num_subsets)),
            dtype=np.int64,
            count=self.carrier.num_subsets,
        )

    def table(self, cap: int | None = None) -> np.ndarray:
        if self._table is None:
            self.carrier.check_cap(cap)
            t = self._build_table()
            t.setflags(write=False)
            self._table = t
        return self._table

    def to_table(self) -> "ClosureTable":
        return ClosureTable(self.carrier, self.table())


class ClosureTable(ClosureOperator):
    """A closure operator stored as a full table over Sub(A)."""

    def __init__(self, carrier: Carrier, table):
        super().__init__(carrier)
        t = np.array(table, dtype=np.int64)
        if t.shape != (carrier.num_subsets,):
            raise NotClosureError(
                f"table not total: expected {carrier.num_subsets} entries, got {t.shape}"
            )
        if np.any(t < 0) or np.any(t & ~np.int64(carrier.full_mask)):
            raise NotClosureError("table values fall outside the carrier")
        t.setflags(write=False)
        self._table = t

    @classmethod
    def from_function(cls, carrier: Carrier, fn: Callable[[MSSubset], MSSubset]) -> "ClosureTable":
        carrier.check_cap()
        return cls(carrier, [fn(MSSubset(carrier, m)).mask for m in range(carrier.num_subsets)])

    def closure_mask(self, mask: int) -> int:
        return int(self._table[mask])

    def __eq__(self, other):
        if not isinstance(other, ClosureTable):
            return NotImplemented
        return self.carrier == other.carrier and np.array_equal(self._table, other._table)

    __hash__ = None


def identity_closure(carrier: Carrier) -> ClosureTable:
    carrier.check_cap()
    return ClosureTable(carrier, np.arange(carrier.num_subsets))


def constant_closure(carrier: Carrier) -> ClosureTable:
    """The operator sending every subset to the whole carrier."""
    carrier.check_cap()
    return ClosureTable(carrier, np.full(carrier.num_subsets, carrier.full_mask))


def closure_from_family(carrier: Carrier, family: Iterable[int]) -> ClosureTable:
    """Closure operator of a family of masks: ``X`` goes to the meet of the
    members above it.  The full carrier is always added to the family."""
    carrier.check_cap()
    closed = np.unique(np.array(list(family) + [carrier.full_mask], dtype=np.int64))
    return ClosureTable(carrier, kernels.meet_above(closed, carrier.total))


def support_masks(carrier: Carrier) -> np.ndarray:
    """Support of every subset, as a bitmask over sort indices."""
    masks = np.arange(carrier.num_subsets, dtype=np.int64)
    out = np.zeros_like(masks)
    for s in range(len(carrier.sorts)):
        out |= ((masks & carrier.sort_mask(s)) != 0).astype(np.int64) << s
    return out


# --------------------------------------------------------------------------
# axioms and comparison


@dataclass(frozen=True)
class AxiomReport:
    extensive: bool
    isotone: bool
    idempotent: bool
    extensive_witness: MSSubset | None = None
    isotone_witness: tuple[MSSubset, MSSubset] | None = None
    idempotent_witness: MSSubset | None = None

    @property
    def ok(self) -> bool:
        return self.extensive and self.isotone and self.idempotent

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        parts = []
        if not self.extensive:
            parts.append(f"not extensive at {self.extensive_witness}")
        if not self.isotone:
            x, y = self.isotone_witness
            parts.append(f"not isotone at {x} <= {y}")
        if not self.idempotent:
            parts.append(f"not idempotent at {self.idempotent_witness}")
        return "; ".join(parts) or "closure operator"


def check_closure_axioms(J: ClosureOperator) -> AxiomReport:
    c = J.carrier
    ext, iso_x, iso_y, idem = kernels.axiom_witnesses(J.table(), c.total)

    def sub(m):
        return None if m < 0 else MSSubset(c, m)

    return AxiomReport(
        extensive=ext < 0,
        isotone=iso_x < 0,
        idempotent=idem < 0,
        extensive_witness=sub(ext),
        isotone_witness=None if iso_x < 0 else (sub(iso_x), sub(iso_y)),
        idempotent_witness=sub(idem),
    )


def require_closure(J: ClosureOperator) -> None:
    report = check_closure_axioms(J)
    if not report.ok:
        raise NotClosureError(f"not a closure operator: {report}")


def _same_carrier(J: ClosureOperator, K: ClosureOperator) -> None:
    if J.carrier != K.carrier:
        raise CarrierMismatchError("operators live on different carriers")


def leq(J: ClosureOperator, K: ClosureOperator) -> bool:
    """Pointwise order: ``J(X) <= K(X)`` for every subset ``X``."""
    _same_carrier(J, K)
    return not np.any(J.table() & ~K.table())


def same_operator(J: ClosureOperator, K: ClosureOperator) -> bool:
    _same_carrier(J, K)
    return bool(np.array_equal(J.table(), K.table()))


# --------------------------------------------------------------------------
# the <=n tower


def closure_le_n(J: ClosureOperator, n: int, X: MSSubset) -> MSSubset:
    """Union of ``J(Y)`` over the subsets ``Y`` of ``X`` with at most ``n`` elements."""
    acc = 0
    for m in submasks_le(X.mask, n):
        acc |= J.closure_mask(m)
    return MSSubset(X.carrier, acc)


def tower(J: ClosureOperator, n: int, X: MSSubset) -> list[MSSubset]:
    """Stages ``X, J<=n(X), J<=n(J<=n(X)), ...`` up to the first repeated stage."""
    stages = [X]
    for _ in range(J.carrier.total + 3):
        nxt = closure_le_n(J, n, stages[-1])
        if nxt == stages[-1]:
            return stages
        stages.append(nxt)
    raise NotClosureError(f"tower above {X} does not settle; operator is not a closure")


def closure_le_n_omega(J: ClosureOperator, n: int, X: MSSubset) -> MSSubset:
    acc = 0
    for st in tower(J, n, X):
        acc |= st.mask
    return MSSubset(X.carrier, acc)


def le_n_table(J: ClosureOperator, n: int) -> np.ndarray:
    return kernels.le_n_table(J.table(), J.carrier.total, n)


def omega_table(J: ClosureOperator, n: int) -> np.ndarray:
    out = kernels.omega_table(le_n_table(J, n), J.carrier.total)
    if np.any(out < 0):
        raise NotClosureError("tower does not settle; operator is not a closure")
    return out


class NaryMinorant(ClosureOperator):
    """``X -> J<=n^omega(X)`` for a base operator ``J``."""

    def __init__(self, base: ClosureOperator, n: int):
        super().__init__(base.carrier)
        self.base = base
        self.n = n
        self._memo: dict[int, int] = {}

    def closure_mask(self, mask: int) -> int:
        if self._table is not None:
            return int(self._table[mask])
        hit = self._memo.get(mask)
        if hit is None:
            hit = closure_le_n_omega(self.base, self.n, MSSubset(self.carrier, mask)).mask
            hit = self._memo.setdefault(mask, hit)
        return hit

    def _build_table(self) -> np.ndarray:
        return omega_table(self.base, self.n)


def nary_witness(J: ClosureOperator, n: int) -> MSSubset | None:
    """First subset (canonical order) where ``J<=n^omega`` and ``J`` differ."""
    T = J.table()
    diff = omega_table(J, n) != T
    if not diff.any():
        return None
    order = kernels.canonical_order(J.carrier.total)
    first = order[np.argmax(diff[order])]
    return MSSubset(J.carrier, int(first))


def require_n_ary(J: ClosureOperator, n: int) -> None:
    w = nary_witness(J, n)
    if w is not None:
        raise NotNaryError(n, w)


def is_n_ary(J: ClosureOperator, n: int) -> bool:
    if n < 0:
        raise ManySortedError("n must be a natural number")
    return nary_witness(J, n) is None


def fixed_point_witness(J: ClosureOperator, n: int) -> MSSubset | None:
    """A subset containing the closures of all its ``<=n``-subsets that is
    nonetheless not closed, or ``None``."""
    T = J.table()
    w = kernels.fixed_point_witness(T, J.carrier.total, n)
    return None if w < 0 else MSSubset(J.carrier, w)


def is_n_ary_via_fixed_points(J: ClosureOperator, n: int) -> bool:
    if n < 0:
        raise ManySortedError("n must be a natural number")
    return fixed_point_witness(J, n) is None


def satisfies_nullary_identity(J: ClosureOperator) -> bool:
    """``J(X) == X | J(empty)`` for every ``X``."""
    T = J.table()
    masks = np.arange(T.size, dtype=np.int64)
    return bool(np.array_equal(T, masks | T[0]))


def satisfies_unary_identity(J: ClosureOperator) -> bool:
    """``J(X)`` is ``J(empty)`` together with the closures of the singletons of ``X``."""
    T = J.table()
    N = J.carrier.total
    masks = np.arange(T.size, dtype=np.int64)
    acc = np.full(T.size, T[0], dtype=np.int64)
    for i in range(N):
        b = np.int64(1 << i)
        acc[(masks & b) != 0] |= T[b]
    return bool(np.array_equal(T, acc))


# --------------------------------------------------------------------------
# uniformity and algebraicity


@dataclass(frozen=True)
class UniformityReport:
    uniform: bool
    witness: tuple[MSSubset, MSSubset] | None = None

    def __bool__(self) -> bool:
        return self.uniform


def is_uniform(J: ClosureOperator) -> UniformityReport:
    """Subsets with equal support must have closures with equal support.

    Subsets are bucketed by support in canonical order; the first member of a
    bucket is its reference, and a failing pair is ``(reference, offender)``.
    """
    c = J.carrier
    T = J.table()
    x, y = kernels.uniform_witness(
        T, support_masks(c), kernels.canonical_order(c.total), len(c.sorts)
    )
    if x < 0:
        return UniformityReport(True)
    return UniformityReport(False, (MSSubset(c, x), MSSubset(c, y)))


def is_algebraic(J: ClosureOperator) -> bool:
    """Each closure is the union of the closures of the finite subsets.

    Every subset of a finite carrier is finite, so this always holds for a
    closure operator; it is computed rather than assumed.
    """
    T = J.table()
    return bool(np.array_equal(kernels.le_n_table(T, J.carrier.total, J.carrier.total), T))


def all_subsets(carrier: Carrier) -> list[MSSubset]:
    return enumerate_subsets_le(carrier.full(), carrier.total)
