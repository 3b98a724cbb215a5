"""Irredundant sets, bases and the sizes of irredundant bases."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .closure import ClosureOperator, require_n_ary
from .core import ManySortedError, MSSubset, format_spec, popcount, submasks_le

DEFAULT_MAX_WITNESSES = 16


def is_basis(J: ClosureOperator, X: MSSubset) -> bool:
    return J.closure_mask(X.mask) == J.carrier.full_mask


@dataclass(frozen=True)
class IrredundanceCheck:
    irredundant: bool
    witness: tuple[int, int] | None = None

    def __bool__(self):
        return self.irredundant


def is_irredundant(J: ClosureOperator, X: MSSubset) -> IrredundanceCheck:
    """No ``x`` in ``X_s`` lies in the closure of ``X`` with ``x`` removed.

    The witness is the first offending ``(sort, element)``.
    """
    c = X.carrier
    for s, x in X.elements():
        bit = c.bit(s, x)
        if J.closure_mask(X.mask & ~bit) & bit:
            return IrredundanceCheck(False, (s, x))
    return IrredundanceCheck(True)


def is_minimal_basis(J: ClosureOperator, X: MSSubset) -> bool:
    """``X`` generates and none of its proper subsets does."""
    J.carrier.check_cap()
    if not is_basis(J, X):
        return False
    full = J.carrier.full_mask
    for Y in submasks_le(X.mask, popcount(X.mask) - 1):
        if J.closure_mask(Y) == full:
            return False
    return True


def smallest_generating_subset(J: ClosureOperator, X: MSSubset) -> MSSubset | None:
    """A generating subset of ``X`` of least cardinality, or ``None`` if ``X``
    does not generate.  Candidates are tried in canonical order."""
    full = J.carrier.full_mask
    if J.closure_mask(X.mask) != full:
        return None
    for Y in submasks_le(X.mask, popcount(X.mask)):
        if J.closure_mask(Y) == full:
            return MSSubset(X.carrier, Y)
    raise AssertionError("unreachable: X itself generates")


def prune_to_minimal(J: ClosureOperator, X: MSSubset) -> MSSubset:
    """Drop elements of a generating ``X`` one at a time while it still generates."""
    c = J.carrier
    full = c.full_mask
    if J.closure_mask(X.mask) != full:
        raise ManySortedError(f"{X} does not generate the carrier")
    mask = X.mask
    for s, x in X.elements():
        trial = mask & ~c.bit(s, x)
        if J.closure_mask(trial) == full:
            mask = trial
    return MSSubset(c, mask)


def irredundant_basis_flags(J: ClosureOperator) -> np.ndarray:
    T = J.table()
    N = J.carrier.total
    return kernels.irredundant_flags(T, N) & (T == J.carrier.full_mask)


def minimal_basis_flags(J: ClosureOperator) -> np.ndarray:
    return kernels.minimal_basis_flags(J.table(), J.carrier.total)


@dataclass
class IrBReport:
    irb: list[int]
    counts: dict[int, int]
    bases_by_size: dict[int, list[MSSubset]]
    gaps: list[tuple[int, int]]
    n_used: int | None = None
    verdict: bool | None = None
    violation: tuple[int, int] | None = None
    convex: bool = field(init=False)

    def __post_init__(self):
        self.convex = all(j - i == 1 for i, j in zip(self.irb, self.irb[1:]))

    def to_dict(self) -> dict:
        return {
            "irb": list(self.irb),
            "convex": self.convex,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "bases_by_size": {
                str(k): [format_spec(X) for X in v] for k, v in sorted(self.bases_by_size.items())
            },
            "gaps": [list(g) for g in self.gaps],
            "n": self.n_used,
            "verdict": None if self.verdict is None else ("pass" if self.verdict else "fail"),
            "violation": None if self.violation is None else list(self.violation),
        }


def irredundant_bases(J: ClosureOperator, max_witnesses: int = DEFAULT_MAX_WITNESSES) -> IrBReport:
    """Scan Sub(A) for irredundant bases; counts per size are exact, stored
    examples per size are capped at ``max_witnesses``."""
    c = J.carrier
    flags = irredundant_basis_flags(J)
    order = kernels.canonical_order(c.total)
    hits = order[flags[order]]
    sizes = kernels.popcounts(c.total)[hits]
    counts: dict[int, int] = {}
    examples: dict[int, list[MSSubset]] = {}
    for m, k in zip(hits.tolist(), sizes.tolist()):
        counts[k] = counts.get(k, 0) + 1
        bucket = examples.setdefault(k, [])
        if len(bucket) < max_witnesses:
            bucket.append(MSSubset(c, m))
    irb = sorted(counts)
    gaps = [(i, j) for i, j in zip(irb, irb[1:]) if j - i >= 2]
    return IrBReport(irb=irb, counts=counts, bases_by_size=examples, gaps=gaps)


def check_tarski_gaps(J: ClosureOperator, n: int, max_witnesses: int = DEFAULT_MAX_WITNESSES) -> IrBReport:
    """Check that consecutive irredundant-basis sizes differ by at most ``n - 1``.

    ``J`` is first verified to be ``n``-ary; :class:`NotNaryError` otherwise.
    For ``n == 2`` a passing verdict also means the sizes form an interval.
    """
    if n < 2:
        raise ManySortedError(f"the gap bound needs n >= 2, got {n}")
    require_n_ary(J, n)
    report = irredundant_bases(J, max_witnesses)
    report.n_used = n
    bad = [(i, j) for i, j in zip(report.irb, report.irb[1:]) if j - i > n - 1]
    report.verdict = not bad
    report.violation = bad[0] if bad else None
    if n == 2 and report.verdict and not report.convex:
        raise AssertionError("gap check passed for n=2 but the sizes are not an interval")
    return report
