"""Theorem-level checks over seeded corpora.

Each ``check_*`` function takes instances, runs one property exhaustively
on every one of them and returns a :class:`CheckResult`.  The ``selftest``
command runs them on a small corpus; the acceptance suite runs them at full
size.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    Algebra,
    as_closure_operator,
    max_arity,
    sg_table_via_e,
    sg_table_via_intersection,
)
from .bases import (
    check_tarski_gaps,
    irredundant_bases,
    irredundant_basis_flags,
    minimal_basis_flags,
)
from .closure import (
    ClosureOperator,
    NotNaryError,
    NotUniformError,
    check_closure_axioms,
    is_n_ary,
    is_n_ary_via_fixed_points,
    is_uniform,
    omega_table,
    satisfies_nullary_identity,
    satisfies_unary_identity,
    support_masks,
)
from .corpus import GenParams, random_algebra, random_closure_table
from .synthesis import synthesize, synthesize_bounded


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}: {self.detail}"


# --------------------------------------------------------------------------
# corpora


def algebra_params(i: int, base_seed: int = 0, max_total: int = 10, max_arity: int = 3) -> GenParams:
    """Parameters for the ``i``-th corpus algebra; shapes cycle with ``i``."""
    num_sorts = 1 + i % 3
    return GenParams(
        seed=base_seed + i,
        num_sorts=num_sorts,
        min_size=1,
        max_size=min(max_total // num_sorts + 1, max_total),
        max_total=max_total,
        min_ops=1,
        max_ops=4,
        max_arity=1 + (i // 3) % max_arity,
        nullary_prob=0.15,
    )


def algebra_corpus(count: int, base_seed: int = 0, max_total: int = 10, max_arity: int = 3) -> list[Algebra]:
    return [random_algebra(algebra_params(i, base_seed, max_total, max_arity)) for i in range(count)]


def table_corpus(count: int, base_seed: int = 10_000, max_total: int = 8) -> list[ClosureOperator]:
    out = []
    for i in range(count):
        num_sorts = 1 + i % 3
        p = GenParams(
            seed=base_seed + i,
            num_sorts=num_sorts,
            max_size=min(max_total // num_sorts + 1, max_total),
            max_total=max_total,
            min_family=1,
            max_family=3 + i % 6,
            member_density=(0.3, 0.5, 0.7)[i % 3],
        )
        out.append(random_closure_table(p))
    return out


def tarski_corpus(
    count: int, base_seed: int = 50_000, max_total: int = 10, projection_prob: float = 0.6
) -> list[tuple[Algebra, int]]:
    """Algebras whose first operation has arity exactly ``n`` for ``n`` in 2, 3, 4."""
    out = []
    for i in range(count):
        n = 2 + i % 3
        num_sorts = 1 + (i // 3) % 3
        p = GenParams(
            seed=base_seed + i,
            num_sorts=num_sorts,
            max_size=min(max_total // num_sorts + 1, max_total),
            max_total=max_total,
            min_ops=1,
            max_ops=3,
            max_arity=n,
            exact_max_arity=True,
            nullary_prob=0.1,
            projection_prob=projection_prob,
        )
        out.append((random_algebra(p), n))
    return out


def _fail_at(name: str, i: int, msg: str) -> CheckResult:
    return CheckResult(name, False, f"instance {i}: {msg}")


# --------------------------------------------------------------------------
# checks


def check_dual_sg(algebras: Sequence[Algebra]) -> CheckResult:
    name = "Sg by iteration equals Sg by intersection"
    subsets = 0
    for i, A in enumerate(algebras):
        a = sg_table_via_e(A)
        b = sg_table_via_intersection(A)
        if not np.array_equal(a, b):
            X = int(np.argmax(a != b))
            return _fail_at(name, i, f"differ at mask {X}")
        subsets += a.size
    return CheckResult(name, True, f"{len(algebras)} algebras, {subsets} subsets")


def check_axioms(operators: Sequence[ClosureOperator]) -> CheckResult:
    name = "closure axioms"
    for i, J in enumerate(operators):
        r = check_closure_axioms(J)
        if not r.ok:
            return _fail_at(name, i, str(r))
    return CheckResult(name, True, f"{len(operators)} operators")


def e_stage_tables(A: Algebra) -> list[np.ndarray]:
    """Tables of ``E^0, E^1, ...`` over all masks until every entry settles."""
    argm, outm = A.rules()
    cur = np.arange(A.carrier.num_subsets, dtype=np.int64)
    stages = [cur]
    while True:
        nxt = cur.copy()
        for a, o in zip(argm.tolist(), outm.tolist()):
            nxt[(cur & a) == a] |= o
        if np.array_equal(nxt, cur):
            return stages
        stages.append(nxt)
        cur = nxt


def _constant_on_classes(keys: np.ndarray, values: np.ndarray) -> bool:
    ref = np.full(int(keys.max()) + 1, -1, dtype=np.int64)
    ref[keys[::-1]] = values[::-1]
    return bool(np.array_equal(ref[keys], values))


def check_uniformity(algebras: Sequence[Algebra], staged: int = 50) -> CheckResult:
    name = "Sg is uniform; support identities per E-stage"
    for i, A in enumerate(algebras):
        J = as_closure_operator(A)
        r = is_uniform(J)
        if not r:
            return _fail_at(name, i, f"witness {r.witness}")
    for i, A in enumerate(algebras[:staged]):
        supp = support_masks(A.carrier)
        stages = e_stage_tables(A)
        union = np.zeros_like(supp)
        for k, st in enumerate(stages):
            if not _constant_on_classes(supp, supp[st]):
                return _fail_at(name, i, f"stage {k} support depends on more than the support of X")
            union |= supp[st]
        if not np.array_equal(supp[sg_table_via_e(A)], union):
            return _fail_at(name, i, "support of Sg differs from the union of stage supports")
    return CheckResult(name, True, f"{len(algebras)} uniform, {min(staged, len(algebras))} staged")


def check_nary_deciders(operators: Sequence[ClosureOperator], ns: Iterable[int] = (0, 1, 2, 3)) -> CheckResult:
    name = "n-arity by tower equals n-arity by fixed points"
    ns = tuple(ns)
    trues = 0
    for i, J in enumerate(operators):
        for n in ns:
            a = is_n_ary(J, n)
            b = is_n_ary_via_fixed_points(J, n)
            if a != b:
                return _fail_at(name, i, f"n={n}: tower says {a}, fixed points say {b}")
            trues += a
    return CheckResult(name, True, f"{len(operators)} operators x n in {ns}, {trues} n-ary cases")


def check_bounded_arity(algebras: Sequence[Algebra], ns: Iterable[int] = (0, 1, 2, 3, 4)) -> CheckResult:
    name = "arity <= n gives an n-ary Sg"
    checked = 0
    for i, A in enumerate(algebras):
        J = as_closure_operator(A)
        for n in ns:
            if max_arity(A) <= n:
                if not is_n_ary(J, max(n, 1)):
                    return _fail_at(name, i, f"not {max(n, 1)}-ary with max arity {max_arity(A)}")
                checked += 1
    return CheckResult(name, True, f"{checked} (algebra, n) pairs")


def check_synthesis(operators: Sequence[ClosureOperator]) -> CheckResult:
    name = "synthesized algebra reproduces J"
    ops = 0
    for i, J in enumerate(operators):
        try:
            S = synthesize(J)
        except NotUniformError as e:
            return _fail_at(name, i, str(e))
        if not np.array_equal(sg_table_via_e(S.algebra), J.table()):
            return _fail_at(name, i, "Sg differs from J")
        ops += S.num_ops
    return CheckResult(name, True, f"{len(operators)} operators, {ops} synthesized ops")


def least_arity(J: ClosureOperator, upto: int = 3) -> int | None:
    for n in range(upto + 1):
        if is_n_ary(J, n):
            return n
    return None


def check_bounded_synthesis(
    operators: Sequence[ClosureOperator],
    rejects: Sequence[tuple[ClosureOperator, int | None]] = (),
) -> CheckResult:
    """``operators`` must be uniform; each is synthesized at every ``n`` in
    1..3 it is ``n``-ary for.  ``rejects`` pairs an operator with the ``n``
    to use (``None`` means plain synthesis) and must raise with a witness."""
    name = "arity-bounded synthesis"
    built = 0
    for i, J in enumerate(operators):
        for n in (1, 2, 3):
            if not is_n_ary(J, n):
                continue
            S = synthesize_bounded(J, n)
            if max_arity(S.algebra) > n:
                return _fail_at(name, i, f"max arity {max_arity(S.algebra)} > {n}")
            if not np.array_equal(sg_table_via_e(S.algebra), J.table()):
                return _fail_at(name, i, f"Sg differs from J at n={n}")
            built += 1
    for k, (J, n) in enumerate(rejects):
        try:
            synthesize(J) if n is None else synthesize_bounded(J, n)
        except (NotUniformError, NotNaryError) as e:
            if e.witness is None:
                return CheckResult(name, False, f"reject {k}: no witness")
            continue
        return CheckResult(name, False, f"reject {k} was accepted")
    return CheckResult(name, True, f"{built} bounded syntheses, {len(rejects)} rejections with witness")


def check_minimal_vs_irredundant(operators: Sequence[ClosureOperator]) -> CheckResult:
    name = "minimal basis iff irredundant basis"
    subsets = 0
    for i, J in enumerate(operators):
        a = minimal_basis_flags(J)
        b = irredundant_basis_flags(J)
        if not np.array_equal(a, b):
            X = int(np.argmax(a != b))
            return _fail_at(name, i, f"differ at mask {X}")
        subsets += a.size
    return CheckResult(name, True, f"{len(operators)} operators, {subsets} subsets")


def check_tarski(instances: Sequence[tuple[Algebra, int]]) -> CheckResult:
    name = "gaps between irredundant-basis sizes are at most n-1"
    gapped = 0
    widest = 0
    for i, (A, n) in enumerate(instances):
        report = check_tarski_gaps(as_closure_operator(A), n)
        if not report.verdict:
            return _fail_at(name, i, f"n={n}, IrB={report.irb}, violation {report.violation}")
        if n == 2 and not report.convex:
            return _fail_at(name, i, f"n=2 but IrB={report.irb} is not an interval")
        gapped += bool(report.gaps)
        widest = max([widest] + [j - i for i, j in report.gaps])
    return CheckResult(
        name, True, f"{len(instances)} algebras, {gapped} with a nonzero gap (widest jump {widest})"
    )


def check_irb_nonempty(algebras: Sequence[Algebra]) -> CheckResult:
    name = "IrB of Sg is nonempty"
    for i, A in enumerate(algebras):
        if not irredundant_bases(as_closure_operator(A)).irb:
            return _fail_at(name, i, "no irredundant basis")
    return CheckResult(name, True, f"{len(algebras)} algebras")


def check_low_arity_identities(operators: Sequence[ClosureOperator]) -> CheckResult:
    name = "0-ary and 1-ary identities agree with the tower"
    counts = [0, 0]
    for i, J in enumerate(operators):
        T = J.table()
        masks = np.arange(T.size, dtype=np.int64)
        if not np.array_equal(omega_table(J, 0), masks | T[0]):
            return _fail_at(name, i, "0-tower differs from X | J(empty)")
        if satisfies_nullary_identity(J) != is_n_ary(J, 0):
            return _fail_at(name, i, "0-ary identity disagrees with is_n_ary(0)")
        if satisfies_unary_identity(J) != is_n_ary(J, 1):
            return _fail_at(name, i, "1-ary identity disagrees with is_n_ary(1)")
        counts[0] += is_n_ary(J, 0)
        counts[1] += is_n_ary(J, 1)
    return CheckResult(name, True, f"{len(operators)} operators, {counts[0]} 0-ary, {counts[1]} 1-ary")


# --------------------------------------------------------------------------
# selftest


def selftest(size: int = 40) -> list[CheckResult]:
    """The invariant suite at desk scale; output is deterministic."""
    from .corpus import binary_not_unary_algebra, gap_algebra, nonuniform_example

    algebras = algebra_corpus(size)
    tables = table_corpus(size)
    alg_ops = [as_closure_operator(A) for A in algebras]
    small = [J for J in alg_ops + tables if J.carrier.total <= 8]
    synth_algebras = algebra_corpus(size // 2, base_seed=20_000, max_total=5)
    synth_ops = [as_closure_operator(A) for A in synth_algebras]
    synth_ops += [J for J in table_corpus(size, base_seed=30_000, max_total=5) if is_uniform(J)]
    rejects = [
        (nonuniform_example(), None),
        (as_closure_operator(binary_not_unary_algebra()), 1),
    ]
    results = [
        check_dual_sg(algebras),
        check_axioms(alg_ops + tables),
        check_uniformity(algebras, staged=size // 2),
        check_nary_deciders(alg_ops + tables),
        check_bounded_arity(algebras),
        check_synthesis(synth_ops),
        check_bounded_synthesis(synth_ops, rejects),
        check_minimal_vs_irredundant(small),
        check_tarski(tarski_corpus(size * 2) + [(gap_algebra(), 3)]),
        check_irb_nonempty(algebras),
        check_low_arity_identities(alg_ops + tables),
    ]
    return results
