"""Seeded test instances: random algebras, random closure tables and fixed fixtures.

Randomness comes from numpy's PCG64 generator.  A seed is turned into a
``SeedSequence`` and one child sequence is spawned per independent draw
(carrier shape, operation count, then each operation or family member), so
the carrier drawn for a seed does not depend on the later draws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, OpDecl, Signature, make_algebra
from .closure import ClosureTable, closure_from_family
from .core import Carrier, ManySortedError, Sorts, tabulation_cap

SORT_NAMES = ("s", "t", "u", "v", "w", "x", "y", "z")


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    num_sorts: int = 2
    min_size: int = 1
    max_size: int = 3
    max_total: int | None = None
    min_ops: int = 1
    max_ops: int = 3
    max_arity: int = 2
    exact_max_arity: bool = False
    nullary_prob: float = 0.1
    projection_prob: float = 0.0
    min_family: int = 1
    max_family: int = 6
    member_density: float = 0.5

    def validate(self) -> None:
        cap = tabulation_cap()
        max_total = cap if self.max_total is None else self.max_total
        if not 0 <= self.seed < 2**64:
            raise ManySortedError("seed must be a 64-bit unsigned value")
        if not 1 <= self.num_sorts <= len(SORT_NAMES):
            raise ManySortedError(f"num_sorts must lie in 1..{len(SORT_NAMES)}")
        if not 1 <= self.min_size <= self.max_size:
            raise ManySortedError("need 1 <= min_size <= max_size")
        if max_total > cap:
            raise ManySortedError(f"max_total {max_total} exceeds the tabulation cap {cap}")
        if self.num_sorts * self.min_size > max_total:
            raise ManySortedError("smallest possible carrier already exceeds max_total")
        if not 0 <= self.min_ops <= self.max_ops:
            raise ManySortedError("need 0 <= min_ops <= max_ops")
        if self.max_arity < 0:
            raise ManySortedError("max_arity must be a natural number")
        if not 1 <= self.min_family <= self.max_family:
            raise ManySortedError("need 1 <= min_family <= max_family")
        for name in ("nullary_prob", "projection_prob", "member_density"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ManySortedError(f"{name} must lie in [0, 1]")

    @property
    def total_limit(self) -> int:
        return tabulation_cap() if self.max_total is None else self.max_total


def _spawn(root: np.random.SeedSequence, k: int) -> list[np.random.Generator]:
    # successive spawn calls on one root yield fresh, non-overlapping children
    return [np.random.Generator(np.random.PCG64(ss)) for ss in root.spawn(k)]


def _draw_carrier(rng: np.random.Generator, p: GenParams) -> Carrier:
    names = SORT_NAMES[: p.num_sorts]
    while True:
        sizes = rng.integers(p.min_size, p.max_size + 1, size=p.num_sorts)
        if sizes.sum() <= p.total_limit:
            return Carrier(Sorts(names), tuple(int(k) for k in sizes))


def random_algebra(p: GenParams) -> Algebra:
    """A random algebra; each table entry is uniform over the coarity sort.

    With ``projection_prob > 0`` an entry instead copies the first argument
    of the coarity sort (when the arity has one) with that probability, which
    makes generated subalgebras smaller and basis sizes more varied.
    """
    p.validate()
    root = np.random.SeedSequence(p.seed)
    shape_rng, count_rng = _spawn(root, 2)
    carrier = _draw_carrier(shape_rng, p)
    num_ops = int(count_rng.integers(p.min_ops, p.max_ops + 1))
    op_rngs = _spawn(root, num_ops)
    decls = []
    tables = {}
    S = len(carrier.sorts)
    for i in range(num_ops):
        rng = op_rngs[i]
        if p.exact_max_arity and i == 0:
            k = p.max_arity
        elif p.max_arity == 0 or rng.random() < p.nullary_prob:
            k = 0
        else:
            k = int(rng.integers(1, p.max_arity + 1))
        arity = tuple(int(s) for s in rng.integers(0, S, size=k))
        coarity = int(rng.integers(0, S))
        shape = tuple(carrier.sizes[s] for s in arity)
        name = f"f{i}"
        decls.append(OpDecl(name, arity, coarity))
        table = rng.integers(0, carrier.sizes[coarity], size=shape, dtype=np.int64)
        same = [j for j, s in enumerate(arity) if s == coarity]
        if same and p.projection_prob > 0:
            # some entries copy the first argument of the output sort
            keep = rng.random(shape) < p.projection_prob
            first = np.indices(shape)[same[0]]
            table = np.where(keep, first, table)
        tables[name] = table
    return Algebra(carrier, Signature(carrier.sorts, tuple(decls)), tables)


def intersection_closure(masks: list[int], full: int) -> list[int]:
    """Smallest family containing ``masks`` and ``full`` closed under pairwise
    intersection, sorted ascending."""
    family = set(masks) | {full}
    frontier = set(family)
    while frontier:
        new = set()
        for a in frontier:
            for b in family:
                m = a & b
                if m not in family:
                    new.add(m)
        family |= new
        frontier = new
    return sorted(family)


def random_closure_family(p: GenParams) -> tuple[Carrier, list[int]]:
    p.validate()
    root = np.random.SeedSequence(p.seed)
    shape_rng, count_rng = _spawn(root, 2)
    carrier = _draw_carrier(shape_rng, p)
    k = int(count_rng.integers(p.min_family, p.max_family + 1))
    members = []
    for rng in _spawn(root, k):
        bits = rng.random(carrier.total) < p.member_density
        members.append(int(sum(1 << i for i in range(carrier.total) if bits[i])))
    return carrier, intersection_closure(members, carrier.full_mask)


def random_closure_table(p: GenParams) -> ClosureTable:
    """Closure operator of a random intersection-closed family."""
    carrier, family = random_closure_family(p)
    return closure_from_family(carrier, family)


def nonuniform_example() -> ClosureTable:
    """Closure system ``{empty, (s:{0}), A}`` on sorts s, t with sizes (2, 1).

    ``(s:{0})`` is closed while ``(s:{1})`` closes to all of ``A``; both have
    support ``{s}``, but the closures have supports ``{s}`` and ``{s, t}``.
    """
    carrier = Carrier.of({"s": 2, "t": 1})
    return closure_from_family(carrier, [0, carrier.subset(s=[0]).mask])


# --------------------------------------------------------------------------
# named fixtures


def unary_f_algebra() -> Algebra:
    """Sorts s, t with sizes (2, 1) and one unary ``f: s -> t``."""
    return make_algebra({"s": 2, "t": 1}, [("f", ["s"], "t")], {"f": np.array([0, 0])})


def constant_algebra() -> Algebra:
    """Sorts s, t with sizes (2, 1) and a single constant ``c = 1`` of sort s."""
    return make_algebra({"s": 2, "t": 1}, [("c", [], "s")], {"c": np.array(1)})


def binary_not_unary_algebra() -> Algebra:
    """One sort of size 3 and ``g(0, 1) = 2``, ``g(x, y) = x`` otherwise.

    Its generation operator is 2-ary but not 1-ary: ``{0, 1}`` generates 2
    while every singleton is closed.
    """
    g = np.array([[x for _ in range(3)] for x in range(3)])
    g[0, 1] = 2
    return make_algebra({"s": 3}, [("g", ["s", "s"], "s")], {"g": g})


def golden_binary_algebra() -> Algebra:
    """The seed-1 random algebra used as the binary-operation reference instance."""
    return random_algebra(
        GenParams(seed=1, num_sorts=2, min_size=2, max_size=2, min_ops=3, max_ops=3, max_arity=2)
    )


def gap_algebra() -> Algebra:
    """One sort ``{0, 1, 2, 3}`` whose irredundant bases have sizes 1 and 3 only.

    Unary ``u_i`` sends 3 to ``i`` and fixes everything else; ternary ``t``
    returns 3 on any arrangement of ``0, 1, 2`` and its first argument
    otherwise.  So ``{3}`` and ``{0, 1, 2}`` are irredundant bases, every pair
    is either closed or redundant, and the operator is 3-ary but not 2-ary.
    """
    decls = []
    tables = {}
    for i in range(3):
        u = np.arange(4)
        u[3] = i
        decls.append((f"u{i}", ["s"], "s"))
        tables[f"u{i}"] = u
    t = np.broadcast_to(np.arange(4).reshape(4, 1, 1), (4, 4, 4)).copy()
    for a in range(3):
        for b in range(3):
            for c in range(3):
                if len({a, b, c}) == 3:
                    t[a, b, c] = 3
    decls.append(("t", ["s", "s", "s"], "s"))
    tables["t"] = t
    return make_algebra({"s": 4}, decls, tables)
