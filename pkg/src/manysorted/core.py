"""Finite S-sorted sets encoded as bitmasks.

A :class:`Carrier` fixes one integer bit per element of the disjoint union of
its sorts.  Sort 0 occupies the most significant block, so ordering masks as
integers is the same as ordering the tuple of per-sort masks lexicographically
in sort-index order.  Inside a block, element ``x`` is bit ``x``.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

DEFAULT_CAP = 16
HARD_CAP = 24
CAP_ENV = "MANYSORTED_CAP"


class ManySortedError(ValueError):
    """Base class for every error raised by this package."""


class CarrierMismatchError(ManySortedError):
    pass


class CapExceededError(ManySortedError):
    pass


def tabulation_cap() -> int:
    """Largest total carrier size for which Sub(A) may be tabulated."""
    raw = os.environ.get(CAP_ENV)
    if not raw:
        return DEFAULT_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ManySortedError(f"{CAP_ENV} must be an integer, got {raw!r}") from None
    if not 0 <= cap <= HARD_CAP:
        raise ManySortedError(f"{CAP_ENV} must lie in 0..{HARD_CAP}, got {cap}")
    return cap


def popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class Sorts:
    names: tuple[str, ...]

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if not names:
            raise ManySortedError("a sort list must be nonempty")
        if len(set(names)) != len(names):
            raise ManySortedError(f"duplicate sort names in {names}")
        for n in names:
            if not isinstance(n, str) or not n:
                raise ManySortedError(f"sort names must be nonempty strings, got {n!r}")
        object.__setattr__(self, "names", names)

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ManySortedError(f"unknown sort {name!r}") from None

    def resolve(self, sort: int | str) -> int:
        """Accept either a sort index or a sort name."""
        if isinstance(sort, str):
            return self.index(sort)
        if not 0 <= sort < len(self.names):
            raise ManySortedError(f"sort index {sort} out of range")
        return int(sort)


@dataclass(frozen=True)
class Carrier:
    """A finite S-sorted set; the elements of sort ``s`` are ``0..sizes[s]-1``."""

    sorts: Sorts
    sizes: tuple[int, ...]
    offsets: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.sizes)
        if len(sizes) != len(self.sorts):
            raise ManySortedError(
                f"{len(self.sorts)} sorts but {len(sizes)} sizes given"
            )
        if any(k < 0 for k in sizes):
            raise ManySortedError(f"negative carrier size in {sizes}")
        offsets = []
        acc = 0
        for k in reversed(sizes):
            offsets.append(acc)
            acc += k
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "offsets", tuple(reversed(offsets)))

    @classmethod
    def of(cls, sizes: Mapping[str, int] | Sequence[int], names: Sequence[str] | None = None) -> "Carrier":
        if isinstance(sizes, Mapping):
            return cls(Sorts(sizes.keys()), tuple(sizes.values()))
        if names is None:
            names = [f"s{i}" for i in range(len(sizes))]
        return cls(Sorts(names), tuple(sizes))

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def full_mask(self) -> int:
        return (1 << self.total) - 1

    @property
    def num_subsets(self) -> int:
        return 1 << self.total

    def sort_mask(self, s: int) -> int:
        return ((1 << self.sizes[s]) - 1) << self.offsets[s]

    def bit(self, s: int, x: int) -> int:
        if not 0 <= x < self.sizes[s]:
            raise ManySortedError(
                f"element {x} out of range for sort {self.sorts.names[s]!r} "
                f"of size {self.sizes[s]}"
            )
        return 1 << (self.offsets[s] + x)

    def locate(self, bit_index: int) -> tuple[int, int]:
        """Inverse of :meth:`bit`: map a bit position to ``(sort, element)``."""
        for s, off in enumerate(self.offsets):
            if off <= bit_index < off + self.sizes[s]:
                return s, bit_index - off
        raise ManySortedError(f"bit {bit_index} outside carrier")

    def check_cap(self, cap: int | None = None) -> None:
        cap = tabulation_cap() if cap is None else cap
        if self.total > cap:
            raise CapExceededError(
                f"carrier has {self.total} elements; tabulation cap is {cap}"
            )

    def empty(self) -> "MSSubset":
        return MSSubset(self, 0)

    def full(self) -> "MSSubset":
        return MSSubset(self, self.full_mask)

    def subset(self, coords: Mapping[int | str, Iterable[int]] | None = None, **kw) -> "MSSubset":
        """Build a subset from ``{sort: elements}``; sort keys may be names or indices."""
        items = dict(coords or {})
        items.update(kw)
        mask = 0
        for key, elems in items.items():
            s = self.sorts.resolve(key)
            for x in elems:
                mask |= self.bit(s, int(x))
        return MSSubset(self, mask)

    def all_subsets(self) -> Iterator["MSSubset"]:
        """Every subset of the carrier in canonical order."""
        return iter(enumerate_subsets_le(self.full(), self.total))


@dataclass(frozen=True)
class MSSubset:
    carrier: Carrier
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask & ~self.carrier.full_mask:
            raise ManySortedError(f"mask {self.mask:#x} has bits outside the carrier")

    def coord_mask(self, s: int) -> int:
        c = self.carrier
        return (self.mask >> c.offsets[s]) & ((1 << c.sizes[s]) - 1)

    def coord(self, s: int | str) -> frozenset[int]:
        s = self.carrier.sorts.resolve(s)
        m = self.coord_mask(s)
        return frozenset(x for x in range(self.carrier.sizes[s]) if m >> x & 1)

    def coords(self) -> tuple[frozenset[int], ...]:
        return tuple(self.coord(s) for s in range(len(self.carrier.sorts)))

    def elements(self) -> list[tuple[int, int]]:
        """``(sort, element)`` pairs in sort order, then ascending element."""
        return [(s, x) for s in range(len(self.carrier.sorts)) for x in sorted(self.coord(s))]

    def __contains__(self, item: tuple[int, int]) -> bool:
        s, x = item
        if not 0 <= x < self.carrier.sizes[s]:
            return False
        return bool(self.mask & self.carrier.bit(s, x))

    def _same(self, other: "MSSubset") -> None:
        if self.carrier != other.carrier:
            raise CarrierMismatchError("subsets live on different carriers")

    def __or__(self, other: "MSSubset") -> "MSSubset":
        self._same(other)
        return MSSubset(self.carrier, self.mask | other.mask)

    def __and__(self, other: "MSSubset") -> "MSSubset":
        self._same(other)
        return MSSubset(self.carrier, self.mask & other.mask)

    def __sub__(self, other: "MSSubset") -> "MSSubset":
        self._same(other)
        return MSSubset(self.carrier, self.mask & ~other.mask)

    def __le__(self, other: "MSSubset") -> bool:
        self._same(other)
        return self.mask & ~other.mask == 0

    def __lt__(self, other: "MSSubset") -> bool:
        return self <= other and self.mask != other.mask

    def __len__(self) -> int:
        return popcount(self.mask)

    def sort_key(self) -> tuple[int, int]:
        return popcount(self.mask), self.mask

    def __repr__(self) -> str:
        parts = []
        for s, name in enumerate(self.carrier.sorts.names):
            xs = sorted(self.coord(s))
            parts.append(f"{name}:{{{','.join(map(str, xs))}}}")
        return "(" + ", ".join(parts) + ")"


class SubsetRelation(enum.Enum):
    NOT_SUBSET = "not_subset"
    SUBSET_PROPER = "subset_proper"
    SUBSET_EQUAL = "subset_equal"


def is_subset(X: MSSubset, Y: MSSubset) -> SubsetRelation:
    if X.carrier != Y.carrier:
        raise CarrierMismatchError("subsets live on different carriers")
    if X.mask & ~Y.mask:
        return SubsetRelation.NOT_SUBSET
    if X.mask == Y.mask:
        return SubsetRelation.SUBSET_EQUAL
    return SubsetRelation.SUBSET_PROPER


def delta(carrier: Carrier, t: int | str, x: int) -> MSSubset:
    """The subset with ``{x}`` at sort ``t`` and nothing elsewhere."""
    t = carrier.sorts.resolve(t)
    return MSSubset(carrier, carrier.bit(t, x))


def support(X: MSSubset) -> frozenset[int]:
    c = X.carrier
    return frozenset(s for s in range(len(c.sorts)) if X.mask & c.sort_mask(s))


def support_mask(carrier: Carrier, mask: int) -> int:
    """Support of ``mask`` as a bitmask over sort indices."""
    out = 0
    for s in range(len(carrier.sorts)):
        if mask & carrier.sort_mask(s):
            out |= 1 << s
    return out


def cardinal(X: MSSubset) -> int:
    return popcount(X.mask)


def submasks_le(mask: int, n: int) -> list[int]:
    """Submasks of ``mask`` with at most ``n`` bits, in canonical order."""
    bits = [1 << i for i in range(mask.bit_length()) if mask >> i & 1]
    out = []
    for k in range(min(n, len(bits)) + 1):
        out.extend(sorted(sum(c) for c in combinations(bits, k)))
    return out


def enumerate_subsets_le(X: MSSubset, n: int) -> list[MSSubset]:
    """All ``Y <= X`` with ``cardinal(Y) <= n``, ascending cardinal then mask."""
    if n < 0:
        raise ManySortedError("n must be a natural number")
    return [MSSubset(X.carrier, m) for m in submasks_le(X.mask, n)]


@dataclass(frozen=True)
class Word:
    """A finite sequence of sort indices; an element of the free monoid on S."""

    sorts: Sorts
    seq: tuple[int, ...] = ()

    def __post_init__(self):
        seq = tuple(self.sorts.resolve(s) for s in self.seq)
        object.__setattr__(self, "seq", seq)

    def __len__(self) -> int:
        return len(self.seq)

    def __iter__(self) -> Iterator[int]:
        return iter(self.seq)

    def __getitem__(self, i):
        return self.seq[i]

    def count(self, s: int | str) -> int:
        """Occurrences of sort ``s`` in the word."""
        return self.seq.count(self.sorts.resolve(s))

    def __add__(self, other: "Word") -> "Word":
        return concat(self, other)

    def names(self) -> list[str]:
        return [self.sorts.names[s] for s in self.seq]

    def __repr__(self) -> str:
        return "(" + ",".join(self.names()) + ")" if self.seq else "λ"


def concat(w: Word, v: Word) -> Word:
    if w.sorts != v.sorts:
        raise ManySortedError("words over different sort sets")
    return Word(w.sorts, w.seq + v.seq)


def empty_word(sorts: Sorts) -> Word:
    return Word(sorts, ())


def format_spec(X: MSSubset) -> str:
    """Render ``X`` as ``s:0,1;t:0``; empty coordinates are omitted."""
    parts = []
    for s, name in enumerate(X.carrier.sorts.names):
        xs = sorted(X.coord(s))
        if xs:
            parts.append(f"{name}:{','.join(map(str, xs))}")
    return ";".join(parts)


def parse_spec(carrier: Carrier, text: str) -> MSSubset:
    """Inverse of :func:`format_spec`.  A sort may appear with an empty list."""
    text = text.strip()
    coords: dict[int, list[int]] = {}
    if not text:
        return carrier.empty()
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            raise ManySortedError(f"empty coordinate in subset spec {text!r}")
        name, sep, ids = chunk.partition(":")
        if not sep:
            raise ManySortedError(f"expected 'sort:ids' in subset spec, got {chunk!r}")
        s = carrier.sorts.index(name.strip())
        if s in coords:
            raise ManySortedError(f"sort {name!r} listed twice in {text!r}")
        elems = []
        if ids.strip():
            for tok in ids.split(","):
                tok = tok.strip()
                if not tok.isdigit():
                    raise ManySortedError(f"bad element id {tok!r} in {text!r}")
                elems.append(int(tok))
        coords[s] = elems
    return carrier.subset(coords)
