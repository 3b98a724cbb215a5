"""Whole-lattice kernels over Sub(A), indexed by subset bitmask.

Every kernel takes ``int64`` arrays of length ``2**N`` (one entry per subset
mask) and exists twice: a per-mask loop compiled with numba, and a
vectorized numpy version that sweeps all masks at once.  The numba path is
the default; set ``MANYSORTED_DISABLE_NUMBA=1`` to force numpy, or use
:func:`use_backend` to switch at runtime.

Kernels return ``-1`` where a witness was requested and none exists.
"""

from __future__ import annotations

import contextlib
import functools
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

DISABLE_ENV = "MANYSORTED_DISABLE_NUMBA"


def _env_backend() -> str:
    flag = os.environ.get(DISABLE_ENV, "").strip().lower()
    if not HAVE_NUMBA or flag in {"1", "true", "yes", "on"}:
        return "numpy"
    return "numba"


_backend = _env_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


@contextlib.contextmanager
def use_backend(name: str):
    prev = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def _njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


@functools.lru_cache(maxsize=32)
def popcounts(N: int) -> np.ndarray:
    m = np.arange(1 << N, dtype=np.int64)
    pc = np.zeros_like(m)
    for i in range(N):
        pc += (m >> i) & 1
    pc.setflags(write=False)
    return pc


@functools.lru_cache(maxsize=32)
def canonical_order(N: int) -> np.ndarray:
    """Masks sorted by (popcount, mask); cached and read-only."""
    order = np.argsort(popcounts(N), kind="stable").astype(np.int64)
    order.setflags(write=False)
    return order


def _layers(N: int):
    pc = popcounts(N)
    order = np.argsort(pc, kind="stable")
    bounds = np.searchsorted(pc[order], np.arange(N + 2))
    return [order[bounds[k]:bounds[k + 1]] for k in range(N + 1)]


# --------------------------------------------------------------------------
# union of closures over <=n-element submasks


@_njit
def _nb_le_n(T, N, n):
    size = 1 << N
    L = np.empty(size, dtype=np.int64)
    for X in range(size):
        c = 0
        y = X
        while y:
            y &= y - 1
            c += 1
        if c <= n:
            L[X] = T[X]
        else:
            acc = 0
            y = X
            while y:
                low = y & -y
                acc |= L[X ^ low]
                y ^= low
            L[X] = acc
    return L


def _np_le_n(T, N, n):
    L = T.copy()
    for k, idx in enumerate(_layers(N)):
        if k <= n or idx.size == 0:
            continue
        acc = np.zeros(idx.size, dtype=np.int64)
        for i in range(N):
            bit = np.int64(1 << i)
            has = (idx & bit) != 0
            acc[has] |= L[idx[has] ^ bit]
        L[idx] = acc
    return L


def le_n_table(T: np.ndarray, N: int, n: int) -> np.ndarray:
    """``L[X]`` is the union of ``T[Y]`` over ``Y <= X`` with at most ``n`` bits."""
    if _backend == "numba":
        return _nb_le_n(T, N, n)
    return _np_le_n(T, N, n)


# --------------------------------------------------------------------------
# omega iterate of a step table


@_njit
def _nb_omega(L, N):
    size = L.shape[0]
    out = np.empty(size, dtype=np.int64)
    for X in range(size):
        acc = X
        cur = X
        rounds = 0
        while True:
            nxt = L[cur]
            acc |= nxt
            if nxt == cur:
                break
            cur = nxt
            rounds += 1
            if rounds > N + 2:
                acc = -1
                break
        out[X] = acc
    return out


def _np_omega(L, N):
    cur = np.arange(L.shape[0], dtype=np.int64)
    acc = cur.copy()
    for _ in range(N + 3):
        nxt = L[cur]
        acc |= nxt
        if np.array_equal(nxt, cur):
            return acc
        cur = nxt
    acc[L[cur] != cur] = -1
    return acc


def omega_table(L: np.ndarray, N: int) -> np.ndarray:
    """Union of the stages ``X, L[X], L[L[X]], ...`` until a stage repeats.

    Entries are ``-1`` where the stage sequence fails to settle within
    ``N + 2`` rounds, which cannot happen when ``L`` comes from a closure table.
    """
    if _backend == "numba":
        return _nb_omega(L, N)
    return _np_omega(L, N)


# --------------------------------------------------------------------------
# fixed-point criterion for n-arity


@_njit
def _nb_fixed_point_witness(T, N, n):
    size = 1 << N
    for X in range(size):
        ok = True
        # every submask Z of X, the empty one included
        Z = X
        while True:
            c = 0
            y = Z
            while y:
                y &= y - 1
                c += 1
            if c <= n and (T[Z] & ~X) != 0:
                ok = False
                break
            if Z == 0:
                break
            Z = (Z - 1) & X
        if ok and T[X] != X:
            return X
    return -1


def _np_fixed_point_witness(T, N, n):
    masks = np.arange(1 << N, dtype=np.int64)
    pc = popcounts(N)
    hyp = np.ones(masks.size, dtype=bool)
    for Z in np.nonzero(pc <= n)[0]:
        inside = (masks & Z) == Z
        hyp &= ~(inside & ((T[Z] & ~masks) != 0))
    bad = np.nonzero(hyp & (T != masks))[0]
    return int(bad[0]) if bad.size else -1


def fixed_point_witness(T: np.ndarray, N: int, n: int) -> int:
    """First mask ``X`` that contains ``T[Z]`` for all its ``<=n``-subsets yet
    is not fixed by ``T``; ``-1`` if there is none."""
    if _backend == "numba":
        return int(_nb_fixed_point_witness(T, N, n))
    return _np_fixed_point_witness(T, N, n)


# --------------------------------------------------------------------------
# closure axioms


@_njit
def _nb_axioms(T, N, order):
    ext = -1
    idem = -1
    iso_x = -1
    iso_y = -1
    for k in range(order.shape[0]):
        X = order[k]
        t = T[X]
        if ext < 0 and (X & ~t) != 0:
            ext = X
        if idem < 0 and T[t] != t:
            idem = X
        if iso_x < 0:
            for i in range(N):
                b = 1 << i
                if (X & b) == 0 and (t & ~T[X | b]) != 0:
                    iso_x = X
                    iso_y = X | b
                    break
    return ext, iso_x, iso_y, idem


def _np_axioms(T, N, order):
    masks = np.arange(1 << N, dtype=np.int64)

    def first(flags):
        hit = np.nonzero(flags[order])[0]
        return int(order[hit[0]]) if hit.size else -1

    ext = first((masks & ~T) != 0)
    idem = first(T[T] != T)
    iso_x = iso_y = -1
    bad = np.zeros(masks.size, dtype=bool)
    partner = np.full(masks.size, -1, dtype=np.int64)
    for i in reversed(range(N)):
        b = np.int64(1 << i)
        viol = ((masks & b) == 0) & ((T & ~T[masks | b]) != 0)
        partner[viol] = masks[viol] | b
        bad |= viol
    iso_x = first(bad)
    if iso_x >= 0:
        iso_y = int(partner[iso_x])
    return ext, iso_x, iso_y, idem


def axiom_witnesses(T: np.ndarray, N: int) -> tuple[int, int, int, int]:
    """``(extensive, isotone_X, isotone_Y, idempotent)`` first-failure masks.

    Isotony is tested on covering pairs ``X < X | bit``, which suffices since
    every inclusion is a chain of covers.  "First" is canonical order; an
    isotony witness pairs ``X`` with its lowest violating cover bit.
    """
    order = canonical_order(N)
    if _backend == "numba":
        return tuple(int(v) for v in _nb_axioms(T, N, order))
    return _np_axioms(T, N, order)


# --------------------------------------------------------------------------
# uniformity


@_njit
def _nb_uniform_witness(T, supp, order, num_sorts):
    ref_mask = np.full(1 << num_sorts, -1, dtype=np.int64)
    for k in range(order.shape[0]):
        X = order[k]
        key = supp[X]
        if ref_mask[key] < 0:
            ref_mask[key] = X
        elif supp[T[X]] != supp[T[ref_mask[key]]]:
            return ref_mask[key], X
    return -1, -1


def _np_uniform_witness(T, supp, order, num_sorts):
    keys = supp[order]
    csupp = supp[T[order]]
    # first occurrence of every support class in canonical order
    _, first_pos = np.unique(keys, return_index=True)
    ref_of_key = np.full(1 << num_sorts, -1, dtype=np.int64)
    ref_of_key[keys[first_pos]] = first_pos
    ref_pos = ref_of_key[keys]
    bad = np.nonzero(csupp != csupp[ref_pos])[0]
    if not bad.size:
        return -1, -1
    k = bad[0]
    return int(order[ref_pos[k]]), int(order[k])


def uniform_witness(T, supp, order, num_sorts) -> tuple[int, int]:
    if _backend == "numba":
        x, y = _nb_uniform_witness(T, supp, order, num_sorts)
        return int(x), int(y)
    return _np_uniform_witness(T, supp, order, num_sorts)


# --------------------------------------------------------------------------
# subalgebra generation


@_njit
def _nb_sg(argm, outm, N):
    size = 1 << N
    out = np.empty(size, dtype=np.int64)
    R = argm.shape[0]
    for X in range(size):
        cur = X
        while True:
            nxt = cur
            for r in range(R):
                if (argm[r] & ~cur) == 0:
                    nxt |= outm[r]
            if nxt == cur:
                break
            cur = nxt
        out[X] = cur
    return out


def _np_sg(argm, outm, N):
    cur = np.arange(1 << N, dtype=np.int64)
    while True:
        nxt = cur.copy()
        for a, o in zip(argm.tolist(), outm.tolist()):
            nxt[(cur & a) == a] |= o
        if np.array_equal(nxt, cur):
            return cur
        cur = nxt


def sg_table(argm: np.ndarray, outm: np.ndarray, N: int) -> np.ndarray:
    """Least superset of every mask closed under the rules ``argm[r] -> outm[r]``."""
    if _backend == "numba":
        return _nb_sg(argm, outm, N)
    return _np_sg(argm, outm, N)


@_njit
def _nb_meet_above(closed, N):
    size = 1 << N
    full = size - 1
    out = np.empty(size, dtype=np.int64)
    for X in range(size):
        acc = full
        for k in range(closed.shape[0]):
            C = closed[k]
            if (X & ~C) == 0:
                acc &= C
        out[X] = acc
    return out


def _np_meet_above(closed, N):
    masks = np.arange(1 << N, dtype=np.int64)
    acc = np.full(masks.size, (1 << N) - 1, dtype=np.int64)
    for C in closed.tolist():
        inside = (masks & ~C) == 0
        acc[inside] &= C
    return acc


def meet_above(closed: np.ndarray, N: int) -> np.ndarray:
    """For every mask, the intersection of the listed masks that contain it."""
    if _backend == "numba":
        return _nb_meet_above(closed, N)
    return _np_meet_above(closed, N)


# --------------------------------------------------------------------------
# irredundance and bases


@_njit
def _nb_irredundant(T, N):
    size = 1 << N
    out = np.zeros(size, dtype=np.bool_)
    for X in range(size):
        ok = True
        y = X
        while y:
            low = y & -y
            if T[X ^ low] & low:
                ok = False
                break
            y ^= low
        out[X] = ok
    return out


def _np_irredundant(T, N):
    masks = np.arange(1 << N, dtype=np.int64)
    ok = np.ones(masks.size, dtype=bool)
    for i in range(N):
        b = np.int64(1 << i)
        has = (masks & b) != 0
        ok &= ~(has & ((T[masks ^ b] & b) != 0))
    return ok


def irredundant_flags(T: np.ndarray, N: int) -> np.ndarray:
    if _backend == "numba":
        return _nb_irredundant(T, N)
    return _np_irredundant(T, N)


@_njit
def _nb_minimal_basis(T, N):
    size = 1 << N
    full = size - 1
    below = np.zeros(size, dtype=np.bool_)
    out = np.zeros(size, dtype=np.bool_)
    for X in range(size):
        hit = False
        y = X
        while y:
            low = y & -y
            Y = X ^ low
            if below[Y] or T[Y] == full:
                hit = True
                break
            y ^= low
        below[X] = hit
        out[X] = (T[X] == full) and not hit
    return out


def _np_minimal_basis(T, N):
    full = (1 << N) - 1
    basis = T == full
    below = np.zeros(T.size, dtype=bool)
    for idx in _layers(N)[1:]:
        for i in range(N):
            b = np.int64(1 << i)
            sel = idx[(idx & b) != 0]
            sub = sel ^ b
            below[sel] |= below[sub] | basis[sub]
    return basis & ~below


def minimal_basis_flags(T: np.ndarray, N: int) -> np.ndarray:
    """Masks that generate everything while no proper submask does.

    ``below[X]`` records whether some proper submask of ``X`` generates; it
    is propagated through all maximal proper submasks, so no isotony of ``T``
    is assumed.
    """
    if _backend == "numba":
        return _nb_minimal_basis(T, N)
    return _np_minimal_basis(T, N)
