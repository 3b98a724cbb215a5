"""The numba kernels and their numpy fallbacks must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from manysorted import kernels
from manysorted.closure import support_masks
from strategies import algebras, closure_tables

pytestmark = pytest.mark.skipif(not kernels.HAVE_NUMBA, reason="numba not installed")


def both(fn, *args):
    with kernels.use_backend("numba"):
        a = fn(*args)
    with kernels.use_backend("numpy"):
        b = fn(*args)
    return a, b


def _same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def _scramble(T, seed):
    # arbitrary self-maps exercise the witness paths too
    rng = np.random.default_rng(seed)
    out = T.copy()
    idx = rng.integers(0, T.size, size=max(1, T.size // 8))
    out[idx] = rng.integers(0, T.size, size=idx.size)
    return out


@given(closure_tables(max_total=7), st.integers(0, 4), st.integers(0, 2**32))
def test_table_kernels_agree(J, n, seed):
    N = J.carrier.total
    for T in (J.table(), _scramble(np.asarray(J.table()), seed)):
        for fn, args in [
            (kernels.le_n_table, (T, N, n)),
            (kernels.fixed_point_witness, (T, N, n)),
            (kernels.axiom_witnesses, (T, N)),
            (kernels.irredundant_flags, (T, N)),
            (kernels.minimal_basis_flags, (T, N)),
        ]:
            assert _same(*both(fn, *args)), fn.__name__
        L = kernels.le_n_table(T, N, n)
        assert _same(*both(kernels.omega_table, L, N))


@given(closure_tables(max_total=7), st.integers(0, 2**32))
def test_uniform_kernel_agrees(J, seed):
    c = J.carrier
    order = kernels.canonical_order(c.total)
    for T in (J.table(), _scramble(np.asarray(J.table()), seed)):
        a, b = both(kernels.uniform_witness, T, support_masks(c), order, len(c.sorts))
        assert a == b


@given(algebras(max_total=8))
def test_sg_kernel_agrees(A):
    argm, outm = A.rules()
    assert _same(*both(kernels.sg_table, argm, outm, A.carrier.total))


@given(st.lists(st.integers(0, 255), max_size=10))
def test_meet_above_agrees(family):
    closed = np.unique(np.array(family + [255], dtype=np.int64))
    assert _same(*both(kernels.meet_above, closed, 8))


def test_canonical_order():
    order = kernels.canonical_order(4).tolist()
    assert order[0] == 0 and order[-1] == 15
    keys = [(bin(m).count("1"), m) for m in order]
    assert keys == sorted(keys)


def test_env_flag_forces_numpy():
    env = dict(os.environ, MANYSORTED_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from manysorted import kernels; print(kernels.get_backend())"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")
