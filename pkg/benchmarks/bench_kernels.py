"""Time every kernel under the numba and numpy backends and check they agree.

    python3 benchmarks/bench_kernels.py --sizes 10 12 14 --repeat 3
"""

import argparse
import time

import numpy as np

from manysorted import kernels
from manysorted.algebra import as_closure_operator
from manysorted.closure import support_masks
from manysorted.corpus import GenParams, random_algebra, random_closure_family


def best_of(fn, args, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        times.append(time.perf_counter() - t)
    return min(times), out


def cases(total, seed):
    """Kernel calls on an algebra's Sg table and on a random closure table."""
    p = GenParams(seed=seed, num_sorts=2, min_size=total // 2, max_size=total - total // 2, max_total=total, max_arity=2)
    A = random_algebra(p)
    T = as_closure_operator(A).table()
    c = A.carrier
    N = c.total
    argm, outm = A.rules()
    carrier, family = random_closure_family(
        GenParams(seed=seed, num_sorts=1, min_size=N, max_size=N, max_total=N, max_family=12)
    )
    closed = np.unique(np.array(family, dtype=np.int64))
    L2 = kernels.le_n_table(T, N, 2)
    order = kernels.canonical_order(N)
    return N, [
        ("le_n_table n=2", kernels.le_n_table, (T, N, 2)),
        ("omega_table", kernels.omega_table, (L2, N)),
        ("fixed_point_witness n=2", kernels.fixed_point_witness, (T, N, 2)),
        ("axiom_witnesses", kernels.axiom_witnesses, (T, N)),
        ("uniform_witness", kernels.uniform_witness, (T, support_masks(c), order, len(c.sorts))),
        ("sg_table", kernels.sg_table, (argm, outm, N)),
        ("meet_above", kernels.meet_above, (closed, carrier.total)),
        ("irredundant_flags", kernels.irredundant_flags, (T, N)),
        ("minimal_basis_flags", kernels.minimal_basis_flags, (T, N)),
    ]


def same(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[10, 12, 14, 16])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    # compile everything once on a tiny instance so timings exclude JIT
    with kernels.use_backend("numba"):
        for _, fn, a in cases(4, args.seed)[1]:
            fn(*a)

    print(f"{'kernel':<26}{'N':>4}{'numpy ms':>12}{'numba ms':>12}{'speedup':>9}  agree")
    print("-" * 70)
    for total in args.sizes:
        N, calls = cases(total, args.seed)
        for name, fn, a in calls:
            with kernels.use_backend("numpy"):
                t_np, r_np = best_of(fn, a, args.repeat)
            with kernels.use_backend("numba"):
                t_nb, r_nb = best_of(fn, a, args.repeat)
            ok = "yes" if same(r_np, r_nb) else "NO"
            print(f"{name:<26}{N:>4}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / max(t_nb, 1e-9):>8.1f}x  {ok}")
        print()


if __name__ == "__main__":
    main()
