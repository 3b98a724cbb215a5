"""Regenerate the frozen instance files in tests/golden/.

Run from the repository root: ``python3 tests/make_golden.py``.  Each Sg
table is written only after the two independent Sg computations agree.
"""

from pathlib import Path

import numpy as np

from manysorted.algebra import as_closure_operator, sg_table_via_e, sg_table_via_intersection
from manysorted.corpus import (
    binary_not_unary_algebra,
    gap_algebra,
    golden_binary_algebra,
    nonuniform_example,
    unary_f_algebra,
)
from manysorted.formats import save_instance

HERE = Path(__file__).parent / "golden"

ALGEBRAS = {
    "unary_f": unary_f_algebra,
    "binary_not_unary": binary_not_unary_algebra,
    "golden_binary": golden_binary_algebra,
    "gap": gap_algebra,
}


def main():
    HERE.mkdir(exist_ok=True)
    for name, make in ALGEBRAS.items():
        A = make()
        assert np.array_equal(sg_table_via_e(A), sg_table_via_intersection(A)), name
        save_instance(A, HERE / f"{name}.json")
        save_instance(as_closure_operator(A).to_table(), HERE / f"{name}_sg.json")
    save_instance(nonuniform_example(), HERE / "nonuniform.json")


if __name__ == "__main__":
    main()
