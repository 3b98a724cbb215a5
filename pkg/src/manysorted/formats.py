"""JSON instance files for algebras and closure tables.

Algebra file::

    {"kind": "algebra", "sorts": ["s", "t"], "carrier": [2, 1],
     "ops": [{"name": "f", "arity": ["s"], "sort": "t",
              "table": {"0": 0, "1": 0}}]}

Table keys are comma-joined argument tuples (``""`` for a constant).  A
synthesized algebra may carry a ``"provenance"`` object mapping each op name
to ``{"subset", "sort", "element", "word"}``.

Closure-table file::

    {"kind": "closure_table", "sorts": ["s"], "carrier": [2],
     "table": [{"in": [[]], "out": [[]]}, {"in": [[0]], "out": [[0]]}, ...]}

Subsets are lists of element-id lists, one per sort in declaration order.
Canonical output orders sorts by declaration, ops by name, table rows by
argument tuple and closure rows by canonical subset order.
"""

from __future__ import annotations

import json
from itertools import product
from pathlib import Path
from typing import Any

import numpy as np

from . import kernels
from .algebra import Algebra, OpDecl, Signature
from .closure import ClosureTable, require_closure
from .core import Carrier, ManySortedError, MSSubset, Sorts, Word, format_spec, parse_spec
from .synthesis import OpOrigin, SynthesizedAlgebra


class InstanceError(ManySortedError):
    """A file that cannot be parsed or does not describe a valid instance."""


_ALGEBRA_KEYS = {"kind", "sorts", "carrier", "ops", "provenance"}
_OP_KEYS = {"name", "arity", "sort", "table"}
_TABLE_KEYS = {"kind", "sorts", "carrier", "table"}
_ORIGIN_KEYS = {"subset", "sort", "element", "word"}


def _fail(where: str, msg: str):
    raise InstanceError(f"{where}: {msg}")


def _keys(obj: Any, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        _fail(where, f"expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        _fail(where, f"unknown field(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        _fail(where, f"missing field(s) {sorted(missing)}")


def _int(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        _fail(where, f"expected an integer, got {v!r}")
    return v


def _carrier(doc: dict, where: str) -> Carrier:
    sorts = doc["sorts"]
    if not isinstance(sorts, list) or not all(isinstance(s, str) for s in sorts):
        _fail(f"{where}.sorts", "expected a list of sort names")
    sizes = doc["carrier"]
    if not isinstance(sizes, list):
        _fail(f"{where}.carrier", "expected a list of sizes")
    sizes = [_int(k, f"{where}.carrier[{i}]") for i, k in enumerate(sizes)]
    try:
        return Carrier(Sorts(sorts), tuple(sizes))
    except ManySortedError as e:
        _fail(where, str(e))


def parse_tuple_key(key: str, where: str) -> tuple[int, ...]:
    if key == "":
        return ()
    parts = key.split(",")
    out = []
    for p in parts:
        if not p.isdigit():
            _fail(where, f"malformed tuple key {key!r}")
        out.append(int(p))
    return tuple(out)


def _subset_lists(X: MSSubset) -> list[list[int]]:
    return [sorted(c) for c in X.coords()]


def _subset_from_lists(carrier: Carrier, v: Any, where: str) -> MSSubset:
    if not isinstance(v, list) or len(v) != len(carrier.sorts):
        _fail(where, f"expected {len(carrier.sorts)} element lists")
    mask = 0
    for s, elems in enumerate(v):
        if not isinstance(elems, list):
            _fail(where, "expected a list of element ids")
        for x in elems:
            x = _int(x, where)
            if not 0 <= x < carrier.sizes[s]:
                _fail(where, f"element {x} out of range for sort {carrier.sorts.names[s]!r}")
            mask |= carrier.bit(s, x)
    return MSSubset(carrier, mask)


# --------------------------------------------------------------------------
# algebra


def algebra_from_dict(doc: dict) -> Algebra | SynthesizedAlgebra:
    _keys(doc, _ALGEBRA_KEYS, _ALGEBRA_KEYS - {"provenance"}, "algebra")
    carrier = _carrier(doc, "algebra")
    if not isinstance(doc["ops"], list):
        _fail("algebra.ops", "expected a list")
    decls = []
    tables = {}
    for k, op in enumerate(doc["ops"]):
        where = f"ops[{k}]"
        _keys(op, _OP_KEYS, _OP_KEYS, where)
        name = op["name"]
        if not isinstance(name, str) or not name:
            _fail(f"{where}.name", "expected a nonempty string")
        if name in tables:
            _fail(f"{where}.name", f"duplicate operation {name!r}")
        if not isinstance(op["arity"], list):
            _fail(f"{where}.arity", "expected a list of sort names")
        try:
            arity = tuple(carrier.sorts.index(s) for s in op["arity"])
            coarity = carrier.sorts.index(op["sort"])
        except (ManySortedError, TypeError) as e:
            _fail(where, str(e))
        shape = tuple(carrier.sizes[s] for s in arity)
        if not isinstance(op["table"], dict):
            _fail(f"{where}.table", "expected an object keyed by tuples")
        table = np.full(shape, -1, dtype=np.int64)
        for key, val in op["table"].items():
            a = parse_tuple_key(key, f"{where}.table")
            if len(a) != len(shape) or any(not x < n for x, n in zip(a, shape)):
                _fail(f"{where}.table", f"tuple {key!r} does not fit arity {op['arity']}")
            val = _int(val, f"{where}.table[{key!r}]")
            if not 0 <= val < carrier.sizes[coarity]:
                _fail(f"{where}.table[{key!r}]", f"value {val} outside sort {op['sort']!r}")
            if table[a] != -1:
                _fail(f"{where}.table", f"tuple {key!r} given twice")
            table[a] = val
        if np.any(table < 0):
            missing = next(",".join(map(str, a)) for a in np.ndindex(*shape) if table[a] < 0)
            _fail(f"{where}.table", f"table not total: missing tuple {missing!r}")
        decls.append(OpDecl(name, arity, coarity))
        tables[name] = table
    try:
        algebra = Algebra(carrier, Signature(carrier.sorts, tuple(decls)), tables)
    except ManySortedError as e:
        _fail("algebra", str(e))
    if "provenance" not in doc:
        return algebra
    prov = {}
    if not isinstance(doc["provenance"], dict):
        _fail("provenance", "expected an object")
    for name, rec in doc["provenance"].items():
        where = f"provenance[{name!r}]"
        _keys(rec, _ORIGIN_KEYS, _ORIGIN_KEYS, where)
        if name not in tables:
            _fail(where, "no such operation")
        try:
            sub = parse_spec(carrier, rec["subset"])
            s = carrier.sorts.index(rec["sort"])
            w = Word(carrier.sorts, tuple(carrier.sorts.index(x) for x in rec["word"]))
        except (ManySortedError, TypeError, AttributeError) as e:
            _fail(where, str(e))
        prov[name] = OpOrigin(sub, s, _int(rec["element"], where), w)
    return SynthesizedAlgebra(algebra, prov)


def algebra_to_dict(A: Algebra | SynthesizedAlgebra) -> dict:
    prov = None
    if isinstance(A, SynthesizedAlgebra):
        A, prov = A.algebra, A.provenance
    c = A.carrier
    names = c.sorts.names
    ops = []
    for op in sorted(A.signature.ops, key=lambda o: o.name):
        t = A.tables[op.name]
        table = {",".join(map(str, a)): int(t[a]) for a in product(*(range(k) for k in t.shape))}
        ops.append(
            {
                "name": op.name,
                "arity": [names[s] for s in op.arity],
                "sort": names[op.coarity],
                "table": table,
            }
        )
    doc = {"kind": "algebra", "sorts": list(names), "carrier": list(c.sizes), "ops": ops}
    if prov is not None:
        doc["provenance"] = {
            name: {
                "subset": format_spec(o.subset),
                "sort": names[o.sort],
                "element": o.element,
                "word": o.word.names(),
            }
            for name, o in sorted(prov.items())
        }
    return doc


# --------------------------------------------------------------------------
# closure table


def table_from_dict(doc: dict, check_axioms: bool = True) -> ClosureTable:
    _keys(doc, _TABLE_KEYS, _TABLE_KEYS, "closure_table")
    carrier = _carrier(doc, "closure_table")
    try:
        carrier.check_cap()
    except ManySortedError as e:
        _fail("closure_table", str(e))
    rows = doc["table"]
    if not isinstance(rows, list):
        _fail("closure_table.table", "expected a list of rows")
    out = np.full(carrier.num_subsets, -1, dtype=np.int64)
    for k, row in enumerate(rows):
        where = f"table[{k}]"
        _keys(row, {"in", "out"}, {"in", "out"}, where)
        X = _subset_from_lists(carrier, row["in"], f"{where}.in")
        Y = _subset_from_lists(carrier, row["out"], f"{where}.out")
        if out[X.mask] != -1:
            _fail(where, f"subset {format_spec(X)!r} listed twice")
        out[X.mask] = Y.mask
    if np.any(out < 0):
        order = kernels.canonical_order(carrier.total)
        first = int(order[np.argmax(out[order] < 0)])
        _fail("closure_table", f"table not total: missing X={format_spec(MSSubset(carrier, first))!r}")
    J = ClosureTable(carrier, out)
    if check_axioms:
        try:
            require_closure(J)
        except ManySortedError as e:
            _fail("closure_table", str(e))
    return J


def table_to_dict(J: ClosureTable) -> dict:
    c = J.carrier
    T = J.table()
    rows = []
    for m in kernels.canonical_order(c.total).tolist():
        rows.append(
            {
                "in": _subset_lists(MSSubset(c, m)),
                "out": _subset_lists(MSSubset(c, int(T[m]))),
            }
        )
    return {"kind": "closure_table", "sorts": list(c.sorts.names), "carrier": list(c.sizes), "table": rows}


# --------------------------------------------------------------------------
# files


def dumps(obj: Algebra | SynthesizedAlgebra | ClosureTable) -> str:
    if isinstance(obj, ClosureTable):
        doc = table_to_dict(obj)
    else:
        doc = algebra_to_dict(obj)
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def loads(text: str, source: str = "<string>", check_axioms: bool = True):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"{source}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise InstanceError(f"{source}: top level must be an object")
    kind = doc.get("kind")
    try:
        if kind == "algebra":
            return algebra_from_dict(doc)
        if kind == "closure_table":
            return table_from_dict(doc, check_axioms)
    except InstanceError as e:
        raise InstanceError(f"{source}: {e}") from None
    raise InstanceError(f"{source}: unknown kind {kind!r}")


def load_instance(path: str | Path, check_axioms: bool = True):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InstanceError(f"{path}: {e.strerror}") from None
    return loads(text, str(path), check_axioms)


def save_instance(obj, path: str | Path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")
