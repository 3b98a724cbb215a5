import json

import pytest
from hypothesis import given

from manysorted.algebra import Algebra, as_closure_operator
from manysorted.closure import ClosureTable, same_operator
from manysorted.formats import InstanceError, dumps, load_instance, loads
from manysorted.synthesis import SynthesizedAlgebra, synthesize
from strategies import algebras, closure_tables


def test_unary_f_file(golden):
    A = load_instance(golden / "unary_f.json")
    assert isinstance(A, Algebra)
    assert len(A.carrier.sorts) == 2 and len(A.signature.ops) == 1


def test_golden_files_are_canonical(golden):
    for path in sorted(golden.glob("*.json")):
        text = path.read_text()
        assert dumps(loads(text, str(path))) == text, path.name


def _doc(golden, name):
    return json.loads((golden / name).read_text())


def test_missing_row_names_the_subset(golden):
    doc = _doc(golden, "unary_f_sg.json")
    del doc["table"][3]
    with pytest.raises(InstanceError, match=r"table not total: missing X='s:1'"):
        loads(json.dumps(doc))


def test_malformed_tuple_key(golden):
    doc = _doc(golden, "binary_not_unary.json")
    doc["ops"][0]["table"]["0,,1"] = doc["ops"][0]["table"].pop("0,1")
    with pytest.raises(InstanceError, match="malformed tuple key '0,,1'"):
        loads(json.dumps(doc))


def test_json_syntax_error_has_position():
    with pytest.raises(InstanceError, match=r"^x\.json:2:1: "):
        loads('{"kind": "algebra",\n}', "x.json")


@pytest.mark.parametrize(
    "mutate, msg",
    [
        (lambda d: d.update(extra=1), "unknown field"),
        (lambda d: d["ops"][0].update(colour="red"), "unknown field"),
        (lambda d: d["ops"][0]["table"].update({"0": 5}), "outside sort"),
        (lambda d: d["ops"][0]["table"].pop("1"), "not total"),
        (lambda d: d["ops"][0].update(sort="q"), "unknown sort"),
        (lambda d: d.update(carrier=[2]), "sizes"),
        (lambda d: d.update(kind="poset"), "unknown kind"),
        (lambda d: d["ops"][0].update(arity="s"), "list of sort names"),
    ],
)
def test_validation_errors(golden, mutate, msg):
    doc = _doc(golden, "unary_f.json")
    mutate(doc)
    with pytest.raises(InstanceError, match=msg):
        loads(json.dumps(doc))


def test_table_axioms_checked_unless_skipped(golden):
    doc = _doc(golden, "unary_f_sg.json")
    doc["table"][-1]["out"] = [[], []]
    with pytest.raises(InstanceError, match="not a closure operator"):
        loads(json.dumps(doc))
    J = loads(json.dumps(doc), check_axioms=False)
    assert isinstance(J, ClosureTable)


def test_missing_file():
    with pytest.raises(InstanceError):
        load_instance("/nonexistent/instance.json")


def test_synthesized_provenance_round_trip(golden):
    S = synthesize(load_instance(golden / "unary_f_sg.json"))
    text = dumps(S)
    back = loads(text)
    assert isinstance(back, SynthesizedAlgebra)
    assert dumps(back) == text
    assert back.provenance == S.provenance


@given(algebras())
def test_algebra_round_trip_is_byte_identical(A):
    text = dumps(A)
    assert dumps(loads(text)) == text


@given(closure_tables())
def test_table_round_trip_is_byte_identical(J):
    text = dumps(J)
    back = loads(text)
    assert dumps(back) == text
    assert same_operator(back, J)


@given(algebras())
def test_sg_table_files_round_trip(A):
    J = as_closure_operator(A).to_table()
    assert same_operator(loads(dumps(J)), J)
