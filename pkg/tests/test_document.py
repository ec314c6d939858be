import json
from fractions import Fraction as F
from pathlib import Path

import pytest

from summa.document import parse_spec_document, serialize_document
from summa.errors import InvalidTailModel, SchemaError, UnknownLabel

DEMO = Path(__file__).resolve().parents[1] / "sample_specs" / "demo.json"


def minimal_doc(**overrides):
    doc = {
        "matrices": [{"label": "c", "kind": "cesaro"}],
        "sequences": [{"label": "x", "kind": "periodic", "block": ["1", "0"]}],
        "ideals": [{"label": "fin", "kind": "fin"}],
        "tasks": [],
    }
    doc.update(overrides)
    return doc


def test_parse_demo_document():
    doc = parse_spec_document(DEMO.read_text())
    assert "cesaro" in doc.matrices
    assert doc.sequence("alt01").term(0) == (F(1),)
    assert doc.ideal("gen-evens").kind == "countably-generated"
    assert len(doc.tasks) == 7


def test_cesaro_declaration_builds_expected_entries():
    doc = parse_spec_document(json.dumps(minimal_doc()))
    c = doc.matrix("c")
    assert c.entry(3, 1).component(0, 0) == F(1, 4)
    assert c.entry(3, 5).is_zero()


def test_periodic_sequence_literal():
    doc = parse_spec_document(json.dumps(minimal_doc()))
    x = doc.sequence("x")
    assert [x.term(k)[0] for k in range(4)] == [1, 0, 1, 0]


def test_band_entry_outside_band_is_rejected():
    bad = minimal_doc(
        matrices=[
            {
                "label": "b",
                "kind": "banded",
                "band": [2, 1],
                "period": 1,
                "entries": {"0,2": "1"},
            }
        ]
    )
    with pytest.raises(InvalidTailModel):
        parse_spec_document(json.dumps(bad))


def test_unknown_label_rejected():
    bad = minimal_doc(
        tasks=[
            {
                "task": "check-regular",
                "family": ["nope"],
                "idealI": "fin",
                "idealJ": "fin",
            }
        ]
    )
    with pytest.raises(UnknownLabel):
        parse_spec_document(json.dumps(bad))


def test_duplicate_labels_rejected():
    bad = minimal_doc(
        matrices=[{"label": "c", "kind": "cesaro"}, {"label": "c", "kind": "identity"}]
    )
    with pytest.raises(SchemaError):
        parse_spec_document(json.dumps(bad))


def test_malformed_rational_rejected():
    bad = minimal_doc(
        sequences=[{"label": "x", "kind": "constant", "value": "one half"}]
    )
    with pytest.raises(SchemaError):
        parse_spec_document(json.dumps(bad))


def test_invalid_geometric_ratio_rejected():
    bad = minimal_doc(
        matrices=[
            {
                "label": "g",
                "kind": "dense-prefix",
                "block": [["1"]],
                "tail": {"kind": "geometric", "c": "1", "ratio": "3/2"},
            }
        ]
    )
    with pytest.raises(InvalidTailModel):
        parse_spec_document(json.dumps(bad))


def test_rowselect_document_kind():
    doc_dict = minimal_doc(
        matrices=[
            {"label": "a", "kind": "unit-shift", "stride": 2, "offset": 0},
            {"label": "b", "kind": "unit-shift", "stride": 2, "offset": 1},
            {
                "label": "sel",
                "kind": "rowselect",
                "family": ["a", "b"],
                "selection": {"prefix": [], "period": [0, 1]},
            },
        ]
    )
    doc = parse_spec_document(json.dumps(doc_dict))
    sel = doc.matrix("sel")
    assert sel.entry(0, 0).component(0, 0) == 1  # row 0 from member a
    assert sel.entry(1, 3).component(0, 0) == 1  # row 1 from member b


def test_sqrt_entries_need_interval_mode():
    doc_dict = minimal_doc(
        matrices=[
            {
                "label": "irr",
                "kind": "banded",
                "band": [0, 0],
                "period": 1,
                "entries": {"0,0": "sqrt:1/2"},
            }
        ]
    )
    with pytest.raises(SchemaError):
        parse_spec_document(json.dumps(doc_dict), mode="exact")
    doc = parse_spec_document(json.dumps(doc_dict), mode="interval")
    entry = doc.matrix("irr").entry(0, 0).component(0, 0)
    assert entry.lo * entry.lo <= F(1, 2) <= entry.hi * entry.hi


def test_serialize_roundtrip_is_structurally_equal():
    original = parse_spec_document(DEMO.read_text())
    dumped = serialize_document(original)
    again = parse_spec_document(json.dumps(dumped))
    assert serialize_document(again) == dumped
    assert set(again.matrices) == set(original.matrices)
    assert set(again.sequences) == set(original.sequences)
    for label in original.matrices:
        a, b = original.matrix(label), again.matrix(label)
        for n in range(4):
            for k in range(6):
                assert a.entry(n, k) == b.entry(n, k)
