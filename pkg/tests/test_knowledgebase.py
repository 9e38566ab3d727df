import json

import numpy as np
import pytest

from vnfca.errors import KnowledgebaseError
from vnfca.knowledgebase import (build_model, load_document, load_path,
                                 query_capacity, serialize)
from vnfca.model import evaluate_throughput

from conftest import DATA, FIXTURES

ALL_GOOD = sorted(DATA.glob("*.json")) + [FIXTURES / "incomplete.json", FIXTURES / "one_overhead.json"]


def test_load_illustration():
    doc = load_path(DATA / "two_machine.json")
    assert doc.units == "kpps"
    assert len(doc.capacity) == 4
    assert doc.machine_names == ["m1", "m2"]


def test_build_model_illustration():
    model = build_model(load_path(DATA / "two_machine.json"))
    assert model.shape == (2, 2) and model.linear_only
    np.testing.assert_array_equal(model.b, [[21, 35], [6, 30]])


def test_build_subset():
    doc = load_path(DATA / "two_machine.json")
    model = build_model(doc, ["m2"], ["vnf2"])
    assert model.shape == (1, 1) and model.b[0, 0] == 30
    model = build_model(doc, ["m2", "m1"], ["vnf2", "vnf1"])
    np.testing.assert_array_equal(model.b, [[30, 6], [35, 21]])


def test_build_rejects_empty_subset():
    with pytest.raises(KnowledgebaseError):
        build_model(load_path(DATA / "two_machine.json"), [], None)


def test_incomplete_grid_loads_but_cannot_build():
    doc = load_path(FIXTURES / "incomplete.json")
    with pytest.raises(KnowledgebaseError, match="incomplete grid"):
        build_model(doc)
    assert build_model(doc, ["m1"]).shape == (1, 2)


def test_overhead_sample_clears_linear_flag():
    assert not build_model(load_path(FIXTURES / "one_overhead.json")).linear_only


@pytest.mark.parametrize("name, path_fragment, text", [
    ("bad_nonmonotone.json", "capacity[0].curve[2]", "not increasing"),
    ("bad_dangling.json", "capacity[2].machine", "unknown machine 'm9'"),
    ("bad_duplicate.json", "capacity[4]", "duplicate pair (m1, vnf2)"),
    ("bad_version.json", "version", "unknown version"),
    ("bad_json.json", "$", "malformed JSON"),
])
def test_malformed_rejected_with_path(name, path_fragment, text):
    with pytest.raises(KnowledgebaseError) as exc:
        load_path(FIXTURES / name)
    assert path_fragment in exc.value.path
    assert text in str(exc.value)
    assert name in str(exc.value)


def test_capacity_must_be_number():
    raw = json.loads((DATA / "two_machine.json").read_text())
    raw["capacity"][1]["curve"][1][1] = "35"
    with pytest.raises(KnowledgebaseError) as exc:
        load_document(json.dumps(raw))
    assert exc.value.path == "capacity[1].curve[1][1]"


def test_duplicate_machine_name():
    raw = json.loads((DATA / "two_machine.json").read_text())
    raw["machines"][1]["name"] = "m1"
    with pytest.raises(KnowledgebaseError, match=r"machines\[1\]\.name"):
        load_document(json.dumps(raw))


@pytest.mark.parametrize("path", ALL_GOOD, ids=lambda p: p.name)
def test_round_trip(path):
    doc = load_path(path)
    again = load_document(serialize(doc))
    assert again == doc
    assert load_document(serialize(again)) == doc


def test_query_capacity():
    doc = load_path(DATA / "two_machine.json")
    assert query_capacity(doc, "m1", "vnf1", 0.5) == 10.5
    curved = load_path(FIXTURES / "one_overhead.json")
    assert query_capacity(curved, "m1", "vnf1", 0.5) == 8
    assert query_capacity(curved, "m1", "vnf1", 0.25) == 4


def test_query_capacity_errors():
    doc = load_path(FIXTURES / "incomplete.json")
    with pytest.raises(KnowledgebaseError):
        query_capacity(doc, "m2", "vnf1", 0.5)
    with pytest.raises(ValueError):
        query_capacity(doc, "m1", "vnf1", 1.5)


@pytest.mark.parametrize("path", ALL_GOOD, ids=lambda p: p.name)
def test_query_monotone(path):
    doc = load_path(path)
    grid = np.linspace(0, 1, 101)
    for entry in doc.capacity:
        vals = [query_capacity(doc, entry.machine, entry.vnf, f) for f in grid]
        assert np.all(np.diff(vals) >= 0)


def test_full_specialization_reproduces_endpoints():
    model = build_model(load_path(DATA / "two_machine_overhead.json"))
    for i in range(2):
        for j in range(2):
            u = np.zeros((2, 2))
            u[i, j] = 1.0
            assert evaluate_throughput(u, model)[j] == model.curves[i][j].full
