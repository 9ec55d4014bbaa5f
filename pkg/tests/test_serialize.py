import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from scaleinv.graphs import LabeledGraph, cayley_ball
from scaleinv.groups.affine import AffineElement
from scaleinv.groups.bs import BSGroup
from scaleinv.groups.heisenberg import A, C, HeisenbergElement
from scaleinv.groups.lamplighter import LamplighterGroup
from scaleinv.serialize import (FormatError, OutputDocument, decode, encode, parse_graph, parse_table,
                                serialize_graph, table_csv)
from scaleinv.tree import Ray

ints = st.integers(-10 ** 6, 10 ** 6)


@given(x=ints, y=ints, z=ints)
def test_heisenberg_round_trip(x, y, z):
    g = HeisenbergElement(x, y, z)
    assert decode(json.loads(json.dumps(encode(g)))) == g


@pytest.mark.parametrize("group", [LamplighterGroup(), BSGroup(2, 3), BSGroup(5, 3)])
def test_group_payload_round_trip(group):
    rng = random.Random(1)
    for _ in range(50):
        g = group.random_element(rng)
        assert decode(json.loads(json.dumps(encode(g)))) == g


def test_other_payloads_round_trip():
    for x in (Ray((1, 2), (0,)), (0, 3, 1), AffineElement(((2, 1), (1, 1)), (3, -4)), 7, "tile"):
        assert decode(json.loads(json.dumps(encode(x)))) == x
    assert encode(Fraction(-3, 4)) == "-3/4"
    assert encode({"a": [True, None]}) == {"a": [True, None]}


def test_encode_decode_errors():
    with pytest.raises(FormatError):
        encode(object())
    with pytest.raises(FormatError):
        decode({"unknown": 1})
    with pytest.raises(FormatError):
        decode([1, 2])


def _heis_ball():
    gens = {"A": A, "A^-1": A.inverse(), "C": C, "C^-1": C.inverse()}
    return cayley_ball(gens, A.identity(), 2, {"group": "heis-ex1"})


@pytest.mark.parametrize("fmt", ["graph-json", "graph-dot"])
def test_graph_round_trip(fmt):
    ball = _heis_ball()
    doc = serialize_graph(ball, fmt, "scaleinv ball", seed=None)
    text = doc.render()
    back = parse_graph(text, fmt)
    assert back == ball
    assert back.metadata["group"] == "heis-ex1"
    # re-serializing the parsed graph reproduces the same bytes
    assert serialize_graph(back, fmt, "scaleinv ball").render() == text


def test_graph_with_awkward_labels():
    g = LabeledGraph({"note": 'quote " and \\ slash'})
    u, v = g.add_vertex(Ray((), (0,))), g.add_vertex(Ray((1,), (0,)))
    g.add_edge(u, v, 'a "b"')
    for fmt in ("graph-json", "graph-dot"):
        back = parse_graph(serialize_graph(g, fmt).render(), fmt)
        assert back == g and back.edges[0][2] == 'a "b"'


def test_graph_format_errors():
    with pytest.raises(FormatError):
        serialize_graph(_heis_ball(), "table-csv")
    with pytest.raises(FormatError):
        parse_graph("", "certificate-json")
    with pytest.raises(FormatError):
        OutputDocument("yaml", {}, "").render()


def test_table_csv_crlf_and_provenance():
    body = table_csv(["n", "value", "note"], [(1, 0.5, "a,b"), (2, [1, 2], 'q"')])
    assert body.endswith("\r\n") and body.count("\r\n") == 3
    doc = OutputDocument("table-csv", body, "scaleinv percolate --seed 3", seed=3).render()
    assert doc.startswith("# tool: scaleinv\n")
    assert parse_table(doc) == [["n", "value", "note"], ["1", "0.5", "a,b"], ["2", "[1,2]", 'q"']]


def test_certificate_json_document():
    text = OutputDocument("certificate-json", {"ok": True}, "scaleinv x", seed=None).render()
    doc = json.loads(text)
    assert doc["format"] == "certificate-json" and doc["payload"] == {"ok": True}
    assert doc["provenance"]["command"] == "scaleinv x" and doc["provenance"]["seed"] is None
