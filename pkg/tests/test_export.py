import json

import pydot
from hypothesis import given, settings, strategies as st

from conftest import R41, R43, R51, R53, R55, T, itg41, itg51, itg61
from sbcpa.exprlang import parse_snippet
from sbcpa.export import export_dot, export_json, import_json
from sbcpa.model import ITG
from sbcpa.semantics import compose_alternative, compose_parallel_expand, compose_sequence, expand


def constructed(counter, atm):
    out = [expand(counter, n) for n in ("ITG_41", "ITG_51", "ITG_61", "s55", "s71", "s81", "s91")]
    out += [expand(atm, n) for n in ("ITG_101", "ITG_201", "ITG_301", "s_ATM")]
    out += [compose_sequence(R55, itg51(), "s55"), compose_alternative(itg51(), itg61(), "s71"),
            compose_parallel_expand(itg51(), itg61()), compose_parallel_expand(itg41(), itg41())]
    return out


def test_itg61_json():
    data = json.loads(export_json(itg61()))
    assert data["states"] == ["s61"]
    assert data["initial"] == {"snippet": None, "state": "s61"}
    (t,) = data["transitions"]
    assert t == {"src": "s61", "guard": None, "interactionId": "a61", "caller": "User", "channel": "finish",
                 "callee": ":Counter", "snippet": None, "dst": "STOP"}


def test_expanded_s81_json(counter):
    data = json.loads(export_json(expand(counter, "s81")))
    assert len(data["states"]) == 6 and len(data["transitions"]) == 9
    assert data["states"] == sorted(data["states"])
    assert data["initial"] == {"snippet": "c_count = 100;", "state": "s81"}


def test_key_order_is_stable():
    text = export_json(itg41())
    assert list(json.loads(text)) == ["initial", "name", "states", "transitions"]
    assert text.index('"callee"') < text.index('"caller"') < text.index('"channel"')


def test_roundtrip_corpus(counter, atm):
    for g in constructed(counter, atm):
        assert import_json(export_json(g)) == g


def test_byte_stable(counter, atm):
    for g in constructed(counter, atm):
        shuffled = ITG(g.name, tuple(reversed(g.states)), g.initial_state, tuple(reversed(g.transitions)),
                       g.initial_snippet)
        assert export_json(shuffled) == export_json(g)


def test_string_guard_roundtrip(atm):
    g = atm.itg("ITG_101")
    text = export_json(g)
    assert '"guard": "cardValid == \\"yes\\""' in text
    assert import_json(text) == g


# -- DOT -----------------------------------------------------------------------------

def test_dot_itg41():
    text = export_dot(itg41())
    (graph,) = pydot.graph_from_dot_data(text)
    names = {n.get_name() for n in graph.get_nodes()} - {"node", "edge"}
    assert names == {"n0", "n1", "__entry", "__stop"}
    assert len(graph.get_edges()) == 4
    assert graph.get_node("__stop")[0].get("shape") == "point"
    assert 'style=rounded' in text


def test_dot_init_only():
    g = ITG("E", ("e",), "e")
    (graph,) = pydot.graph_from_dot_data(export_dot(g))
    names = {n.get_name() for n in graph.get_nodes()} - {"node", "edge"}
    assert names == {"n0", "__entry"}
    assert len(graph.get_edges()) == 1


def test_dot_labels():
    text = export_dot(itg51())
    assert '[label="[c_count > 0] a51 / c_count = c_count - 1;"]' in text
    assert '__entry -> n0 [label="c_count = 100;"]' in text


def test_dot_parses_for_corpus(counter, atm):
    for g in constructed(counter, atm):
        (graph,) = pydot.graph_from_dot_data(export_dot(g))
        assert len(graph.get_edges()) == len(g.transitions) + 1


# -- random graphs ------------------------------------------------------------------

PREFIXES = [R41, R43, R51, R53, R55]


@st.composite
def itgs(draw):
    n = draw(st.integers(1, 4))
    names = [draw(st.sampled_from(["s", "x y", "q\"uote", "ünï", "t"])) + str(i) for i in range(n)]
    edges = draw(st.lists(st.tuples(st.sampled_from(names), st.sampled_from(PREFIXES),
                                    st.sampled_from(names + ["•"])), max_size=6))
    snippet = draw(st.sampled_from([None, "a = 1;", 's = "x";']))
    return ITG.build("G", names[0], [T(*e) for e in edges], parse_snippet(snippet))


@settings(max_examples=100, deadline=None)
@given(itgs())
def test_random_roundtrip(g):
    assert import_json(export_json(g)) == g
    (graph,) = pydot.graph_from_dot_data(export_dot(g))
    assert len(graph.get_edges()) == len(g.transitions) + 1
