import pytest
from hypothesis import given, strategies as st

from conftest import IA, itg41, itg51
from sbcpa import ModelError, parse_model, validate_model
from sbcpa.exprlang import NIL, TRUE
from sbcpa.model import (
    ITG, STOP, Agent, ChannelSignature, Interaction, Model, Parameter, Prefix, SbcReferenceError,
    Transition, make_prefix,
)


def test_make_prefix_defaults(counter):
    p = make_prefix(None, "a41", None, counter)
    assert p.guard == TRUE and p.snippet == NIL
    assert p.interaction.id == "a41"
    assert str(p) == "(nil, a41, nil)"


def test_make_prefix_guarded(counter):
    p = make_prefix("A > 200", "a43", None, counter)
    assert str(p) == "(A > 200, a43, nil)"


def test_make_prefix_full(counter):
    p = make_prefix("c_count > 0", "a51", "c_count = c_count - 1;", counter)
    assert str(p) == "(c_count > 0, a51, c_count = c_count - 1;)"


def test_make_prefix_unknown_interaction(counter):
    with pytest.raises(SbcReferenceError):
        make_prefix(None, "nope", None, counter)


def test_make_prefix_foreign_interaction(counter):
    stranger = Interaction("a41", Agent.actor("Bob"), "inc", Agent.component("Counter"))
    with pytest.raises(SbcReferenceError):
        make_prefix(None, stranger, None, counter)


@given(st.sampled_from(sorted(IA)), st.sampled_from([None, "x > 1", "y == 2"]),
       st.sampled_from([None, "x = 1;", "x = x + 1; y = 2;"]))
def test_make_prefix_idempotent(ia, guard, snippet):
    once = make_prefix(guard, IA[ia], snippet)
    assert make_prefix(once.guard, once.interaction, once.snippet) == once


@pytest.mark.parametrize("ia", list(IA.values()), ids=list(IA))
def test_interaction_type_total_and_exclusive(ia):
    assert ia.type in (1, 2)
    assert (ia.type == 1) == (ia.caller.kind == "actor")
    assert (ia.type == 2) == (ia.caller.kind == "component")


def test_parameter_format():
    assert str(Parameter("out", "PastDueBalance", "Real")) == "out PastDueBalance: Real"


def test_itg_equality_ignores_order():
    g = itg41()
    shuffled = ITG(g.name, tuple(reversed(g.states)), g.initial_state, tuple(reversed(g.transitions)),
                   g.initial_snippet)
    assert shuffled == g and hash(shuffled) == hash(g)


def test_itg_states_exclude_stop():
    assert STOP not in itg41().states
    assert itg41().states == ("s41", "s42")


# -- validation --------------------------------------------------------------

def test_atm_is_valid(atm):
    assert validate_model(atm) == []


def test_counter_is_valid(counter):
    assert validate_model(counter) == []


def test_duplicate_initial_transition_in_source():
    text = """
        actor U; component C; channel go(); interaction a = U -> :C . go;
        itg X { init -> s1; init -> s2; s1 -[ a ]-> s2; }
    """
    with pytest.raises(ModelError) as exc:
        parse_model(text)
    rules = [d.rule for d in exc.value.diagnostics]
    assert rules == ["duplicate-initial"]
    assert exc.value.diagnostics[0].loc.line == 3


def test_dangling_channel():
    u, c = Agent.actor("U"), Agent.component("C")
    model = Model(actors=("U",), components=("C",), interactions=(Interaction("a", u, "missing", c),))
    diags = validate_model(model)
    assert [d.rule for d in diags] == ["dangling-channel"]


def test_missing_initial():
    u, c = Agent.actor("U"), Agent.component("C")
    a = Interaction("a", u, "go", c)
    g = ITG("X", ("s1",), None, (Transition("s1", Prefix(TRUE, a), STOP),))
    model = Model(("U",), ("C",), (ChannelSignature("go"),), (a,), (g,))
    assert [d.rule for d in validate_model(model)] == ["missing-initial"]


def test_undeclared_state():
    u, c = Agent.actor("U"), Agent.component("C")
    a = Interaction("a", u, "go", c)
    g = ITG("X", ("s1",), "s1", (Transition("s1", Prefix(TRUE, a), "ghost"),))
    model = Model(("U",), ("C",), (ChannelSignature("go"),), (a,), (g,))
    assert [d.rule for d in validate_model(model)] == ["undeclared-state"]


def test_unbound_guard_variable():
    text = """
        actor U; component C; channel go(); interaction a = U -> :C . go;
        itg X { init -> s1; s1 -[ ghost > 1 ? a ]-> STOP; }
    """
    with pytest.raises(ModelError) as exc:
        parse_model(text)
    (d,) = exc.value.diagnostics
    assert d.rule == "unbound-variable" and "ghost" in d.message


def test_actor_component_overlap():
    model = Model(actors=("X",), components=("X",))
    assert [d.rule for d in validate_model(model)] == ["agent-overlap"]


def test_callee_must_be_component():
    a = Interaction("a", Agent.actor("U"), "go", Agent.actor("V"))
    model = Model(("U", "V"), (), (ChannelSignature("go"),), (a,))
    assert "callee-not-component" in [d.rule for d in validate_model(model)]


def test_loop_over_non_loop_is_warning():
    text = """
        actor U; component C; channel go(); interaction a = U -> :C . go;
        itg X { init -> s1; s1 -[ a ]-> STOP; }
        def D = loop X;
    """
    model = parse_model(text)
    (d,) = validate_model(model)
    assert d.rule == "loop-not-loop" and d.severity == "warning"


def test_definition_cycle():
    text = """
        actor U; component C; channel go(); interaction a = U -> :C . go;
        def A = a . ref B;
        def B = (ref A alt STOP);
    """
    with pytest.raises(ModelError) as exc:
        parse_model(text)
    assert {d.rule for d in exc.value.diagnostics} == {"definition-cycle"}


def test_valid_itg_mentions_only_declared_states():
    for g in (itg41(), itg51()):
        for t in g.transitions:
            assert t.source in g.states
            assert t.target is STOP or t.target in g.states
